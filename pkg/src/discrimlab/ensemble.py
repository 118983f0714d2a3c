"""Core value types: hypothesis ensembles, POVMs and certified scalars."""

from dataclasses import dataclass, field

import numpy as np

from . import matops
from .errors import DegenerateInputError, PreconditionError

WEIGHTED_TOL = 1e-9


@dataclass(frozen=True)
class CertifiedValue:
    """An SDP-derived scalar with both bounds.

    ``primal`` is the value achieved by the recovered measurement and
    ``dual`` the value certified by the dual witness; ``gap`` is their
    distance, so the true optimum lies between them.
    """

    primal: float
    dual: float
    gap: float

    @property
    def value(self):
        return self.primal

    @property
    def lower(self):
        return min(self.primal, self.dual)

    @property
    def upper(self):
        return max(self.primal, self.dual)

    def to_dict(self):
        return {"primal": self.primal, "dual": self.dual, "gap": self.gap}


@dataclass(frozen=True)
class Ensemble:
    """Ordered PSD hypotheses ``A_1..A_r`` with priors absorbed into the operators."""

    hypotheses: tuple
    labels: tuple = field(default=None)

    def __post_init__(self):
        ops = tuple(matops.hermitian(a) for a in self.hypotheses)
        if len(ops) == 0:
            raise PreconditionError("an ensemble needs at least one hypothesis")
        d = ops[0].shape[0]
        if any(a.shape != (d, d) for a in ops):
            raise PreconditionError("hypotheses must share a common dimension")
        for i, a in enumerate(ops):
            matops.check_psd(a, f"hypothesis {i + 1}")
        if all(not np.any(a) for a in ops):
            raise DegenerateInputError("all hypotheses are zero")
        labels = self.labels
        if labels is None:
            labels = tuple(f"H{i + 1}" for i in range(len(ops)))
        elif len(labels) != len(ops):
            raise PreconditionError("labels and hypotheses differ in length")
        object.__setattr__(self, "hypotheses", ops)
        object.__setattr__(self, "labels", tuple(labels))

    @classmethod
    def from_states(cls, states, weights, labels=None):
        """Build ``p_k * sigma_k`` from states and priors."""
        if len(states) != len(weights):
            raise PreconditionError("states and weights differ in length")
        return cls(tuple(float(p) * np.asarray(s, dtype=complex) for s, p in zip(states, weights)),
                   labels)

    @classmethod
    def from_vectors(cls, vectors, weights, labels=None):
        """Rank-one hypotheses ``p_k |psi_k><psi_k|`` from (normalized) vectors."""
        return cls.from_states([matops.projector(v) for v in vectors], weights, labels)

    @property
    def r(self):
        return len(self.hypotheses)

    @property
    def dim(self):
        return self.hypotheses[0].shape[0]

    @property
    def weights(self):
        return np.array([matops.real_trace(a) for a in self.hypotheses])

    @property
    def total(self):
        """``A_0 = sum_k A_k``."""
        return sum(self.hypotheses)

    @property
    def total_trace(self):
        return float(np.sum(self.weights))

    @property
    def is_weighted(self):
        return abs(self.total_trace - 1.0) <= WEIGHTED_TOL

    def complement(self, i):
        """``A_0 - A_i``, the pooled alternative to hypothesis ``i``."""
        return sum(a for k, a in enumerate(self.hypotheses) if k != i) if self.r > 1 else \
            np.zeros_like(self.hypotheses[0])

    def states(self):
        """Normalized states ``sigma_k`` (zero hypotheses give zero)."""
        out = []
        for a, p in zip(self.hypotheses, self.weights):
            out.append(a / p if p > 0 else np.zeros_like(a))
        return out

    def is_pure(self):
        return all(matops.is_rank_one(a) for a in self.hypotheses)

    def is_diagonal(self, tol=1e-12):
        return all(float(np.max(np.abs(a - np.diag(np.diag(a))))) <= tol for a in self.hypotheses)

    def subset(self, indices):
        return Ensemble(tuple(self.hypotheses[i] for i in indices),
                        tuple(self.labels[i] for i in indices))

    def tensor_power(self, n, cap=matops.TENSOR_CAP):
        """``p_k sigma_k^{(x)n}``: the prior is kept, only the state is powered."""
        ops = []
        for sigma, p in zip(self.states(), self.weights):
            ops.append(p * matops.tensor_power(sigma, n, cap))
        return Ensemble(tuple(ops), self.labels)


@dataclass(frozen=True)
class Povm:
    """PSD effects with ``sum_k E_k <= I``; the remainder is the abstention outcome."""

    effects: tuple

    def __post_init__(self):
        effects = tuple(np.asarray(e, dtype=complex) for e in self.effects)
        object.__setattr__(self, "effects", effects)

    @property
    def completeness_deficit(self):
        d = self.effects[0].shape[0]
        return matops.op_norm(np.eye(d) - sum(self.effects))

    def validate(self, tol=matops.PSD_TOL):
        d = self.effects[0].shape[0]
        for e in self.effects:
            if matops.min_eig(e) < -tol:
                return False
        return matops.max_eig(sum(self.effects)) <= 1.0 + tol * d

    def __len__(self):
        return len(self.effects)


@dataclass(frozen=True)
class MeasurementOps:
    """Measurement operators ``X_k`` with ``sum_k X_k^dagger X_k <= I``.

    General (not necessarily Hermitian) matrices are accepted, since the
    square-measurement operators ``A_k S^{-1/2}`` are not Hermitian.
    """

    operators: tuple

    def __post_init__(self):
        object.__setattr__(self, "operators",
                           tuple(np.asarray(x, dtype=complex) for x in self.operators))

    def povm(self):
        return Povm(tuple(x.conj().T @ x for x in self.operators))
