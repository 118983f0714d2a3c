"""Optimal discrimination of PSD hypotheses.

Multi-hypothesis optima come from the LUB SDP, whose barrier multipliers are
an optimal measurement; every optimum is returned with its primal/dual pair.
Binary problems use the Holevo-Helstrom closed form, commuting ones the
classical maximum-likelihood rule, and pure tensor powers the Gram reduction.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import matops
from .ensemble import CertifiedValue, Ensemble, Povm
from .errors import PreconditionError
from .lattice import glb2_trace, glb_sdp, lub2_trace
from .sdp import solve_lub

YKL_TOL = 1e-7
UNIT_NORM_TOL = 1e-9
GRAM_DET_CUT = 1e-12


@dataclass(frozen=True)
class DiscriminationResult:
    p_error: CertifiedValue
    p_success: CertifiedValue
    povm: Povm
    dual_witness: np.ndarray
    feasibility_slack: float
    newton_steps: int


def binary_error(a, b):
    """Optimal error of ``A`` vs ``B`` and the Holevo-Helstrom projector ``{A - B > 0}``.

    The projector is the effect for deciding ``A``: the achieved error is
    ``Tr A (I - E) + Tr B E``.
    """
    return glb2_trace(a, b), matops.positive_projector(a - b)


def pure_binary_error(p1, p2, overlap_sq):
    """Optimal error of ``p1 psi1`` vs ``p2 psi2`` given ``|<psi1|psi2>|^2``.

    Written as ``2 p1 p2 c / (p1 + p2 + ||A1 - A2||_1)`` so that exponentially
    small errors keep full relative precision.
    """
    s = p1 + p2
    tn = np.sqrt(max(s * s - 4.0 * p1 * p2 * overlap_sq, 0.0))
    den = s + tn
    return 0.0 if den == 0.0 else 2.0 * p1 * p2 * overlap_sq / den


def _support_basis(a0):
    w, v = np.linalg.eigh(a0)
    keep = w > matops.SUPPORT_CUT * max(w[-1], 0.0)
    return v[:, keep]


def optimal_povm(ens, tol=None):
    """Certified optimal success/error probabilities and an optimal POVM.

    The SDP is solved on the support of ``A_0`` (outside it every hypothesis
    vanishes); the orthogonal complement is then added to the outcome of the
    largest-weight hypothesis so the returned POVM is complete.
    """
    ops = ens.hypotheses
    d = ens.dim
    a0 = ens.total
    tr0 = ens.total_trace
    if ens.r == 1:
        cv = CertifiedValue(tr0, tr0, 0.0)
        return DiscriminationResult(CertifiedValue(0.0, 0.0, 0.0), cv,
                                    Povm((np.eye(d, dtype=complex),)), ops[0].copy(), 0.0, 0)

    basis = _support_basis(a0)
    compressed = basis.shape[1] < d
    if compressed:
        small = [basis.conj().T @ a @ basis for a in ops]
    else:
        small = list(ops)
    if tol is None:
        tol = 1e-7 * max(1.0, tr0)
    sol = solve_lub(small, tol=tol)

    if compressed:
        y = basis @ sol.y @ basis.conj().T
        effects = [basis @ e @ basis.conj().T for e in sol.effects]
        rest = np.eye(d, dtype=complex) - basis @ basis.conj().T
        effects[int(np.argmax(ens.weights))] += rest
    else:
        y = sol.y
        effects = list(sol.effects)

    a_bar = [a0 - a for a in ops]
    # every term is non-negative, which keeps small errors accurate
    err_primal = float(sum(np.vdot(ab, e).real for ab, e in zip(a_bar, effects)))
    succ_primal = float(sum(np.vdot(a, e).real for a, e in zip(ops, effects)))
    dual = float(np.trace(y).real)
    gap = sol.gap
    p_success = CertifiedValue(succ_primal, dual, gap)
    p_error = CertifiedValue(err_primal, tr0 - dual, gap)
    slack = min(matops.min_eig(y - a) for a in ops)
    return DiscriminationResult(p_error, p_success, Povm(tuple(effects)), y, slack,
                                sol.newton_steps)


def optimal_error(ens, tol=None):
    """``P_e*`` as a float: 0 for one hypothesis, closed form for two, SDP otherwise."""
    if ens.r == 1:
        return 0.0
    if ens.r == 2:
        return max(glb2_trace(*ens.hypotheses), 0.0)
    return optimal_povm(ens, tol=tol).p_error.primal


def optimal_error_ops(ops, tol=None):
    """``optimal_error`` for a plain list of PSD operators (zeros allowed)."""
    ops = [np.asarray(a, dtype=complex) for a in ops]
    if len(ops) <= 1:
        return 0.0
    if all(not np.any(a) for a in ops):
        return 0.0
    return optimal_error(Ensemble(tuple(ops)), tol=tol)


@dataclass(frozen=True)
class YklReport:
    """YKL conditions for ``Y = sum_k A_k E_k``.

    ``slackness_residual`` is ``max_k ||(Y - A_k) E_k||``, ``min_feasibility``
    the smallest eigenvalue over ``Y - A_k``.
    """

    slackness_residual: float
    min_feasibility: float
    hermiticity_residual: float
    optimal: bool


def verify_ykl(ens, povm, tol=YKL_TOL):
    """Check the optimality (YKL) conditions for a candidate POVM."""
    if len(povm) != ens.r:
        raise PreconditionError("POVM and ensemble differ in length")
    y_raw = sum(a @ e for a, e in zip(ens.hypotheses, povm.effects))
    herm = float(np.max(np.abs(y_raw - y_raw.conj().T)))
    y = 0.5 * (y_raw + y_raw.conj().T)
    resid = max(float(np.linalg.norm((y - a) @ e, 2)) for a, e in zip(ens.hypotheses, povm.effects))
    feas = min(matops.min_eig(y - a) for a in ens.hypotheses)
    scale = max(1.0, ens.total_trace)
    ok = resid <= tol * scale and feas >= -tol * scale and herm <= tol * scale
    return YklReport(resid, feas, herm, bool(ok))


def pairwise_error(ens):
    """``P_{e,2}* = (1/(r-1)) sum_{k<l} P_e*(A_k, A_l)``."""
    if ens.r < 2:
        raise PreconditionError("pairwise error needs r >= 2")
    ops = ens.hypotheses
    total = sum(glb2_trace(ops[k], ops[l]) for k, l in combinations(range(ens.r), 2))
    return total / (ens.r - 1)


def pairwise_success(ens):
    """``P_{s,2}* = (1/(r-1)) sum_{k<l} Tr LUB(A_k, A_l)``."""
    if ens.r < 2:
        raise PreconditionError("pairwise success needs r >= 2")
    ops = ens.hypotheses
    total = sum(lub2_trace(ops[k], ops[l]) for k, l in combinations(range(ens.r), 2))
    return total / (ens.r - 1)


@dataclass(frozen=True)
class DichotomicResult:
    total: float
    per_hypothesis: tuple
    positive_part_form: float


def dichotomic_error(ens):
    """Sum of one-vs-rest binary errors ``sum_i P_e*(A_i, A_0 - A_i)``.

    Also returns ``Tr A_0 - sum_i Tr (2 A_i - A_0)_+`` as a cross-check.
    """
    if ens.r < 2:
        raise PreconditionError("dichotomic error needs r >= 2")
    a0 = ens.total
    per = tuple(max(glb2_trace(a, a0 - a), 0.0) for a in ens.hypotheses)
    alt = ens.total_trace - sum(matops.real_trace(matops.positive_part(2 * a - a0))
                                for a in ens.hypotheses)
    return DichotomicResult(float(sum(per)), per, float(alt))


def classical_assignment(ens, tol=1e-12):
    """Maximum-likelihood decision per basis index, ties to the lowest hypothesis."""
    if not ens.is_diagonal(tol):
        raise PreconditionError("classical oracle needs simultaneously diagonal hypotheses")
    table = np.array([np.diag(a).real for a in ens.hypotheses])
    # argmax returns the first maximal index, which is the documented tie-break
    return np.argmax(table, axis=0), table


def classical_success(ens, tol=1e-12):
    """``sum_x max_k A_k(x)`` for commuting diagonal hypotheses."""
    winner, table = classical_assignment(ens, tol)
    return float(np.sum(table[winner, np.arange(table.shape[1])]))


def classical_error(ens, tol=1e-12):
    winner, table = classical_assignment(ens, tol)
    cols = np.arange(table.shape[1])
    return float(np.sum(table.sum(axis=0) - table[winner, cols]))


def _gram_images(vectors, n):
    psi = np.array([np.asarray(v, dtype=complex).reshape(-1) for v in vectors])
    norms = np.linalg.norm(psi, axis=1)
    if np.any(np.abs(norms - 1.0) > UNIT_NORM_TOL):
        raise PreconditionError("Gram fast path needs unit vectors")
    g = (psi.conj() @ psi.T) ** n
    g = 0.5 * (g + g.conj().T)
    w, v = np.linalg.eigh(g)
    if np.prod(np.maximum(w, 0.0)) >= GRAM_DET_CUT:
        root = (v * np.sqrt(w)) @ v.conj().T
        return g, root
    keep = w > GRAM_DET_CUT * max(w[-1], 0.0)
    # rank-revealing reduction: coordinates of the vectors in an orthonormal
    # basis of their span
    return g, np.sqrt(w[keep])[:, None] * v[:, keep].conj().T


def pure_gram_result(vectors, weights, n, tol=None):
    """Optimal discrimination of ``p_i psi_i^{(x)n}`` inside their r-dimensional span."""
    g, images = _gram_images(vectors, n)
    ops = tuple(p * np.outer(images[:, i], images[:, i].conj()) for i, p in enumerate(weights))
    return optimal_povm(Ensemble(ops), tol=tol)


def pure_gram_error(vectors, weights, n, tol=None):
    """``P_e*`` of pure tensor-power hypotheses from the Gram matrix ``<psi_i|psi_j>^n``.

    Two hypotheses use the closed form in the squared overlap, which stays
    accurate when the error is far below machine epsilon.
    """
    if len(vectors) != len(weights):
        raise PreconditionError("vectors and weights differ in length")
    if len(vectors) == 1:
        return 0.0
    if len(vectors) == 2:
        g, _ = _gram_images(vectors, 1)
        c2 = float(abs(g[0, 1]) ** 2) ** n
        return pure_binary_error(float(weights[0]), float(weights[1]), c2)
    return pure_gram_result(vectors, weights, n, tol).p_error.primal


def glb_error_forms(ens):
    """``(Tr GLB(A_0 - A_1, ...), Tr GLB(A_1, ...))``; the first equals ``P_e*``."""
    a0 = ens.total
    bars = [a0 - a for a in ens.hypotheses]
    if ens.r == 1:
        return 0.0, matops.real_trace(ens.hypotheses[0])
    return glb_sdp(bars).trace_value, glb_sdp(list(ens.hypotheses)).trace_value
