"""Suboptimal measurement families and Tyson's functional.

The alpha-weighted POVM is ``E_k = S^{-1/2} A_k^alpha S^{-1/2}`` with
``S = sum_k A_k^alpha`` and support-restricted inverse square root; alpha=1
is the pretty good measurement (PGM) and alpha=2 the square measurement (SQ).
"""

import numpy as np

from . import matops
from .ensemble import MeasurementOps, Povm
from .errors import DegenerateInputError, PreconditionError

ALPHA_MAX = 4.0
SVD_CUT = 1e-12


def _weighted_sum(ens, alpha):
    powered = [a if alpha == 1 else matops.psd_power(a, alpha) for a in ens.hypotheses]
    s = sum(powered)
    if not np.any(np.abs(s) > 0):
        raise DegenerateInputError("sum of weighted hypotheses is zero")
    return powered, s


def alpha_povm(ens, alpha):
    if not 0.0 < alpha <= ALPHA_MAX:
        raise PreconditionError(f"alpha must lie in (0, {ALPHA_MAX}]")
    powered, s = _weighted_sum(ens, alpha)
    s_isqrt = matops.psd_power(s, -0.5)
    return Povm(tuple(matops.sym(s_isqrt @ p @ s_isqrt) for p in powered))


def pretty_good(ens):
    return alpha_povm(ens, 1.0)


def square_povm(ens):
    return alpha_povm(ens, 2.0)


def _stacked_svd(ens):
    """Thin SVD of ``M = [A_1 ... A_r]`` restricted to its numerical support.

    ``M M^dagger = sum_k A_k^2 = S``, so the singular values are the square
    roots of the eigenvalues of ``S`` computed without squaring.
    """
    m = np.hstack(ens.hypotheses)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    keep = s > SVD_CUT * (s[0] if s.size else 0.0)
    return u[:, keep], s[keep], vh[keep, :]


def sq_operators(ens):
    """Square-measurement operators ``X_k = A_k S^{-1/2}``, ``S = sum_k A_k^2``.

    With ``M = U D V^dagger`` the block form gives ``A_k U = V_k D`` and hence
    ``X_k = V_k U^dagger`` on the support of ``S``: no inverse square root of
    an ill-conditioned ``S`` is ever formed. The ``X_k`` are generally not
    Hermitian; ``X_k^dagger X_k`` is the SQ effect.
    """
    u, s, vh = _stacked_svd(ens)
    if s.size == 0:
        raise DegenerateInputError("all hypotheses are zero")
    d = ens.dim
    return MeasurementOps(tuple(vh[:, k * d:(k + 1) * d].conj().T @ u.conj().T
                                for k in range(ens.r)))


def povm_success(ens, m):
    if len(m) != ens.r:
        raise PreconditionError(f"POVM has {len(m)} outcomes, ensemble has {ens.r}")
    return float(sum(np.vdot(a, e).real for a, e in zip(ens.hypotheses, m.effects)))


def povm_error(ens, m):
    """``sum_i Tr A_i (I - E_i)``."""
    return ens.total_trace - povm_success(ens, m)


def gamma(ens, m):
    """Tyson's functional ``Tr A_0 - sum_k ||X_k A_k||_1``."""
    if len(m.operators) != ens.r:
        raise PreconditionError("measurement operators and ensemble differ in length")
    total = 0.0
    for x, a in zip(m.operators, ens.hypotheses):
        total += float(np.sum(np.linalg.svd(x @ a, compute_uv=False)))
    return ens.total_trace - total


def gamma_star(ens):
    """Closed-form minimum ``Tr A_0 - Tr (sum_k A_k^2)^{1/2}``.

    The trace of the square root is the nuclear norm of ``[A_1 ... A_r]``,
    which avoids square roots of rounding noise in the null space of ``S``.
    """
    s = np.linalg.svd(np.hstack(ens.hypotheses), compute_uv=False)
    return ens.total_trace - float(np.sum(s))


def tyson_chain(x, sigma):
    """Terms ``1-||X s||_1, 1-Tr X^*X s, 1-||X s||_1^2, 2(1-||X s||_1)`` for a contraction X."""
    n1 = float(np.sum(np.linalg.svd(x @ sigma, compute_uv=False)))
    quad = float(np.trace(x.conj().T @ x @ sigma).real)
    return (1.0 - n1, 1.0 - quad, 1.0 - n1 * n1, 2.0 * (1.0 - n1))
