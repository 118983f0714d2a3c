"""Distinguishability functionals between PSD operators.

All logarithms are natural, so divergences are in nats. ``Q_s`` follows the
support convention: ``A^0`` is the support projection of ``A``, hence
``q_s(A, B, 0) = Tr A^0 B``.
"""

import logging
from dataclasses import dataclass

import numpy as np

from . import matops
from .errors import PreconditionError
from .lattice import glb2_trace, lub2_trace

log = logging.getLogger(__name__)

GOLDEN_WIDTH = 1e-10
GRID_POINTS = 1000
GRID_SLACK = 1e-9
FIDELITY_AGREEMENT = 1e-8

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ChernoffResult:
    """Minimum of ``s -> Q_s`` on ``[0, 1]``.

    ``grid_fallback`` is set when the verification grid beat golden-section
    search, in which case the grid minimum is reported.
    """

    q_min: float
    s_star: float
    divergence: float
    grid_fallback: bool = False


class _QsCurve:
    """Vectorized ``s -> Tr A^s B^{1-s}`` from one pair of eigen-decompositions."""

    def __init__(self, a, b):
        wa, va = matops.psd_spectrum(a, "A")
        wb, vb = matops.psd_spectrum(b, "B")
        keep_a = wa > 0
        keep_b = wb > 0
        self.la = np.log(wa[keep_a])
        self.lb = np.log(wb[keep_b])
        ov = va[:, keep_a].conj().T @ vb[:, keep_b]
        self.w = np.abs(ov) ** 2
        self.empty = self.la.size == 0 or self.lb.size == 0

    def __call__(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if self.empty:
            return np.zeros_like(s)
        pa = np.exp(np.outer(s, self.la))
        pb = np.exp(np.outer(1.0 - s, self.lb))
        return np.einsum("si,ij,sj->s", pa, self.w, pb)


def q_s(a, b, s):
    """``Q_s(A||B) = Tr A^s B^{1-s}`` for ``s`` in ``[0, 1]``."""
    if not 0.0 <= s <= 1.0:
        raise PreconditionError("s must lie in [0, 1]")
    return float(_QsCurve(a, b)(s)[0])


def _golden_min(f, lo=0.0, hi=1.0, width=GOLDEN_WIDTH):
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > width:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INVPHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INVPHI * (hi - lo)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def chernoff(a, b):
    """``Q_min``, its minimizer and the Chernoff divergence ``-log Q_min``.

    Golden-section search exploits log-convexity of ``Q_s``; a uniform grid
    then double-checks the answer and wins if golden-section was fooled.
    """
    curve = _QsCurve(a, b)
    if curve.empty:
        return ChernoffResult(0.0, 0.0, float("inf"))
    s_gs, q_gs = _golden_min(lambda s: float(curve(s)[0]))
    ends = curve(np.array([0.0, 1.0]))
    if ends[0] < q_gs:
        s_gs, q_gs = 0.0, float(ends[0])
    if ends[1] < q_gs:
        s_gs, q_gs = 1.0, float(ends[1])
    grid = np.linspace(0.0, 1.0, GRID_POINTS)
    vals = curve(grid)
    k = int(np.argmin(vals))
    fallback = bool(vals[k] < q_gs - GRID_SLACK)
    if fallback:
        log.warning("Chernoff grid beat golden-section search (%.3g < %.3g)", vals[k], q_gs)
        s_gs, q_gs = float(grid[k]), float(vals[k])
    q_gs = max(q_gs, 0.0)
    div = float("inf") if q_gs == 0.0 else -float(np.log(q_gs))
    return ChernoffResult(q_gs, float(s_gs), div, fallback)


def fidelity_pair(a, b):
    """Fidelity by ``||A^{1/2} B^{1/2}||_1`` and by ``Tr (A^{1/2} B A^{1/2})^{1/2}``."""
    ra = matops.sqrtm_psd(a)
    rb = matops.sqrtm_psd(b)
    via_svd = float(np.sum(np.linalg.svd(ra @ rb, compute_uv=False)))
    inner = np.linalg.eigvalsh(ra @ b @ ra)
    via_sqrt = float(np.sum(np.sqrt(np.maximum(inner, 0.0))))
    return via_svd, via_sqrt


def fidelity(a, b):
    """``F(A, B) = ||A^{1/2} B^{1/2}||_1`` for PSD ``A``, ``B``."""
    via_svd, via_sqrt = fidelity_pair(a, b)
    gap = abs(via_svd - via_sqrt)
    if gap > FIDELITY_AGREEMENT * max(1.0, via_svd):
        log.debug("fidelity formulas disagree by %.3g", gap)
    return via_svd


def d_max(a, b):
    """``log lambda_max(B^{-1/2} A B^{-1/2})``; ``+inf`` unless supp A is inside supp B."""
    wa = matops.psd_spectrum(a, "A")
    wb, vb = matops.psd_spectrum(b, "B")
    if not np.any(wa.eigenvalues > 0):
        return float("-inf")
    on = wb > 0
    if not np.any(on):
        return float("inf")
    perp = vb[:, ~on]
    leak = float(np.trace(perp.conj().T @ a @ perp).real) if perp.size else 0.0
    if leak > matops.psd_tolerance(float(np.sum(wa.eigenvalues))):
        return float("inf")
    vs = vb[:, on] / np.sqrt(wb[on])
    top = float(np.linalg.eigvalsh(vs.conj().T @ a @ vs)[-1])
    return float(np.log(top))


@dataclass(frozen=True)
class FvdgChain:
    """Terms ``P_e*, F, sqrt(TrLUB TrGLB), sqrt(Tr(A+B) TrGLB), sqrt(Tr(A+B)) sqrt(P_e*)``.

    ``slacks[i] = terms[i+1] - terms[i]``; all should be non-negative.
    """

    terms: tuple
    slacks: tuple


def fvdg_chain(a, b):
    """Evaluate the Fuchs-van de Graaf chain for the binary problem ``(A, B)``."""
    pe = max(glb2_trace(a, b), 0.0)
    f = fidelity(a, b)
    lub_t = lub2_trace(a, b)
    total = matops.real_trace(a + b)
    terms = (
        pe,
        f,
        float(np.sqrt(lub_t * pe)),
        float(np.sqrt(total * pe)),
        float(np.sqrt(total) * np.sqrt(pe)),
    )
    slacks = tuple(terms[i + 1] - terms[i] for i in range(4))
    return FvdgChain(terms, slacks)


def rank_one_f2_bound(a, b):
    """``(P_e*(A, B), F(A, B)^2 / Tr A)`` for rank-one ``A``."""
    if not matops.is_rank_one(a):
        raise PreconditionError("first argument must be rank one")
    lhs = glb2_trace(a, b)
    rhs = fidelity(a, b) ** 2 / matops.real_trace(a)
    return lhs, rhs
