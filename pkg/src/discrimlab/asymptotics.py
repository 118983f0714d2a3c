"""Error exponents of tensor-power discrimination problems.

For ``n`` copies the hypotheses are ``p_i sigma_i^{(x)n}``. Three exact
reductions keep the computation small:

* dense: form the Kronecker powers (bounded by the tensor cap);
* Gram: pure states only, the problem lives in the span of the ``r`` vectors
  and is fixed by the overlaps ``<psi_i|psi_j>^n``;
* Schur-Weyl: qubits only, ``sigma^{(x)n}`` splits into blocks
  ``det(sigma)^k Sym^{n-2k}(sigma)`` repeated ``C(n,k) - C(n,k-1)`` times, and
  every quantity used here (optimal, pairwise and one-versus-rest errors)
  is additive over those blocks.

Slopes are least-squares fits of ``log P_e*(n)`` against ``n``; logarithms are
natural throughout.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import matops
from .discrimination import _gram_images, optimal_povm
from .divergences import chernoff
from .ensemble import Ensemble
from .errors import PreconditionError, ResourceError
from .lattice import glb2_trace

GRAM_N_MAX = 1000
RESOLUTION_FACTOR = 10.0
CLOSED_FORM_EPS = 1e-15
METHODS = ("auto", "dense", "gram", "schur")


@dataclass(frozen=True)
class SeriesPoint:
    """``P_e*`` at ``n`` copies with its certificate gap.

    ``log_p_error`` stays finite where ``p_error`` underflows. ``pairwise``
    and ``dichotomic`` are the finite-n comparison quantities; ``resolved``
    is false when the value is within ``10 * gap`` of zero.
    """

    n: int
    p_error: float
    gap: float
    log_p_error: float
    pairwise: float = float("nan")
    dichotomic: float = float("nan")
    resolved: bool = True

    @property
    def chain_ok(self):
        if not (math.isfinite(self.pairwise) and math.isfinite(self.dichotomic)):
            return True
        tol = 1e-8 * max(1.0, self.dichotomic) + 2.0 * self.gap
        return (self.pairwise <= 0.5 * self.dichotomic + tol
                and 0.5 * self.dichotomic <= self.p_error + tol
                and self.p_error <= self.dichotomic + tol)


@dataclass(frozen=True)
class ExponentEstimate:
    series: list
    slope: float
    lower_envelope: float
    half_envelope: float
    slack: float
    window: tuple
    verdict: str
    inside: bool
    method: str
    argmin_pair: tuple = None
    notes: dict = field(default_factory=dict)

    def to_dict(self):
        def num(x):
            if x is None:
                return None
            x = float(x)
            if math.isnan(x):
                return None
            if math.isinf(x):
                return "inf" if x > 0 else "-inf"
            return x
        return {
            "slope": num(self.slope),
            "lower_envelope": num(self.lower_envelope),
            "half_envelope": num(self.half_envelope),
            "slack": num(self.slack),
            "window": list(self.window),
            "verdict": self.verdict,
            "inside": self.inside,
            "method": self.method,
            "argmin_pair": list(self.argmin_pair) if self.argmin_pair else None,
            "points": len(self.series),
            "notes": {k: num(v) if isinstance(v, float) else v for k, v in self.notes.items()},
        }


def multi_chernoff(states):
    """Minimum pairwise Chernoff divergence and the first (lexicographic) minimizing pair."""
    if len(states) < 2:
        raise PreconditionError("multi-Chernoff bound needs at least two states")
    best, pair = float("inf"), None
    for i, j in combinations(range(len(states)), 2):
        c = chernoff(states[i], states[j]).divergence
        if pair is None or c < best:
            best, pair = c, (i, j)
    return best, pair


# -- symmetric powers of qubit operators -------------------------------------

def _log_binom(m, k):
    return math.lgamma(m + 1) - math.lgamma(k + 1) - math.lgamma(m - k + 1)


def _poly_power(a, b, e):
    """Coefficients of ``(a + b t)^e`` in ascending powers of ``t``."""
    k = np.arange(e + 1)
    logc = np.array([_log_binom(e, j) for j in k])
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.exp(logc) * np.power(complex(a), e - k) * np.power(complex(b), k)


def sym_rep(g, m):
    """Matrix of ``g`` acting on ``Sym^m(C^2)`` in the orthonormal Dicke basis.

    Dicke vector ``i`` is the normalized symmetrization of ``e0^{m-i} e1^i``;
    the map is multiplicative, ``sym_rep(g h) = sym_rep(g) sym_rep(h)``.
    """
    g = np.asarray(g, dtype=complex)
    if g.shape != (2, 2):
        raise PreconditionError("symmetric powers are implemented for qubits only")
    if m == 0:
        return np.ones((1, 1), dtype=complex)
    out = np.zeros((m + 1, m + 1), dtype=complex)
    logc = np.array([_log_binom(m, j) for j in range(m + 1)])
    for i in range(m + 1):
        col = np.convolve(_poly_power(g[0, 0], g[1, 0], m - i), _poly_power(g[0, 1], g[1, 1], i))
        out[:, i] = col * np.exp(0.5 * (logc[i] - logc))
    return out


def sym_power_psd(sigma, m):
    """``Sym^m(sigma)`` for a PSD qubit operator, built spectrally so it stays PSD."""
    w, v = matops.psd_spectrum(matops.hermitian(sigma))
    u = sym_rep(v, m)
    i = np.arange(m + 1)
    diag = np.power(w[0], m - i) * np.power(w[1], i)
    return matops.sym((u * diag) @ u.conj().T)


def schur_weyl_blocks(ops, n):
    """Blocks ``(multiplicity, [c_i det(s_i)^k Sym^{n-2k}(s_i)])`` of ``c_i s_i^{(x)n}``.

    ``ops`` are qubit PSD operators ``c_i s_i`` with unit-trace ``s_i``; the
    weight ``c_i`` is not powered.
    """
    weights = [matops.real_trace(a) for a in ops]
    states = [a / w if w > 0 else np.zeros_like(a) for a, w in zip(ops, weights)]
    dets = [max(float(np.linalg.det(s).real), 0.0) for s in states]
    blocks = []
    for k in range(n // 2 + 1):
        mult = math.comb(n, k) - (math.comb(n, k - 1) if k > 0 else 0)
        m = n - 2 * k
        block = [w * d ** k * sym_power_psd(s, m) if w > 0 else np.zeros((m + 1, m + 1), complex)
                 for w, s, d in zip(weights, states, dets)]
        if all(not np.any(b) for b in block):
            continue
        blocks.append((mult, block))
    return blocks


# -- per-n evaluation -----------------------------------------------------------

def _closed_gap(a, b):
    # rounding of the closed form scales with the block's own trace; Schur-Weyl
    # blocks carry tiny traces and large multiplicities, so no floor at 1
    return CLOSED_FORM_EPS * a.shape[0] * matops.real_trace(a + b)


def _block_quantities(ops, tol):
    """``(P_e*, gap, pairwise, dichotomic)`` of one block of hypotheses."""
    ops = [np.asarray(a, dtype=complex) for a in ops]
    r = len(ops)
    nonzero = [a for a in ops if np.any(a)]
    if len(nonzero) <= 1:
        pe, gap = 0.0, 0.0
    elif r == 2:
        pe, gap = max(glb2_trace(ops[0], ops[1]), 0.0), _closed_gap(ops[0], ops[1])
    else:
        res = optimal_povm(Ensemble(tuple(ops)), tol=tol)
        pe, gap = max(res.p_error.primal, 0.0), max(res.p_error.gap, 0.0)
    pair = sum(max(glb2_trace(ops[i], ops[j]), 0.0) for i, j in combinations(range(r), 2))
    total = sum(ops)
    dich = sum(max(glb2_trace(a, total - a), 0.0) for a in ops)
    return pe, gap, pair / (r - 1), dich


def _point(n, blocks, tol):
    pe = gap = pair = dich = 0.0
    for mult, ops in blocks:
        b_pe, b_gap, b_pair, b_dich = _block_quantities(ops, tol)
        pe += mult * b_pe
        gap += mult * b_gap
        pair += mult * b_pair
        dich += mult * b_dich
    log_pe = math.log(pe) if pe > 0 else float("-inf")
    return SeriesPoint(n, pe, gap, log_pe, pair, dich, pe > RESOLUTION_FACTOR * gap)


def _pure_pair_point(n, vectors, weights):
    """Two pure hypotheses in log domain: exact even when ``P_e*`` underflows."""
    p1, p2 = float(weights[0]), float(weights[1])
    v1 = np.asarray(vectors[0], dtype=complex).reshape(-1)
    v2 = np.asarray(vectors[1], dtype=complex).reshape(-1)
    c2 = abs(np.vdot(v1, v2)) ** 2
    if c2 == 0.0 or p1 == 0.0 or p2 == 0.0:
        return SeriesPoint(n, 0.0, 0.0, float("-inf"), 0.0, 0.0, True)
    log_c = n * math.log(c2)
    s = p1 + p2
    tn = math.sqrt(max(s * s - 4.0 * p1 * p2 * math.exp(log_c), 0.0))
    log_pe = math.log(2.0 * p1 * p2) + log_c - math.log(s + tn)
    pe = math.exp(log_pe)
    return SeriesPoint(n, pe, 0.0, log_pe, pe, 2.0 * pe, True)


def _gram_blocks(vectors, weights, n):
    _, images = _gram_images(vectors, n)
    return [(1, [p * np.outer(images[:, i], images[:, i].conj()) for i, p in enumerate(weights)])]


def _pure_vectors(states):
    vecs = []
    for s in states:
        w, v = np.linalg.eigh(matops.hermitian(s))
        vecs.append(v[:, -1])
    return vecs


def _resolve_method(method, states, dim):
    if method not in METHODS:
        raise PreconditionError(f"unknown method {method!r}; expected one of {METHODS}")
    if method != "auto":
        return method
    if all(matops.is_rank_one(s) for s in states):
        return "gram"
    if dim == 2:
        return "schur"
    return "dense"


def _map(fn, items, jobs):
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _fit_slope(points, n_max):
    """Least-squares slope over the last ``max(3, ceil(n_max/2))`` resolved points."""
    width = max(3, math.ceil(n_max / 2))
    lo = n_max - width + 1
    use = [pt for pt in points if pt.n >= lo and pt.resolved and math.isfinite(pt.log_p_error)]
    if len(use) < 2:
        return float("nan"), tuple(pt.n for pt in use), width
    ns = np.array([pt.n for pt in use], dtype=float)
    ys = np.array([pt.log_p_error for pt in use])
    slope = float(np.polyfit(ns, ys, 1)[0])
    return slope, tuple(int(x) for x in ns), width


def _truncate(points):
    out = []
    for pt in points:
        out.append(pt)
        if pt.p_error <= 0.0 and not math.isfinite(pt.log_p_error):
            break
    return out


def _verdict(points, slope, lower, upper, slack):
    if points and points[-1].log_p_error == float("-inf"):
        return "-infinity consistent with C = +infinity", bool(lower == float("-inf"))
    if not math.isfinite(slope):
        return "insufficient resolved points", False
    inside = (lower - slack) <= slope <= (upper + slack)
    return ("inside" if inside else "outside"), bool(inside)


def exponent_series(states, weights, n_max, method="auto", tol=None, cap=matops.TENSOR_CAP,
                    jobs=1):
    """``P_e*`` of ``p_i sigma_i^{(x)n}`` for ``n = 1..n_max`` and its fitted slope.

    The verdict checks ``slope`` against ``[-C - slack, -C/2 + slack]`` where
    ``C`` is the multi-Chernoff bound and
    ``slack = (log r + max_i |log p_i|) / window``.
    """
    states = [matops.check_psd(matops.hermitian(s), f"state {i + 1}")
              for i, s in enumerate(states)]
    weights = np.asarray(weights, dtype=float)
    r = len(states)
    if r < 2 or len(weights) != r:
        raise PreconditionError("need r >= 2 states with matching weights")
    if np.any(weights <= 0):
        raise PreconditionError("weights must be positive")
    if n_max < 1:
        raise PreconditionError("n_max must be at least 1")
    dim = states[0].shape[0]
    method = _resolve_method(method, states, dim)

    if method == "gram":
        if not all(matops.is_rank_one(s) for s in states):
            raise PreconditionError("Gram path needs pure states")
        if n_max > GRAM_N_MAX:
            raise ResourceError(f"Gram path supports n_max <= {GRAM_N_MAX}")
        vecs = _pure_vectors(states)
        if r == 2:
            fn = lambda n: _pure_pair_point(n, vecs, weights)
        else:
            fn = lambda n: _point(n, _gram_blocks(vecs, weights, n), tol)
    elif method == "schur":
        if dim != 2:
            raise PreconditionError("Schur-Weyl path is for qubits")
        ops = [p * s for p, s in zip(weights, states)]
        fn = lambda n: _point(n, schur_weyl_blocks(ops, n), tol)
    else:
        if dim ** n_max > cap:
            raise ResourceError(f"dimension {dim}^{n_max} exceeds tensor cap {cap}")
        fn = lambda n: _point(n, [(1, [p * matops.tensor_power(s, n, cap)
                                       for p, s in zip(weights, states)])], tol)

    points = _truncate(_map(fn, range(1, n_max + 1), jobs))
    c, pair = multi_chernoff(states)
    lower = -c
    half = 0.5 * lower
    slope, window, width = _fit_slope(points, n_max)
    slack = (math.log(r) + float(np.max(np.abs(np.log(weights))))) / width
    verdict, inside = _verdict(points, slope, lower, half, slack)
    notes = {"chain_ok": all(pt.chain_ok for pt in points),
             "unresolved": sum(1 for pt in points if not pt.resolved)}
    if all(matops.is_rank_one(s) for s in states[2:]) and math.isfinite(slope):
        notes["rank_one_bound_ok"] = bool(slope <= lower + slack)
    return ExponentEstimate(points, slope, lower, half, slack, window, verdict, inside, method,
                            pair, notes)


def averaged_iid_series(rho, sigmas, p, q, n_max, method="auto", cap=matops.TENSOR_CAP,
                        jobs=1):
    """Binary ``p rho^{(x)n}`` against ``(1-p) sum_i q_i sigma_i^{(x)n}``.

    The envelope is ``[-min_i C(rho, sigma_i), -(1/2) min_i C(rho, sigma_i)]``;
    for pure ``rho`` the slope is expected at the lower end (``tight`` in the
    notes).
    """
    rho = matops.check_psd(matops.hermitian(rho), "rho")
    sigmas = [matops.check_psd(matops.hermitian(s), f"sigma {i + 1}")
              for i, s in enumerate(sigmas)]
    q = np.asarray(q, dtype=float)
    if not 0.0 < p < 1.0:
        raise PreconditionError("p must lie in (0, 1)")
    if len(q) != len(sigmas) or np.any(q < 0) or abs(q.sum() - 1.0) > 1e-9:
        raise PreconditionError("q must be a probability vector matching sigmas")
    if n_max < 1:
        raise PreconditionError("n_max must be at least 1")
    dim = rho.shape[0]
    if method not in METHODS or method == "gram":
        raise PreconditionError("averaged series supports methods auto, dense, schur")
    if method == "auto":
        method = "schur" if dim == 2 else "dense"
    if method == "schur" and dim != 2:
        raise PreconditionError("Schur-Weyl path is for qubits")
    if method == "dense" and dim ** n_max > cap:
        raise ResourceError(f"dimension {dim}^{n_max} exceeds tensor cap {cap}")

    ops = [p * rho] + [(1.0 - p) * qi * s for qi, s in zip(q, sigmas)]

    def fn(n):
        if method == "schur":
            blocks = schur_weyl_blocks(ops, n)
        else:
            blocks = [(1, [o_w * matops.tensor_power(o / o_w, n, cap) if o_w > 0 else
                           np.zeros((dim ** n, dim ** n), complex)
                           for o, o_w in ((o, matops.real_trace(o)) for o in ops)])]
        pe = gap = 0.0
        for mult, block in blocks:
            a, b = block[0], sum(block[1:])
            pe += mult * max(glb2_trace(a, b), 0.0)
            gap += mult * _closed_gap(a, b)
        log_pe = math.log(pe) if pe > 0 else float("-inf")
        return SeriesPoint(n, pe, gap, log_pe, resolved=pe > RESOLUTION_FACTOR * gap)

    points = _truncate(_map(fn, range(1, n_max + 1), jobs))
    divs = [chernoff(rho, s).divergence for s in sigmas]
    c = min(divs)
    lower, half = -c, -0.5 * c
    slope, window, width = _fit_slope(points, n_max)
    r_eff = len(sigmas) + 1
    logs = np.log(np.array([p] + [(1.0 - p) * qi for qi in q if qi > 0]))
    slack = (math.log(r_eff) + float(np.max(np.abs(logs)))) / width
    verdict, inside = _verdict(points, slope, lower, half, slack)
    notes = {"divergences": [float(x) for x in divs]}
    if matops.is_rank_one(rho) and math.isfinite(slope):
        notes["tight"] = bool(abs(slope - lower) <= slack)
    return ExponentEstimate(points, slope, lower, half, slack, window, verdict, inside, method,
                            (0, int(np.argmin(divs)) + 1), notes)


@dataclass(frozen=True)
class RateVerdict:
    """Per-n rates: ``max_rate <= sum_rate <= log(r)/n + max_rate``."""

    n: np.ndarray
    sum_rate: np.ndarray
    max_rate: np.ndarray
    ok: bool


def rate_lemma_check(sequences):
    """Finite-n form of the maximum-rate lemma for positive sequences ``a_{i,n}``, n = 1, 2, ..."""
    arr = np.atleast_2d(np.asarray(sequences, dtype=float))
    if arr.size == 0 or np.any(arr <= 0):
        raise PreconditionError("sequences must be positive")
    r, length = arr.shape
    n = np.arange(1, length + 1, dtype=float)
    logs = np.log(arr)
    top = logs.max(axis=0)
    # log-sum-exp keeps the sum rate finite for tiny terms
    sum_rate = (top + np.log(np.exp(logs - top).sum(axis=0))) / n
    max_rate = top / n
    tol = 1e-12 * np.maximum(1.0, np.abs(max_rate))
    ok = bool(np.all(max_rate <= sum_rate + tol) and np.all(sum_rate <= np.log(r) / n + max_rate + tol))
    return RateVerdict(n.astype(int), sum_rate, max_rate, ok)
