"""Evaluators for the single-shot decoupling bounds.

Every inequality is returned as a ``BoundEntry`` holding both sides, the
direction and a signed slack (positive means satisfied), so inequality chains
become assertable data. Entries are flagged ``theorem`` (a violation is a bug
or a numerical failure) or ``conjecture`` (a violation is a finding).

Notation used in entry names: ``P_e*`` is the optimal error, ``P_e2`` the
pairwise error ``(1/(r-1)) sum_{i<j} P_e*(A_i, A_j)``, ``P_dich`` the
dichotomic error and ``Gamma*`` Tyson's closed-form functional.
"""

import math
from dataclasses import asdict, dataclass, field
from itertools import combinations

import numpy as np

from . import matops
from .discrimination import dichotomic_error, optimal_error, optimal_error_ops
from .divergences import chernoff, fidelity
from .errors import PreconditionError
from .lattice import glb2_trace, lub2_trace
from .povm import gamma, gamma_star, povm_error, pretty_good, sq_operators

SLACK_TOL = 1e-8
UNIFORM_TOL = 1e-9
IDEMPOTENT_TOL = 1e-9
NB_TOL = 1e-9
COMPOSITE_ITERATIONS = 400

SUITES = ("all", "pure", "dich", "nussbaum")


@dataclass(frozen=True)
class BoundEntry:
    """One inequality ``lhs <direction> rhs``.

    ``slack`` is ``rhs - lhs`` for ``<=``, ``lhs - rhs`` for ``>=`` and
    ``-|lhs - rhs|`` for ``==``. Inapplicable entries carry NaN sides.
    """

    name: str
    lhs: float
    rhs: float
    direction: str
    tag: str
    kind: str = "theorem"
    applicable: bool = True

    @property
    def slack(self):
        if not self.applicable:
            return float("nan")
        if self.direction == "<=":
            return self.rhs - self.lhs
        if self.direction == ">=":
            return self.lhs - self.rhs
        return -abs(self.lhs - self.rhs)

    @property
    def threshold(self):
        return -SLACK_TOL * max(1.0, abs(self.rhs))

    @property
    def holds(self):
        return (not self.applicable) or self.slack >= self.threshold

    def to_dict(self):
        d = asdict(self)
        d["slack"] = self.slack
        for key in ("lhs", "rhs", "slack"):
            if not math.isfinite(d[key]):
                d[key] = None if math.isnan(d[key]) else ("inf" if d[key] > 0 else "-inf")
        return d


@dataclass
class BoundReport:
    entries: list = field(default_factory=list)

    def add(self, name, lhs, rhs, direction, tag, kind="theorem", applicable=True):
        if not applicable:
            lhs = rhs = float("nan")
        self.entries.append(BoundEntry(name, float(lhs), float(rhs), direction, tag, kind,
                                       bool(applicable)))

    def extend(self, other):
        self.entries.extend(other.entries)
        return self

    def theorem_violations(self):
        return [e for e in self.entries if e.kind == "theorem" and not e.holds]

    def conjecture_findings(self):
        return [e for e in self.entries if e.kind == "conjecture" and not e.holds]

    @property
    def ok(self):
        return not self.theorem_violations()

    def get(self, name):
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def names(self):
        return [e.name for e in self.entries]

    def to_dict(self):
        return {"entries": [e.to_dict() for e in self.entries],
                "theorem_violations": len(self.theorem_violations()),
                "conjecture_findings": len(self.conjecture_findings())}


def _ordered_pairs(r):
    return [(i, j) for i in range(r) for j in range(r) if i != j]


class _Quantities:
    """Lazily computed, shared quantities of one ensemble."""

    def __init__(self, ens):
        self.ens = ens
        self.ops = ens.hypotheses
        self.r = ens.r
        self.p = ens.weights
        self.total = ens.total_trace
        self._cache = {}

    def _memo(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    @property
    def pe(self):
        return self._memo("pe", lambda: optimal_error(self.ens))

    @property
    def ps(self):
        return self.total - self.pe

    @property
    def pair_pe(self):
        def build():
            m = np.zeros((self.r, self.r))
            for i, j in combinations(range(self.r), 2):
                m[i, j] = m[j, i] = max(glb2_trace(self.ops[i], self.ops[j]), 0.0)
            return m
        return self._memo("pair_pe", build)

    @property
    def pe2(self):
        return float(np.sum(np.triu(self.pair_pe, 1))) / (self.r - 1)

    @property
    def ps2(self):
        return self._memo("ps2", lambda: sum(
            lub2_trace(self.ops[i], self.ops[j]) for i, j in combinations(range(self.r), 2)
        ) / (self.r - 1))

    @property
    def fid(self):
        def build():
            m = np.zeros((self.r, self.r))
            for i, j in combinations(range(self.r), 2):
                m[i, j] = m[j, i] = fidelity(self.ops[i], self.ops[j])
            return m
        return self._memo("fid", build)

    @property
    def roots(self):
        return self._memo("roots", lambda: [matops.sqrtm_psd(a) for a in self.ops])

    @property
    def root_overlap(self):
        """``Tr A_i^{1/2} A_j^{1/2}``."""
        def build():
            m = np.zeros((self.r, self.r))
            for i, j in combinations(range(self.r), 2):
                m[i, j] = m[j, i] = np.vdot(self.roots[i], self.roots[j]).real
            return m
        return self._memo("root_overlap", build)

    @property
    def state_qmin(self):
        """``Q_min(sigma_i, sigma_j)`` of the normalized states."""
        def build():
            st = self.ens.states()
            m = np.zeros((self.r, self.r))
            for i, j in combinations(range(self.r), 2):
                m[i, j] = m[j, i] = chernoff(st[i], st[j]).q_min
            return m
        return self._memo("state_qmin", build)

    @property
    def op_qmin(self):
        """``exp(-C(A_i, A_j))`` of the unnormalized hypotheses."""
        def build():
            m = np.zeros((self.r, self.r))
            for i, j in combinations(range(self.r), 2):
                m[i, j] = m[j, i] = chernoff(self.ops[i], self.ops[j]).q_min
            return m
        return self._memo("op_qmin", build)

    @property
    def overlap(self):
        """``Tr A_i A_j`` (equal to ``|<x_i|x_j>|^2`` for rank-one hypotheses)."""
        def build():
            m = np.zeros((self.r, self.r))
            for i, j in combinations(range(self.r), 2):
                m[i, j] = m[j, i] = np.vdot(self.ops[i], self.ops[j]).real
            return m
        return self._memo("overlap", build)

    @property
    def pgm_error(self):
        return self._memo("pgm", lambda: povm_error(self.ens, pretty_good(self.ens)))

    @property
    def sq(self):
        def build():
            ops = sq_operators(self.ens)
            return ops, povm_error(self.ens, ops.povm())
        return self._memo("sq", build)

    @property
    def gamma_star(self):
        return self._memo("gamma_star", lambda: gamma_star(self.ens))

    @property
    def dich(self):
        return self._memo("dich", lambda: dichotomic_error(self.ens).total)

    @property
    def pure(self):
        return self._memo("pure", self.ens.is_pure)

    @property
    def weighted(self):
        return self.ens.is_weighted

    @property
    def priors(self):
        """Hypotheses are prior-weighted states: total trace at most one."""
        return self.total <= 1.0 + UNIFORM_TOL

    @property
    def pure_priors(self):
        return self.pure and self.priors


def _sum_pairs(r, fn):
    return float(sum(fn(i, j) for i, j in _ordered_pairs(r)))


def _pairwise_entries(q, rep):
    r, p = q.r, q.p
    rep.add("P_e* >= P_e2", q.pe, q.pe2, ">=", "single-shot pairwise lower bound")
    rep.add("P_s* <= P_s2", q.ps, q.ps2, "<=", "single-shot pairwise success bound")
    rep.add("P_e* <= sum sqrt(p_i+p_j) sqrt(P_e*(i,j))", q.pe,
            _sum_pairs(r, lambda i, j: math.sqrt(p[i] + p[j]) * math.sqrt(q.pair_pe[i, j])),
            "<=", "single-shot square-root decoupling")
    if q.pure_priors:
        rhs = _sum_pairs(r, lambda i, j: (p[i] + p[j]) * (p[i] ** 2 + p[j] ** 2)
                         / (p[i] ** 2 * p[j] ** 2) * q.pair_pe[i, j])
    else:
        rhs = float("nan")
    rep.add("P_e* <= sum rank-one pairwise", q.pe, rhs, "<=",
            "single-shot rank-one decoupling (prior-weighted)", applicable=q.pure_priors)


def _pgm_entries(q, rep):
    r, p = q.r, q.p
    rep.add("P_e* <= P_e^PG", q.pe, q.pgm_error, "<=", "PGM is a measurement")
    rep.add("P_e^PG <= 2 P_e*", q.pgm_error, 2.0 * q.pe, "<=", "PGM within factor two")
    ps_pg = q.total - q.pgm_error
    rep.add("P_s^PG >= (P_s*)^2", ps_pg, q.ps ** 2, ">=", "PGM success squared bound",
            applicable=q.weighted)
    rep.add("P_e^PG <= (1/2) sum F(A_i,A_j)", q.pgm_error,
            0.5 * _sum_pairs(r, lambda i, j: q.fid[i, j]), "<=", "Barnum-Knill fidelity bound")
    if q.pure_priors:
        st_f2 = lambda i, j: q.fid[i, j] ** 2 / (p[i] * p[j])
        rhs = 0.5 * _sum_pairs(r, lambda i, j: (p[i] ** 2 + p[j] ** 2) / (p[i] * p[j]) * st_f2(i, j))
        improved = _sum_pairs(r, lambda i, j: q.fid[i, j] ** 2 / math.sqrt(p[i] * p[j]))
    else:
        rhs = improved = float("nan")
    rep.add("P_e^PG <= HLS rank-one bound", q.pgm_error, rhs, "<=",
            "rank-one PGM fidelity-squared bound (prior-weighted)", applicable=q.pure_priors)
    rep.add("sum F^2/sqrt(p_i p_j) <= HLS rank-one bound", improved, rhs, "<=",
            "pure ordering of decoupling constants (prior-weighted)", applicable=q.pure_priors)


def _tyson_entries(q, rep):
    ops, sq_err = q.sq
    g_sq = gamma(q.ens, ops)
    g = q.gamma_star
    rep.add("Gamma* <= P_e*", g, q.pe, "<=", "Tyson sandwich lower")
    rep.add("P_e* <= 2 Gamma*", q.pe, 2.0 * g, "<=", "Tyson sandwich upper")
    rep.add("Gamma(SQ) == Gamma*", g_sq, g, "==", "square measurement optimal for Gamma")
    rep.add("P_e* <= P_e^SQ", q.pe, sq_err, "<=", "SQ is a measurement")
    rep.add("Gamma(SQ) <= P_e^SQ", g_sq, sq_err, "<=", "Tyson measurement-wise lower")
    rep.add("P_e^SQ <= 2 Gamma(SQ)", sq_err, 2.0 * g_sq, "<=", "Tyson measurement-wise upper")


def _half_entries(q, rep):
    r, p, t0 = q.r, q.p, q.total
    half = float(np.sum(np.triu(q.root_overlap, 1)))
    mid = t0 - t0 ** 1.5 / math.sqrt(t0 + 2.0 * half)
    rep.add("Gamma* <= Lieb intermediate", q.gamma_star, mid, "<=", "Lieb concavity bound on Gamma")
    rep.add("Lieb intermediate <= sum_{i<j} Tr A_i^1/2 A_j^1/2", mid, half, "<=",
            "linearized Lieb bound")
    s_root = 2.0 * half
    s_fid = _sum_pairs(r, lambda i, j: q.fid[i, j])
    rep.add("P_e* <= sum Tr A_i^1/2 A_j^1/2", q.pe, s_root, "<=", "square-root overlap bound")
    rep.add("sum Tr A_i^1/2 A_j^1/2 <= sum F(A_i,A_j)", s_root, s_fid, "<=",
            "overlap below fidelity")
    rep.add("sum F <= sum sqrt(p_i+p_j) sqrt(P_e*(i,j))", s_fid,
            _sum_pairs(r, lambda i, j: math.sqrt(p[i] + p[j]) * math.sqrt(q.pair_pe[i, j])),
            "<=", "fidelity to pairwise error")
    rep.add("sum F <= sum sqrt(p_i p_j) sqrt(Q_min(s_i,s_j))", s_fid,
            _sum_pairs(r, lambda i, j: math.sqrt(p[i] * p[j] * q.state_qmin[i, j])),
            "<=", "fidelity to Chernoff overlap")
    if q.pure:
        qmin_form = _sum_pairs(r, lambda i, j: math.sqrt(p[i] * p[j]) * q.state_qmin[i, j])
        f2_form = _sum_pairs(r, lambda i, j: q.fid[i, j] ** 2 / math.sqrt(p[i] * p[j]))
        err_form = _sum_pairs(r, lambda i, j: (p[i] + p[j]) / math.sqrt(p[i] * p[j])
                              * q.pair_pe[i, j])
    else:
        qmin_form = f2_form = err_form = float("nan")
    rep.add("pure: sum Tr A_i^1/2 A_j^1/2 == sum sqrt(p_i p_j) Q_min", s_root, qmin_form, "==",
            "pure overlap identity", applicable=q.pure)
    rep.add("pure: sum Tr A_i^1/2 A_j^1/2 == sum F^2/sqrt(p_i p_j)", s_root, f2_form, "==",
            "pure fidelity identity", applicable=q.pure)
    rep.add("pure: sum F^2/sqrt(p_i p_j) <= sum (p_i+p_j)/sqrt(p_i p_j) P_e*(i,j)", f2_form,
            err_form, "<=", "pure fidelity to pairwise error", applicable=q.pure)

    uniform = q.pure and bool(np.all(np.abs(p - 1.0 / r) <= UNIFORM_TOL))
    if uniform:
        st = q.ens.states()
        acc = sum(2.0 - matops.trace_norm(st[j] - st[k]) for j, k in combinations(range(r), 2))
        rhs = (1.0 + 2.0 / r * acc) ** -0.5
    else:
        rhs = float("nan")
    rep.add("pure uniform: 1 - Gamma* >= trace-distance bound", 1.0 - q.gamma_star, rhs, ">=",
            "pure uniform trace-distance bound", applicable=uniform)


def _dich_entries(q, rep):
    r, p, t0 = q.r, q.p, q.total
    rep.add("P_e2 <= P_dich/2", q.pe2, 0.5 * q.dich, "<=", "dichotomic chain, pairwise link")
    rep.add("P_dich/2 <= P_e*", 0.5 * q.dich, q.pe, "<=", "dichotomic chain, lower link")
    rep.add("P_e* <= P_dich", q.pe, q.dich, "<=", "dichotomic chain, upper link")
    s_fid = _sum_pairs(r, lambda i, j: q.fid[i, j])
    rep.add("P_dich <= sum F(A_i,A_j)", q.dich, s_fid, "<=", "mixed dichotomic decoupling")
    rep.add("sum F <= sum sqrt(p_i+p_j) sqrt(P_e*(i,j)) [dich]", s_fid,
            _sum_pairs(r, lambda i, j: math.sqrt(p[i] + p[j]) * math.sqrt(q.pair_pe[i, j])),
            "<=", "mixed dichotomic decoupling, pairwise link")
    if q.pure:
        f2 = t0 * _sum_pairs(r, lambda i, j: q.fid[i, j] ** 2 / (p[i] * p[j]))
        err = t0 * _sum_pairs(r, lambda i, j: (p[i] + p[j]) / (p[i] * p[j]) * q.pair_pe[i, j])
        minform = t0 / float(np.min(p)) * _sum_pairs(r, lambda i, j: q.pair_pe[i, j])
    else:
        f2 = err = minform = float("nan")
    rep.add("pure: P_dich <= Tr A_0 sum F^2/(p_i p_j)", q.dich, f2, "<=",
            "pure dichotomic decoupling, fidelity branch", applicable=q.pure)
    rep.add("pure: Tr A_0 sum F^2/(p_i p_j) <= Tr A_0 sum (p_i+p_j)/(p_i p_j) P_e*(i,j)", f2, err,
            "<=", "pure dichotomic decoupling, pairwise link", applicable=q.pure)
    rep.add("pure: P_dich <= Tr A_0/min p sum P_e*(i,j)", q.dich, minform, "<=",
            "pure dichotomic decoupling, minimum-prior branch", applicable=q.pure)


def _decoupling_entries(q, rep):
    """Pure-state upper and lower decoupling through pairwise overlaps."""
    r, p, t0 = q.r, q.p, q.total
    if q.pure:
        mid = float(sum(q.overlap[i, j] / p[i] for i, j in _ordered_pairs(r)))
        via_chernoff = _sum_pairs(r, lambda i, j: q.op_qmin[i, j]) / float(np.min(p))
        via_err = t0 / float(np.min(p)) * _sum_pairs(r, lambda i, j: q.pair_pe[i, j])
        lower = float(sum(q.overlap[k, l] / (p[k] + p[l])
                          for k, l in combinations(range(r), 2))) / (r - 1)
    else:
        mid = via_chernoff = via_err = lower = float("nan")
    sub_unit = q.pure and bool(np.all(p <= 1.0 + UNIFORM_TOL))
    rep.add("pure: P_e^PG <= sum (1/p_i) |<x_i|x_j>|^2", q.pgm_error, mid, "<=",
            "pure upper decoupling, overlap form", applicable=q.pure)
    rep.add("pure: sum (1/p_i)|<x_i|x_j>|^2 <= (1/min p) sum exp(-C(A_i,A_j))", mid, via_chernoff,
            "<=", "pure upper decoupling, Chernoff form (priors at most one)",
            applicable=sub_unit)
    rep.add("pure: sum (1/p_i)|<x_i|x_j>|^2 <= Tr A_0/min p sum P_e*(i,j)", mid, via_err, "<=",
            "pure upper decoupling, pairwise-error form", applicable=q.pure)
    rep.add("pure: P_e2 >= (1/(r-1)) sum |<x_k|x_l>|^2/(p_k+p_l)", q.pe2, lower, ">=",
            "pure lower decoupling", applicable=q.pure)


def _claim3_sides(q, i):
    """``(Tr GLB(A_i, A_0 - A_i), sum_{l != i} P_e*(i,l), sum_{k != l, both != i} P_e*(k,l))``."""
    a = q.ops[i]
    lhs = max(glb2_trace(a, q.ens.total - a), 0.0)
    first = float(sum(q.pair_pe[i, l] for l in range(q.r) if l != i))
    cross = float(sum(q.pair_pe[k, l] for k, l in _ordered_pairs(q.r) if i not in (k, l)))
    return lhs, first, cross


def _conjecture_entries(q, rep):
    r = q.r
    c = 4.0 * (r - 1)
    rep.add("conj: P_e* <= 4(r-1) P_e2", q.pe, c * q.pe2, "<=",
            "multi-hypothesis error versus pairwise error", kind="conjecture")
    if q.weighted:
        mid = 1.0 - (1.0 + c * q.pe2) ** -0.5
    else:
        mid = float("nan")
    rep.add("conj: Gamma* <= 1 - (1 + 4(r-1) P_e2)^-1/2", q.gamma_star, mid, "<=",
            "Tyson functional versus pairwise error", kind="conjecture", applicable=q.weighted)
    rep.add("1 - (1 + 4(r-1) P_e2)^-1/2 <= 2(r-1) P_e2", mid, 0.5 * c * q.pe2, "<=",
            "elementary square-root inequality", applicable=q.weighted)
    rep.add("conj: P_dich <= 4(r-1) P_e2", q.dich, c * q.pe2, "<=",
            "dichotomic error versus pairwise error", kind="conjecture")
    worst = None
    for i in range(r):
        lhs, first, cross = _claim3_sides(q, i)
        rhs = c * first + c * cross
        if worst is None or lhs - rhs > worst[0] - worst[1]:
            worst = (lhs, rhs)
    rep.add("conj: Tr GLB(A_i, A_0-A_i) <= c1 sum P_e*(i,l) + c2 cross terms, c1=c2=4(r-1)",
            worst[0], worst[1], "<=", "one-versus-rest error with cross terms",
            kind="conjecture")


def evaluate_bound_suite(ens, suite="all", _quantities=None):
    """Evaluate the decoupling bounds on ``ens`` and return a ``BoundReport``.

    ``suite`` restricts the entries: ``pure`` keeps the rank-one families,
    ``dich`` the dichotomic ones and ``nussbaum`` the recursive decomposition.
    """
    if ens.r < 2:
        raise PreconditionError("bound suite needs r >= 2")
    if suite not in SUITES:
        raise PreconditionError(f"unknown suite {suite!r}; expected one of {SUITES}")
    q = _quantities if _quantities is not None else _Quantities(ens)
    rep = BoundReport()
    if suite == "all":
        _pairwise_entries(q, rep)
        _pgm_entries(q, rep)
        _tyson_entries(q, rep)
        _half_entries(q, rep)
        _dich_entries(q, rep)
        _decoupling_entries(q, rep)
        _conjecture_entries(q, rep)
    elif suite == "pure":
        full = BoundReport()
        _pairwise_entries(q, full)
        _pgm_entries(q, full)
        _half_entries(q, full)
        _dich_entries(q, full)
        _decoupling_entries(q, full)
        rep.entries = [e for e in full.entries if e.name.startswith("pure")
                       or "rank-one" in e.tag or "HLS" in e.name]
    elif suite == "dich":
        _dich_entries(q, rep)
        rep.extend(_dich_conjecture_only(q))
    else:
        rep.extend(nussbaum_recursion(ens, _quantities=q))
        for k in range(1, ens.r + 1):
            lhs, rhs, _ = nussbaum_split(ens, k, _pe=q.pe)
            rep.add(f"split K={k}: P_e* <= 2 P_e*(1..K) + P_e*(3A^(K), rest)", lhs, rhs, "<=",
                    "preferential split decomposition")
    return rep


def _dich_conjecture_only(q):
    rep = BoundReport()
    rep.add("conj: P_dich <= 4(r-1) P_e2", q.dich, 4.0 * (q.r - 1) * q.pe2, "<=",
            "dichotomic error versus pairwise error", kind="conjecture")
    return rep


# -- composite hypothesis ---------------------------------------------------

def _helstrom(a, b):
    """``(P_e*(A, B), projector deciding A)``."""
    w, v = np.linalg.eigh(a - b)
    pos = v[:, w > 0]
    err = 0.5 * (matops.real_trace(a + b) - float(np.sum(np.abs(w))))
    return max(err, 0.0), pos @ pos.conj().T


def _project_simplex(x):
    u = np.sort(x)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, len(x) + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    return np.maximum(x - css[rho] / (rho + 1), 0.0)


@dataclass(frozen=True)
class CompositeResult:
    """Worst-case error of simple ``A`` against composite ``{B_i}``.

    ``lower`` is ``P_e*(A, sum_i q_i B_i)`` at the best mixture ``q`` found,
    a certified lower bound by weak duality; ``upper`` is the worst-case error
    of the measurement ``effect``, an achievable value.
    """

    lower: float
    upper: float
    mixture: np.ndarray
    effect: np.ndarray
    iterations: int

    @property
    def value(self):
        return 0.5 * (self.lower + self.upper)

    @property
    def gap(self):
        return self.upper - self.lower


def composite_error(a, bs, iterations=COMPOSITE_ITERATIONS, tol=1e-12):
    """``inf_E Tr A(I-E) + max_i Tr B_i E`` over ``0 <= E <= I``.

    Solved through the concave dual ``q -> P_e*(A, sum q_i B_i)`` on the
    probability simplex by projected supergradient ascent with Polyak steps;
    every Holevo-Helstrom projector met along the way is a primal candidate,
    and their running average is kept as well.
    """
    a = np.asarray(a, dtype=complex)
    bs = [np.asarray(b, dtype=complex) for b in bs]
    m = len(bs)
    tr_a = matops.real_trace(a)
    scale = max(1.0, tr_a + sum(matops.real_trace(b) for b in bs))

    def worst_case(e):
        return (tr_a - np.vdot(a, e).real) + max(np.vdot(b, e).real for b in bs)

    def dual(qv):
        return _helstrom(a, sum(w * b for w, b in zip(qv, bs)))

    best_q, best_low, best_e = None, -np.inf, None
    for k in range(m):
        qv = np.zeros(m)
        qv[k] = 1.0
        low, e = dual(qv)
        if low > best_low:
            best_q, best_low, best_e = qv, low, e
    upper_e = best_e
    upper = worst_case(best_e)
    _, e_sum = dual(np.ones(m))
    if worst_case(e_sum) < upper:
        upper, upper_e = worst_case(e_sum), e_sum

    qv = best_q.copy()
    avg = np.zeros_like(a)
    it = 0
    for it in range(1, iterations + 1):
        if upper - best_low <= tol * scale or m == 1:
            break
        low, e = dual(qv)
        avg += (e - avg) / it
        for cand in (e, avg):
            u = worst_case(cand)
            if u < upper:
                upper, upper_e = u, cand.copy()
        if low > best_low:
            best_q, best_low = qv.copy(), low
        grad = np.array([np.vdot(b, e).real for b in bs])
        grad -= grad.mean()
        gn = float(grad @ grad)
        if gn <= 1e-30:
            break
        step = (upper - low) / gn
        qv = _project_simplex(qv + step * grad)
    return CompositeResult(float(best_low), float(upper), best_q, upper_e, it)


def averaged_bounds(a, bs, composite_iterations=COMPOSITE_ITERATIONS):
    """Bounds for ``A`` against a sum (or composite set) of alternatives ``B_j``."""
    a = matops.check_psd(matops.hermitian(a), "A")
    bs = [matops.check_psd(matops.hermitian(b), f"B_{j + 1}") for j, b in enumerate(bs)]
    if not bs:
        raise PreconditionError("averaged bounds need at least one B")
    if any(b.shape != a.shape for b in bs):
        raise PreconditionError("operators must share a common dimension")
    b_sum = sum(bs)
    tr_a = matops.real_trace(a)
    tr_b = [matops.real_trace(b) for b in bs]
    pe_sum = max(glb2_trace(a, b_sum), 0.0)
    pe_j = [max(glb2_trace(a, b), 0.0) for b in bs]
    f_j = [fidelity(a, b) for b in bs]

    rep = BoundReport()
    s_f = float(sum(f_j))
    rep.add("P_e*(A, sum B) <= sum F(A,B_j)", pe_sum, s_f, "<=", "averaged fidelity bound")
    rep.add("sum F(A,B_j) <= sum sqrt(Tr(A+B_j)) sqrt(P_e*(A,B_j))", s_f,
            float(sum(math.sqrt(tr_a + t) * math.sqrt(e) for t, e in zip(tr_b, pe_j))), "<=",
            "averaged fidelity to pairwise error")

    rank_one = matops.is_rank_one(a)
    nan = float("nan")
    if rank_one:
        sb = float(sum(tr_b))
        f2n = [0.0 if t == 0 else f * f / (tr_a * t) for f, t in zip(f_j, tr_b)]
        br1_f = sb * float(sum(f2n))
        br1_e = sb * float(sum(0.0 if t == 0 else (tr_a + t) / (tr_a * t) * e
                               for t, e in zip(tr_b, pe_j)))
        br2_a = float(sum(math.sqrt(1.0 + t / tr_a) * math.sqrt(e) for t, e in zip(tr_b, pe_j))) ** 2
        br2_b = float(sum(1.0 + t / tr_a for t in tr_b)) * float(sum(pe_j))
    else:
        br1_f = br1_e = br2_a = br2_b = nan
    rep.add("rank-one A: P_e*(A, sum B) <= sum Tr B * sum F(A~,B~_j)^2", pe_sum, br1_f, "<=",
            "rank-one averaged bound, fidelity branch", applicable=rank_one)
    rep.add("rank-one A: fidelity branch <= pairwise-error form", br1_f, br1_e, "<=",
            "rank-one averaged bound, fidelity to pairwise error", applicable=rank_one)
    rep.add("rank-one A: P_e*(A, sum B) <= (sum sqrt(1+TrB_j/TrA) sqrt(P_e*(A,B_j)))^2", pe_sum,
            br2_a, "<=", "rank-one averaged bound, square-root branch", applicable=rank_one)
    rep.add("rank-one A: square-root branch <= Cauchy-Schwarz form", br2_a, br2_b, "<=",
            "rank-one averaged bound, Cauchy-Schwarz link", applicable=rank_one)

    comp = composite_error(a, bs, iterations=composite_iterations)
    rep.add("max_j P_e*(A,B_j) <= P_e*(A,{B_j})", max(pe_j), comp.upper, "<=",
            "composite hypothesis sandwich, lower side")
    rep.add("P_e*(A,{B_j}) <= P_e*(A, sum B)", comp.lower, pe_sum, "<=",
            "composite hypothesis sandwich, upper side")
    rep.add("composite duality: dual value <= primal value", comp.lower, comp.upper, "<=",
            "composite minimax weak duality")
    return rep


# -- preferential split decomposition ---------------------------------------

def nussbaum_split(ens, k, _pe=None):
    """``(P_e*, 2 P_e*(A_1..A_K) + P_e*(3 A^(K), A_{K+1}..A_r), (first, second))``."""
    r = ens.r
    if not 1 <= k <= r:
        raise PreconditionError(f"K must lie in [1, {r}]")
    ops = ens.hypotheses
    lhs = optimal_error(ens) if _pe is None else _pe
    first = 2.0 * optimal_error_ops(ops[:k])
    pooled = 3.0 * sum(ops[:k])
    second = optimal_error_ops([pooled] + list(ops[k:]))
    return float(lhs), float(first + second), (float(first), float(second))


def nussbaum_recursion(ens, _quantities=None):
    """Recursive split bound and its pairwise-error forms."""
    if ens.r < 2:
        raise PreconditionError("recursive decoupling needs r >= 2")
    q = _quantities if _quantities is not None else _Quantities(ens)
    ops, r, p = ens.hypotheses, ens.r, q.p
    head = 2.0 ** (r - 2) * q.pair_pe[0, 1]
    prefix = [sum(ops[: k + 1]) for k in range(r)]
    scaled = head + sum(2.0 ** (r - 1 - k) * max(glb2_trace(3.0 * prefix[k - 1], ops[k]), 0.0)
                        for k in range(2, r))
    pooled = head + 3.0 * sum(2.0 ** (r - 1 - k) * max(glb2_trace(prefix[k - 1], ops[k]), 0.0)
                              for k in range(2, r))
    kappa = 3.0 * max(math.sqrt(p[i] + p[j]) for i, j in combinations(range(r), 2))
    mixed = head + kappa * sum(2.0 ** (r - 1 - k) * sum(math.sqrt(q.pair_pe[l, k])
                                                        for l in range(k))
                               for k in range(2, r))
    tail_pure = all(matops.is_rank_one(a) for a in ops[2:])
    if tail_pure:
        kappa_p = 3.0 * q.total / float(np.min(p[2:])) if r > 2 else 0.0
        pure = head + kappa_p * sum(2.0 ** (r - 1 - k) * sum(q.pair_pe[l, k] for l in range(k))
                                    for k in range(2, r))
    else:
        pure = float("nan")
    rep = BoundReport()
    rep.add("P_e* <= recursive split with scaled pools", q.pe, scaled, "<=",
            "recursive split decomposition")
    rep.add("recursive split with scaled pools <= pooled form", scaled, pooled, "<=",
            "pool scaling")
    rep.add("P_e* <= recursive split, pairwise square roots", q.pe, mixed, "<=",
            "recursive split, mixed decoupling")
    rep.add("P_e* <= recursive split, rank-one tail", q.pe, pure, "<=",
            "recursive split, rank-one tail decoupling", applicable=tail_pure)
    return rep


def _in_unit_interval(x, name):
    x = matops.hermitian(x)
    w = np.linalg.eigvalsh(x)
    tol = matops.psd_tolerance(float(np.sum(np.abs(w))))
    if w[0] < -tol or w[-1] > 1.0 + tol:
        raise PreconditionError(f"{name} must satisfy 0 <= {name} <= I")
    return x


def povm_nb_check(e, q):
    """``((1/2) Q^{1/2} E Q^{1/2}, I - Q + E, min eigenvalue of their difference)``."""
    e = _in_unit_interval(e, "E")
    q = _in_unit_interval(q, "Q")
    rq = _root_unit(q)
    lhs = matops.sym(0.5 * rq @ e @ rq)
    rhs = np.eye(e.shape[0]) - q + e
    return lhs, rhs, matops.min_eig(rhs - lhs)


def _root_unit(x):
    w, v = np.linalg.eigh(x)
    return matops.sym((v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T)


def proj_povm_check(projectors):
    """``(sum_i (2 P_i - P_0)_+, its largest eigenvalue)`` with ``P_0 = sum_i P_i``."""
    ps = [matops.hermitian(p) for p in projectors]
    if not ps:
        raise PreconditionError("need at least one projector")
    for k, p in enumerate(ps):
        if float(np.max(np.abs(p @ p - p))) > IDEMPOTENT_TOL * max(1.0, float(np.max(np.abs(p)))):
            raise PreconditionError(f"operator {k + 1} is not a projector")
    p0 = sum(ps)
    total = sum(matops.positive_part(2.0 * p - p0) for p in ps)
    return total, matops.max_eig(total)
