"""Reproducible random ensembles, conjecture fuzzing and the sum-bound counterexamples.

Randomness comes from the Philox4x64-10 counter-based generator keyed
directly by the 64-bit seed (counter starting at zero), so a seed fixes the
stream on any platform. Uniforms are the top 53 bits of each raw word,
``(x >> 11) + 0.5`` scaled by ``2^-53``, which keeps them strictly inside
(0, 1); normals use Box-Muller on consecutive uniform pairs.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import matops
from .bounds import _Quantities, _claim3_sides, evaluate_bound_suite
from .discrimination import optimal_error_ops
from .ensemble import Ensemble
from .ensemble_io import ensemble_json
from .errors import PreconditionError, TheoremViolation
from .lattice import glb2_trace

KINDS = ("pure-haar", "mixed-wishart", "diagonal-dirichlet")
WEIGHTINGS = ("uniform", "dirichlet", "unnormalized")
CONJECTURES = ("conj2.2", "mixedbound", "claim2", "claim3", "averaged")
RECHECK = ("full", "chain", "none")
DEGENERATE_CUT = 1e-12
HIST_BINS = 20
MASK64 = (1 << 64) - 1


class Stream:
    """Uniform and Gaussian draws from one Philox key."""

    def __init__(self, seed):
        self._bits = np.random.Philox(key=int(seed) & MASK64)

    def uniform(self, n):
        raw = self._bits.random_raw(n)
        return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53

    def normal(self, n):
        m = (n + 1) // 2
        u = self.uniform(2 * m)
        rad = np.sqrt(-2.0 * np.log(u[0::2]))
        ang = 2.0 * np.pi * u[1::2]
        return np.concatenate([rad * np.cos(ang), rad * np.sin(ang)])[:n] if n else np.zeros(0)

    def complex_normal(self, shape):
        size = int(np.prod(shape))
        z = self.normal(2 * size)
        return (z[0::2] + 1j * z[1::2]).reshape(shape) / math.sqrt(2.0)

    def exponential(self, n):
        return -np.log(self.uniform(n))


@dataclass(frozen=True)
class SampleSpec:
    dim: int
    r: int
    kind: str = "mixed-wishart"
    dof: int = None
    weighting: str = "uniform"
    scale: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.dim < 2 or self.r < 2:
            raise PreconditionError("sample specs need dim >= 2 and r >= 2")
        if self.kind not in KINDS:
            raise PreconditionError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if self.weighting not in WEIGHTINGS:
            raise PreconditionError(f"unknown weighting {self.weighting!r}")
        if self.dof is not None and self.dof < 1:
            raise PreconditionError("dof must be at least 1")
        if not self.scale > 0:
            raise PreconditionError("scale must be positive")

    @property
    def wishart_dof(self):
        return self.dim if self.dof is None else self.dof

    def with_seed(self, seed):
        return SampleSpec(self.dim, self.r, self.kind, self.dof, self.weighting, self.scale,
                          int(seed) & MASK64)

    def to_dict(self):
        return {"dim": self.dim, "r": self.r, "kind": self.kind, "dof": self.wishart_dof,
                "weighting": self.weighting, "scale": self.scale, "seed": self.seed}


def _state(stream, spec):
    d = spec.dim
    if spec.kind == "pure-haar":
        # first column of a Haar unitary: a normalized complex Gaussian vector
        v = stream.complex_normal((d,))
        return matops.projector(v)
    if spec.kind == "mixed-wishart":
        g = stream.complex_normal((d, spec.wishart_dof))
        m = g @ g.conj().T
        return matops.sym(m / np.trace(m).real)
    x = stream.exponential(d)
    return np.diag(x / x.sum()).astype(complex)


def sample_ensemble(spec):
    """Draw an ensemble: ``r`` states in order, then the weights."""
    stream = Stream(spec.seed)
    states = [_state(stream, spec) for _ in range(spec.r)]
    if spec.weighting == "uniform":
        w = np.full(spec.r, 1.0 / spec.r)
    elif spec.weighting == "dirichlet":
        x = stream.exponential(spec.r)
        w = x / x.sum()
    else:
        w = spec.scale * stream.exponential(spec.r)
    return Ensemble.from_states(states, w)


# -- conjecture ratios ------------------------------------------------------------

@dataclass(frozen=True)
class TrialOutcome:
    seed: int
    ratio: float
    degenerate: bool
    extra: dict = field(default_factory=dict)
    theorem_violation: object = None


def _claim3_grid(r):
    vals = sorted({1.0, 2.0, 4.0, 4.0 * (r - 1)})
    return [(c1, c2) for c1 in vals for c2 in vals]


def _ratio_conj22(q):
    return q.pe, q.pe2, {}


def _ratio_claim2(q):
    return q.dich, q.pe2, {}


def _ratio_mixedbound(q):
    den = 1.0 - (1.0 + 4.0 * (q.r - 1) * q.pe2) ** -0.5
    return q.gamma_star, den, {}


def _ratio_claim3(q):
    c = 4.0 * (q.r - 1)
    sides = [_claim3_sides(q, i) for i in range(q.r)]
    per = {}
    for c1, c2 in _claim3_grid(q.r):
        worst = 0.0
        for lhs, first, cross in sides:
            den = c1 * first + c2 * cross
            if den >= DEGENERATE_CUT:
                worst = max(worst, lhs / den)
            elif lhs >= DEGENERATE_CUT:
                worst = float("inf")
        per[f"{c1:g},{c2:g}"] = worst
    worst_i = max(sides, key=lambda s: s[0] - c * (s[1] + s[2]))
    return worst_i[0], c * (worst_i[1] + worst_i[2]), {"per_constant": per}


def _averaged_problem(ens, n):
    """``p rho^{(x)n}`` against ``(1-p) sum q_i sigma_i^{(x)n}`` from an ensemble."""
    w = ens.weights
    states = ens.states()
    p = w[0] / w.sum()
    q = w[1:] / w[1:].sum()
    a = p * matops.tensor_power(states[0], n)
    bs = [(1.0 - p) * qi * matops.tensor_power(s, n) for qi, s in zip(q, states[1:])]
    return a, bs, p


def _ratio_averaged(q, n=3):
    a, bs, p = _averaged_problem(q.ens, n)
    states = q.ens.states()
    avg = max(glb2_trace(a, sum(bs)), 0.0)
    single = max(max(glb2_trace(a, (1.0 - p) * matops.tensor_power(s, n)), 0.0)
                 for s in states[1:])
    if avg <= 0.0 or single < DEGENERATE_CUT:
        return avg, single, {}
    # finite-n rate excess, exponentiated: (P_avg / max_i P_i)^(1/n)
    return (avg / single) ** (1.0 / n), 1.0, {}


_RATIOS = {
    "conj2.2": (_ratio_conj22, lambda r: 4.0 * (r - 1)),
    "claim2": (_ratio_claim2, lambda r: 4.0 * (r - 1)),
    "mixedbound": (_ratio_mixedbound, lambda r: 1.0),
    "claim3": (_ratio_claim3, lambda r: 1.0),
    "averaged": (_ratio_averaged, lambda r: None),
}


def _chain_report(q):
    """Theorem chain that the conjecture ratios lean on, from cached quantities."""
    from .bounds import BoundReport

    rep = BoundReport()
    rep.add("P_e* >= P_e2", q.pe, q.pe2, ">=", "single-shot pairwise lower bound")
    rep.add("P_e2 <= P_dich/2", q.pe2, 0.5 * q.dich, "<=", "dichotomic chain, pairwise link")
    rep.add("P_dich/2 <= P_e*", 0.5 * q.dich, q.pe, "<=", "dichotomic chain, lower link")
    rep.add("P_e* <= P_dich", q.pe, q.dich, "<=", "dichotomic chain, upper link")
    rep.add("Gamma* <= P_e*", q.gamma_star, q.pe, "<=", "Tyson sandwich lower")
    rep.add("P_e* <= 2 Gamma*", q.pe, 2.0 * q.gamma_star, "<=", "Tyson sandwich upper")
    return rep


def _prepare(conjecture, ens):
    if conjecture == "mixedbound" and not ens.is_weighted:
        # the conjectured bound is stated for unit total trace
        t = ens.total_trace
        ens = Ensemble(tuple(a / t for a in ens.hypotheses), ens.labels)
    return ens


def run_trial(conjecture, spec, seed, recheck="full"):
    """Ratio of one trial; never raises on theorem violations (they are returned)."""
    ens = _prepare(conjecture, sample_ensemble(spec.with_seed(seed)))
    q = _Quantities(ens)
    fn, _ = _RATIOS[conjecture]
    num, den, extra = fn(q)
    degenerate = den < DEGENERATE_CUT
    ratio = float("nan") if degenerate else num / den
    violation = None
    if recheck != "none":
        rep = evaluate_bound_suite(ens, _quantities=q) if recheck == "full" else _chain_report(q)
        bad = rep.theorem_violations()
        if bad:
            violation = (bad[0], ensemble_json(ens))
    return TrialOutcome(int(seed), float(ratio), bool(degenerate), extra, violation)


@dataclass(frozen=True)
class FuzzRecord:
    conjecture_id: str
    trials: int
    worst_ratio: float
    worst_seed: int
    violation_count: int
    histogram: dict
    constant: float
    exceed_count: int
    degenerate_count: int
    spec: dict
    findings: list = field(default_factory=list)
    per_constant: dict = field(default_factory=dict)
    recheck: str = "full"

    def to_dict(self):
        def num(x):
            if x is None:
                return None
            if isinstance(x, float) and math.isinf(x):
                return "inf"
            if isinstance(x, float) and math.isnan(x):
                return None
            return x
        return {
            "conjecture_id": self.conjecture_id,
            "trials": self.trials,
            "worst_ratio": num(self.worst_ratio),
            "worst_seed": self.worst_seed,
            "violation_count": self.violation_count,
            "histogram": self.histogram,
            "constant": num(self.constant),
            "exceed_count": self.exceed_count,
            "degenerate_count": self.degenerate_count,
            "spec": self.spec,
            "findings": self.findings,
            "per_constant": {k: {kk: num(vv) for kk, vv in v.items()}
                             for k, v in self.per_constant.items()},
            "recheck": self.recheck,
        }


def _histogram(ratios, constant):
    top = constant if constant else (max(ratios) if ratios else 1.0)
    top = top if top > 0 else 1.0
    counts, edges = np.histogram(np.clip(ratios, 0.0, None), bins=HIST_BINS, range=(0.0, top))
    above = int(sum(1 for x in ratios if x > top))
    return {"edges": [float(e) for e in edges], "counts": [int(c) for c in counts],
            "above": above}


def fuzz_conjecture(conjecture, spec, trials, recheck="full", jobs=1, abort_on_violation=True):
    """Sample ``trials`` ensembles with seeds ``spec.seed + i`` and track the ratio.

    Theorem-flagged side conditions are re-evaluated on every trial
    (``recheck='full'`` runs the whole bound suite); the first violation
    raises ``TheoremViolation`` carrying the offending ensemble, unless
    ``abort_on_violation`` is false, in which case violations are counted.
    """
    if conjecture not in _RATIOS:
        raise PreconditionError(f"unknown conjecture id {conjecture!r}; expected {CONJECTURES}")
    if recheck not in RECHECK:
        raise PreconditionError(f"recheck must be one of {RECHECK}")
    if trials < 0:
        raise PreconditionError("trials must be non-negative")
    seeds = [(spec.seed + i) & MASK64 for i in range(trials)]
    run = lambda s: run_trial(conjecture, spec, s, recheck)
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(run, seeds))
    else:
        outcomes = []
        for s in seeds:
            out = run(s)
            if out.theorem_violation is not None and abort_on_violation:
                entry, js = out.theorem_violation
                raise TheoremViolation(f"theorem entry {entry.name!r} violated at seed {s}",
                                       entry=entry, ensemble_json=js)
            outcomes.append(out)
    violations = [o for o in outcomes if o.theorem_violation is not None]
    if violations and abort_on_violation:
        entry, js = violations[0].theorem_violation
        raise TheoremViolation(f"theorem entry {entry.name!r} violated at seed "
                               f"{violations[0].seed}", entry=entry, ensemble_json=js)

    constant = _RATIOS[conjecture][1](spec.r)
    valid = [o for o in outcomes if not o.degenerate]
    worst = max(valid, key=lambda o: o.ratio, default=None)
    ratios = [o.ratio for o in valid]
    findings = []
    if constant is not None:
        findings = [{"seed": o.seed, "ratio": o.ratio} for o in valid if o.ratio > constant]
    per_constant = {}
    if conjecture == "claim3":
        for key in _claim3_grid_keys(spec.r):
            vals = [o.extra["per_constant"][key] for o in valid]
            per_constant[key] = {
                "worst_ratio": max(vals) if vals else 0.0,
                "violation_rate": (sum(1 for v in vals if v > 1.0) / len(vals)) if vals else 0.0,
            }
    return FuzzRecord(
        conjecture_id=conjecture,
        trials=trials,
        worst_ratio=worst.ratio if worst else 0.0,
        worst_seed=worst.seed if worst else None,
        violation_count=len(violations),
        histogram=_histogram(ratios, constant),
        constant=constant,
        exceed_count=len(findings),
        degenerate_count=len(outcomes) - len(valid),
        spec=spec.to_dict(),
        findings=findings,
        per_constant=per_constant,
        recheck=recheck,
    )


def _claim3_grid_keys(r):
    return [f"{c1:g},{c2:g}" for c1, c2 in _claim3_grid(r)]


def replay(conjecture, spec, seed):
    """Recompute the ratio of a single trial (no theorem recheck)."""
    return run_trial(conjecture, spec, seed, recheck="none").ratio


# -- counterexamples ------------------------------------------------------------------

def _counterexample_ops(eps):
    s = math.sqrt(eps / 2.0)
    c = math.sqrt(1.0 - eps / 2.0)
    psi1 = np.array([1.0, 0.0])
    psi2 = np.array([s, c])
    psi3 = np.array([-s, c])
    return (eps * matops.projector(psi1, normalize=False), matops.projector(psi2, normalize=False),
            matops.projector(psi3, normalize=False))


def counterexample_wrong1(eps):
    """``(P_e*(A, B_1 + B_2), P_e*(A, B_1) + P_e*(A, B_2), ratio rhs/lhs)``.

    ``A = eps |0><0|`` and ``B_{1,2}`` are rank-one projectors onto
    ``(+-sin a, cos a)`` with ``sin^2 a = eps/2``: the left side is linear in
    eps while the right side is quadratic.
    """
    if not 0.0 < eps < 0.5:
        raise PreconditionError("epsilon must lie in (0, 0.5)")
    a, b1, b2 = _counterexample_ops(eps)
    lhs = glb2_trace(a, b1 + b2)
    rhs = glb2_trace(a, b1) + glb2_trace(a, b2)
    return float(lhs), float(rhs), float(rhs / lhs)


@dataclass(frozen=True)
class Wrong2Verdict:
    """Embedded counterexample to the trace-normalized sum bound.

    ``violation = lhs - rhs`` and ``factor = lhs / rhs``; ``embedding_drift``
    is the largest change of any GLB trace caused by the direct sum.
    """

    epsilon: float
    lhs: float
    rhs: float
    violation: float
    factor: float
    trace_a: float
    embedding_drift: float

    @property
    def violated(self):
        return self.violation > 0


def counterexample_wrong2(eps):
    """Replace ``A`` by ``A (+) (1 - Tr A)|x><x|`` so that ``Tr A = 1`` and re-test."""
    if not 0.0 < eps < 0.5:
        raise PreconditionError("epsilon must lie in (0, 0.5)")
    a, b1, b2 = _counterexample_ops(eps)
    x = np.array([[1.0 - eps]], dtype=complex)
    a_e = matops.direct_sum(a, x)
    z = np.zeros((1, 1), dtype=complex)
    b1_e, b2_e = matops.direct_sum(b1, z), matops.direct_sum(b2, z)
    tr_a = matops.real_trace(a_e)
    lhs = glb2_trace(a_e, b1_e + b2_e)
    terms = [glb2_trace(a_e, b1_e), glb2_trace(a_e, b2_e)]
    rhs = sum(terms) / tr_a
    drift = max(abs(lhs - glb2_trace(a, b1 + b2)),
                abs(terms[0] - glb2_trace(a, b1)), abs(terms[1] - glb2_trace(a, b2)))
    return Wrong2Verdict(float(eps), float(lhs), float(rhs), float(lhs - rhs),
                         float(lhs / rhs), float(tr_a), float(drift))


def worst_ensemble_json(record, conjecture=None):
    """Serialized worst-case ensemble of a record, for findings files."""
    spec = SampleSpec(**{k: v for k, v in record.spec.items()})
    ens = _prepare(conjecture or record.conjecture_id, sample_ensemble(spec.with_seed(record.worst_seed)))
    return ensemble_json(ens)


def pairwise_errors(ens):
    """Matrix of ``P_e*(A_i, A_j)``; a convenience for reports."""
    m = np.zeros((ens.r, ens.r))
    for i, j in combinations(range(ens.r), 2):
        m[i, j] = m[j, i] = max(glb2_trace(ens.hypotheses[i], ens.hypotheses[j]), 0.0)
    return m


def optimal_error_of_spec(spec):
    return optimal_error_ops(sample_ensemble(spec).hypotheses)
