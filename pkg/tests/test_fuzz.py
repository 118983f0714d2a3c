import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from discrimlab import fuzz, matops
from discrimlab.discrimination import classical_error, optimal_povm
from discrimlab.errors import PreconditionError


def helstrom_pure(p1, p2, overlap_sq):
    # independent closed form for two weighted pure states
    s = p1 + p2
    return 0.5 * (s - math.sqrt(s * s - 4.0 * p1 * p2 * overlap_sq))


# -- sampler --------------------------------------------------------------------------

def test_stream_is_deterministic_and_uniform():
    a = fuzz.Stream(7).uniform(20000)
    b = fuzz.Stream(7).uniform(20000)
    assert np.array_equal(a, b)
    assert np.all((a > 0) & (a < 1))
    assert abs(a.mean() - 0.5) < 0.01
    n = fuzz.Stream(3).normal(20000)
    assert abs(n.mean()) < 0.03 and abs(n.std() - 1) < 0.03


@pytest.mark.parametrize("kind", fuzz.KINDS)
@pytest.mark.parametrize("weighting", fuzz.WEIGHTINGS)
def test_sample_shapes(kind, weighting):
    spec = fuzz.SampleSpec(dim=3, r=4, kind=kind, weighting=weighting, scale=2.5, seed=11)
    ens = fuzz.sample_ensemble(spec)
    assert ens.r == 4 and ens.dim == 3
    for a in ens.hypotheses:
        assert np.linalg.eigvalsh(a).min() >= -1e-12
    if weighting != "unnormalized":
        assert abs(ens.total_trace - 1) < 1e-12
    states = ens.states()
    for s in states:
        assert abs(np.trace(s).real - 1) < 1e-12
        rank = np.linalg.matrix_rank(s, tol=1e-10)
        if kind == "pure-haar":
            assert rank == 1
        elif kind == "mixed-wishart":
            assert rank == 3
        else:
            assert np.allclose(s, np.diag(np.diag(s)))


def test_wishart_dof_controls_rank():
    spec = fuzz.SampleSpec(dim=4, r=2, dof=2, seed=5)
    for s in fuzz.sample_ensemble(spec).states():
        assert np.linalg.matrix_rank(s, tol=1e-10) == 2


def test_sample_is_seed_reproducible():
    spec = fuzz.SampleSpec(dim=2, r=3, seed=42)
    a, b = fuzz.sample_ensemble(spec), fuzz.sample_ensemble(spec)
    assert all(np.array_equal(x, y) for x, y in zip(a.hypotheses, b.hypotheses))
    c = fuzz.sample_ensemble(spec.with_seed(43))
    assert not np.allclose(a.hypotheses[0], c.hypotheses[0])


def test_bad_spec_rejected():
    with pytest.raises(PreconditionError):
        fuzz.SampleSpec(dim=2, r=3, kind="gaussian")
    with pytest.raises(PreconditionError):
        fuzz.SampleSpec(dim=1, r=3)
    with pytest.raises(PreconditionError):
        fuzz.SampleSpec(dim=2, r=3, weighting="unnormalized", scale=0)


@given(st.integers(0, 2**32), st.integers(2, 4), st.integers(2, 5))
def test_diagonal_dirichlet_matches_classical(seed, r, d):
    spec = fuzz.SampleSpec(dim=d, r=r, kind="diagonal-dirichlet", weighting="dirichlet", seed=seed)
    ens = fuzz.sample_ensemble(spec)
    diag = np.array([np.diag(a).real for a in ens.hypotheses])
    oracle = 1.0 - diag.max(axis=0).sum()
    assert abs(classical_error(ens) - oracle) < 1e-12
    assert abs(optimal_povm(ens).p_error.value - oracle) < 1e-7


# -- campaigns ------------------------------------------------------------------------

def test_campaign_deterministic():
    spec = fuzz.SampleSpec(dim=2, r=3, seed=100)
    a = fuzz.fuzz_conjecture("conj2.2", spec, 30)
    b = fuzz.fuzz_conjecture("conj2.2", spec, 30)
    assert json.dumps(a.to_dict(), sort_keys=True) == json.dumps(b.to_dict(), sort_keys=True)
    assert a.trials == 30 and sum(a.histogram["counts"]) + a.histogram["above"] \
        == 30 - a.degenerate_count
    assert a.constant == 8.0


def test_jobs_do_not_change_result():
    spec = fuzz.SampleSpec(dim=2, r=3, seed=9)
    a = fuzz.fuzz_conjecture("claim2", spec, 12, recheck="chain")
    b = fuzz.fuzz_conjecture("claim2", spec, 12, recheck="chain", jobs=3)
    assert a.to_dict() == b.to_dict()


def test_conj22_binary_ratio_is_one():
    # r = 2: the pairwise error is the optimal error, constant 4(r-1) = 4
    rec = fuzz.fuzz_conjecture("conj2.2", fuzz.SampleSpec(dim=3, r=2, seed=1), 15)
    assert abs(rec.worst_ratio - 1.0) < 1e-6
    assert rec.exceed_count == 0


def test_claim2_orthogonal_is_degenerate():
    spec = fuzz.SampleSpec(dim=4, r=3, kind="diagonal-dirichlet", seed=0)
    out = fuzz.run_trial("claim2", spec, 0)
    assert not out.degenerate  # generic diagonal states overlap
    # fully orthogonal ensemble: pairwise error zero, so the ratio is undefined
    from discrimlab.bounds import _Quantities
    from discrimlab import Ensemble
    ens = Ensemble.from_states([matops.projector(np.eye(3)[k]) for k in range(3)], [1 / 3] * 3)
    num, den, _ = fuzz._RATIOS["claim2"][0](_Quantities(ens))
    assert den < fuzz.DEGENERATE_CUT


def test_replay_reproduces_worst():
    spec = fuzz.SampleSpec(dim=2, r=3, seed=500)
    rec = fuzz.fuzz_conjecture("claim2", spec, 20, recheck="none")
    assert fuzz.replay("claim2", spec, rec.worst_seed) == rec.worst_ratio


@pytest.mark.parametrize("conj", fuzz.CONJECTURES)
def test_every_conjecture_runs(conj):
    rec = fuzz.fuzz_conjecture(conj, fuzz.SampleSpec(dim=2, r=3, seed=3), 4)
    assert rec.trials == 4 and rec.violation_count == 0
    if conj == "claim3":
        assert set(rec.per_constant) == {"1,1", "1,2", "1,4", "1,8", "2,1", "2,2", "2,4", "2,8",
                                         "4,1", "4,2", "4,4", "4,8", "8,1", "8,2", "8,4", "8,8"}
    if conj == "averaged":
        assert rec.constant is None


def test_zero_trials_and_errors():
    rec = fuzz.fuzz_conjecture("conj2.2", fuzz.SampleSpec(dim=2, r=3), 0)
    assert rec.trials == 0 and rec.worst_seed is None and rec.exceed_count == 0
    with pytest.raises(PreconditionError):
        fuzz.fuzz_conjecture("conj9", fuzz.SampleSpec(dim=2, r=3), 3)
    with pytest.raises(PreconditionError):
        fuzz.fuzz_conjecture("conj2.2", fuzz.SampleSpec(dim=2, r=3), 3, recheck="some")


def test_mixedbound_normalizes_unweighted():
    spec = fuzz.SampleSpec(dim=2, r=3, weighting="unnormalized", scale=5.0, seed=2)
    ens = fuzz._prepare("mixedbound", fuzz.sample_ensemble(spec))
    assert abs(ens.total_trace - 1) < 1e-12


def test_worst_ensemble_json_round_trips():
    from discrimlab.ensemble_io import parse_ensemble
    spec = fuzz.SampleSpec(dim=2, r=3, seed=77)
    rec = fuzz.fuzz_conjecture("conj2.2", spec, 5, recheck="none")
    ens = parse_ensemble(json.loads(fuzz.worst_ensemble_json(rec)))
    ref = fuzz.sample_ensemble(spec.with_seed(rec.worst_seed))
    assert all(np.array_equal(a, b) for a, b in zip(ens.hypotheses, ref.hypotheses))


# -- counterexamples ------------------------------------------------------------------

@pytest.mark.parametrize("eps", [1e-2, 1e-3, 1e-4, 0.2])
def test_wrong1_against_closed_forms(eps):
    lhs, rhs, ratio = fuzz.counterexample_wrong1(eps)
    # B1 + B2 = diag(eps, 2 - eps), so P_e*(A, B1 + B2) = eps exactly
    assert abs(lhs - eps) < 1e-12
    oracle = 2 * helstrom_pure(eps, 1.0, eps / 2)
    assert abs(rhs - oracle) < 1e-12
    assert abs(ratio - rhs / lhs) < 1e-15


def test_wrong1_ratio_per_decade():
    ratios = [fuzz.counterexample_wrong1(e)[2] for e in (1e-2, 1e-3, 1e-4)]
    for a, b in zip(ratios, ratios[1:]):
        assert 5 <= a / b <= 20


def test_wrong2_violated():
    v = fuzz.counterexample_wrong2(1e-3)
    assert v.violated and v.violation > 0
    assert abs(v.trace_a - 1) < 1e-12
    assert v.embedding_drift < 1e-12
    # violation grows without bound as eps shrinks
    assert fuzz.counterexample_wrong2(1e-4).factor > v.factor > 100


def test_counterexample_domain():
    with pytest.raises(PreconditionError):
        fuzz.counterexample_wrong1(0.0)
    with pytest.raises(PreconditionError):
        fuzz.counterexample_wrong2(0.7)
