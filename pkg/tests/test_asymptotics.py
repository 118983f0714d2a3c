import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from discrimlab import Ensemble, matops
from discrimlab.asymptotics import (averaged_iid_series, exponent_series, multi_chernoff,
                                    rate_lemma_check, schur_weyl_blocks, sym_power_psd, sym_rep)
from discrimlab.discrimination import optimal_error, pure_gram_error
from discrimlab.divergences import q_s
from discrimlab.errors import PreconditionError, ResourceError

from conftest import KET0, proj, rand_state, rand_vector


def pair_with_overlap(c):
    return [np.array([1.0, 0.0]), np.array([c, math.sqrt(1 - c * c)])]


def test_multi_chernoff_examples():
    rho = rand_state(np.random.default_rng(0), 2)
    assert multi_chernoff([rho, rho])[0] == pytest.approx(0, abs=1e-9)
    assert multi_chernoff([proj(np.eye(3)[k]) for k in range(3)])[0] == math.inf
    d1, d2 = np.diag([0.75, 0.25]), np.diag([0.25, 0.75])
    value, pair = multi_chernoff([d1, d2, proj(KET0)])
    assert value == pytest.approx(-math.log(math.sqrt(3) / 2), abs=1e-9)
    assert pair == (0, 1)
    # oracle: brute-force grid over every pair
    grid = np.linspace(0, 1, 1001)
    oracle = min(-math.log(min(q_s(a, b, s) for s in grid))
                 for a, b in [(d1, d2), (d1, proj(KET0)), (d2, proj(KET0))])
    assert value == pytest.approx(oracle, abs=1e-6)


def test_multi_chernoff_needs_two():
    with pytest.raises(PreconditionError):
        multi_chernoff([np.eye(2) / 2])


def test_sym_rep_is_dicke_action():
    rng = np.random.default_rng(1)
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    m = 3
    # oracle: restrict g^{(x)m} to the symmetric subspace spanned by Dicke vectors
    dim = 2 ** m
    dicke = np.zeros((dim, m + 1), dtype=complex)
    for idx in range(dim):
        k = bin(idx).count("1")
        dicke[idx, k] = 1.0
    dicke /= np.linalg.norm(dicke, axis=0)
    big = g
    for _ in range(m - 1):
        big = np.kron(big, g)
    assert np.allclose(sym_rep(g, m), dicke.conj().T @ big @ dicke, atol=1e-12)
    h = rng.normal(size=(2, 2))
    assert np.allclose(sym_rep(g @ h, m), sym_rep(g, m) @ sym_rep(h, m), atol=1e-10)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_schur_weyl_matches_dense(n):
    rng = np.random.default_rng(2)
    states = [rand_state(rng, 2) for _ in range(3)]
    w = rng.dirichlet(np.ones(3))
    ops = [p * s for p, s in zip(w, states)]
    blocks = schur_weyl_blocks(ops, n)
    assert sum(mult * b[0].shape[0] for mult, b in blocks) == 2 ** n
    assert sum(mult * np.trace(b[0]).real for mult, b in blocks) == pytest.approx(w[0])
    pe_blocks = sum(mult * optimal_error(Ensemble(tuple(b))) for mult, b in blocks)
    dense = optimal_error(Ensemble.from_states([matops.tensor_power(s, n) for s in states], w))
    assert pe_blocks == pytest.approx(dense, abs=1e-7)


def test_sym_power_psd_spectrum():
    s = np.diag([0.7, 0.3])
    assert np.allclose(np.diag(sym_power_psd(s, 3)), [0.343, 0.147, 0.063, 0.027])


def test_pure_binary_anchor():
    c = 0.5
    est = exponent_series([proj(v) for v in pair_with_overlap(c)], [0.5, 0.5], 200)
    assert est.method == "gram" and len(est.series) == 200
    assert est.slope == pytest.approx(math.log(c * c), rel=0.01)
    assert est.inside
    # two-sided pure bounds: c^{2n}/4 <= P_e*(n) <= c^{2n}/2 for equal priors
    for pt in est.series:
        rate = pt.log_p_error / pt.n
        lo = math.log(c * c) - math.log(4) / pt.n
        hi = math.log(c * c) - math.log(2) / pt.n
        assert lo - 1e-12 <= rate <= hi + 1e-12


def test_pure_binary_large_n_stays_finite():
    est = exponent_series([proj(v) for v in pair_with_overlap(0.3)], [0.5, 0.5], 1000)
    assert math.isfinite(est.series[-1].log_p_error) and est.series[-1].p_error == 0.0


def test_identical_states_slope_zero():
    rho = rand_state(np.random.default_rng(3), 2)
    est = exponent_series([rho, rho, rho], [1 / 3] * 3, 6)
    for pt in est.series:
        assert pt.p_error == pytest.approx(2 / 3, abs=1e-7)
    assert est.slope == pytest.approx(0, abs=1e-7)
    assert est.lower_envelope == pytest.approx(0, abs=1e-9) and est.inside


@pytest.mark.parametrize("seed", range(3))
def test_mixed_triple_inside(seed):
    rng = np.random.default_rng(10 + seed)
    states = [rand_state(rng, 2) for _ in range(3)]
    est = exponent_series(states, [1 / 3] * 3, 6)
    assert est.method == "schur" and est.inside and est.notes["chain_ok"]
    dense = exponent_series(states, [1 / 3] * 3, 4, method="dense")
    for a, b in zip(dense.series, est.series):
        assert a.p_error == pytest.approx(b.p_error, abs=1e-7)


def test_gram_path_cross_validation():
    rng = np.random.default_rng(4)
    vs = [rand_vector(rng, 2) for _ in range(3)]
    w = [0.2, 0.3, 0.5]
    gram = exponent_series([proj(v) for v in vs], w, 8, method="gram")
    dense = exponent_series([proj(v) for v in vs], w, 8, method="dense")
    for a, b in zip(gram.series, dense.series):
        assert a.p_error == pytest.approx(b.p_error, abs=1e-7)
        assert a.p_error == pytest.approx(pure_gram_error(vs, w, a.n), abs=1e-7)


def test_exponent_errors():
    rho = rand_state(np.random.default_rng(5), 2)
    with pytest.raises(ResourceError):
        exponent_series([rho, rho], [0.5, 0.5], 13, method="dense")
    with pytest.raises(PreconditionError):
        exponent_series([rho, rho], [0.5, 0.5], 5, method="gram")
    with pytest.raises(PreconditionError):
        exponent_series([rho], [1.0], 5)


def test_orthogonal_truncates():
    est = exponent_series([proj(KET0), proj(np.array([0, 1.0]))], [0.5, 0.5], 5)
    assert len(est.series) == 1 and est.series[0].p_error == 0
    assert est.verdict.startswith("-infinity")


def test_averaged_single_sigma_is_binary_chernoff():
    rng = np.random.default_rng(6)
    rho, sigma = proj(rand_vector(rng, 2)), rand_state(rng, 2)
    est = averaged_iid_series(rho, [sigma], 0.5, [1.0], 30)
    assert est.lower_envelope == pytest.approx(-est.notes["divergences"][0])
    assert est.notes["tight"] and est.inside


def test_averaged_pure_commuting():
    rho = proj(KET0)
    s1, s2 = np.diag([0.6, 0.4]), np.diag([0.3, 0.7])
    est = averaged_iid_series(rho, [s1, s2], 0.5, [0.5, 0.5], 10)
    c_min = min(-math.log(0.6), -math.log(0.3))
    assert est.slope == pytest.approx(-c_min, rel=0.05)


def test_averaged_contains_rho():
    rng = np.random.default_rng(7)
    rho = rand_state(rng, 2)
    est = averaged_iid_series(rho, [rho, rand_state(rng, 2)], 0.5, [0.5, 0.5], 8)
    assert est.lower_envelope == pytest.approx(0, abs=1e-9)
    assert est.slope == pytest.approx(0, abs=0.05) and est.inside


def test_averaged_schur_matches_dense():
    rng = np.random.default_rng(8)
    rho = rand_state(rng, 2)
    sig = [rand_state(rng, 2) for _ in range(2)]
    a = averaged_iid_series(rho, sig, 0.4, [0.3, 0.7], 6, method="dense")
    b = averaged_iid_series(rho, sig, 0.4, [0.3, 0.7], 6, method="schur")
    for x, y in zip(a.series, b.series):
        assert x.p_error == pytest.approx(y.p_error, abs=1e-12)


def test_rate_lemma_examples():
    seq = np.array([0.5 ** n for n in range(1, 20)])
    v = rate_lemma_check([seq])
    assert v.ok and np.allclose(v.sum_rate, v.max_rate)
    two = [[2.0 ** -n for n in range(1, 60)], [3.0 ** -n for n in range(1, 60)]]
    v = rate_lemma_check(two)
    assert v.ok and v.sum_rate[-1] == pytest.approx(-math.log(2), abs=0.02)
    with pytest.raises(PreconditionError):
        rate_lemma_check([[1.0, -1.0]])


@given(st.integers(0, 10_000), st.integers(1, 5))
def test_rate_lemma_random(seed, r):
    rng = np.random.default_rng(seed)
    assert rate_lemma_check(rng.random((r, 30)) + 1e-300).ok
