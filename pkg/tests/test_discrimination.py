import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from discrimlab import Ensemble, Povm, matops
from discrimlab.discrimination import (binary_error, classical_success, dichotomic_error,
                                       glb_error_forms, optimal_error, optimal_povm,
                                       pairwise_error, pairwise_success, pure_gram_error,
                                       verify_ykl)
from discrimlab.errors import PreconditionError
from discrimlab.lattice import glb2_trace
from discrimlab.povm import pretty_good

from conftest import (KET0, KET1, PLUS, cvx_lub_trace, proj, rand_diag_ensemble, rand_ensemble,
                      rand_state, rand_vector, trine_vectors)


def trine():
    return Ensemble.from_vectors(trine_vectors(), [1 / 3] * 3)


def test_binary_error_examples():
    rho = rand_state(np.random.default_rng(0), 2)
    assert binary_error(rho / 2, rho / 2)[0] == pytest.approx(0.5)
    assert binary_error(proj(KET0) / 2, proj(KET1) / 2)[0] == pytest.approx(0, abs=1e-12)
    pe, e = binary_error(0.5 * proj(KET0), 0.5 * proj(PLUS))
    assert pe == pytest.approx((1 - math.sqrt(0.5)) / 2, abs=1e-12)


@given(st.integers(0, 10_000), st.integers(1, 4))
def test_binary_projector(seed, d):
    rng = np.random.default_rng(seed)
    a, b = 0.4 * rand_state(rng, d), 0.6 * rand_state(rng, d)
    pe, e = binary_error(a, b)
    assert pe >= -1e-10
    assert np.abs(e @ e - e).max() <= 1e-9
    achieved = np.trace(a @ (np.eye(d) - e)).real + np.trace(b @ e).real
    assert achieved == pytest.approx(pe, abs=1e-9)


def test_optimal_povm_identical():
    rho = rand_state(np.random.default_rng(1), 3)
    res = optimal_povm(Ensemble(tuple(rho / 4 for _ in range(4))))
    assert res.p_success.value == pytest.approx(0.25, abs=1e-7)
    assert res.p_error.value == pytest.approx(0.75, abs=1e-7)


def test_optimal_povm_trine():
    res = optimal_povm(trine())
    assert res.p_success.value == pytest.approx(2 / 3, abs=1e-6)
    assert verify_ykl(trine(), pretty_good(trine())).optimal


def test_optimal_povm_diagonal_oracle():
    ens = Ensemble((np.diag([1.0, 2.0]), np.diag([2.0, 1.0])))
    assert classical_success(ens) == pytest.approx(4)
    assert optimal_povm(ens).p_success.value == pytest.approx(4, abs=1e-6)


@given(st.integers(0, 10_000), st.integers(2, 4), st.integers(2, 4), st.booleans())
def test_certificate_invariants(seed, r, d, weighted):
    rng = np.random.default_rng(seed)
    ens = rand_ensemble(rng, r, d, weighted=weighted)
    res = optimal_povm(ens)
    tr0 = ens.total_trace
    assert res.p_success.primal + res.p_error.primal == pytest.approx(tr0, abs=1e-8)
    assert res.p_error.gap <= 1e-7 * max(1, tr0)
    y = res.dual_witness
    for a in ens.hypotheses:
        assert matops.min_eig(y - a) >= -matops.psd_tolerance(tr0)
    assert res.povm.validate()
    assert res.povm.completeness_deficit <= 1e-8


@pytest.mark.parametrize("seed", range(5))
def test_optimal_success_against_conic_solver(seed):
    rng = np.random.default_rng(300 + seed)
    ens = rand_ensemble(rng, 3, 3)
    assert optimal_povm(ens).p_success.value == pytest.approx(cvx_lub_trace(ens.hypotheses),
                                                              abs=1e-6)


@given(st.integers(0, 10_000), st.integers(1, 4))
def test_binary_agreement(seed, d):
    rng = np.random.default_rng(seed)
    ens = rand_ensemble(rng, 2, d)
    assert optimal_error(ens) == pytest.approx(binary_error(*ens.hypotheses)[0], abs=1e-6)


@given(st.integers(0, 10_000), st.integers(2, 4), st.integers(2, 6))
def test_classical_oracle(seed, r, d):
    ens = rand_diag_ensemble(np.random.default_rng(seed), r, d)
    assert optimal_povm(ens).p_success.value == pytest.approx(classical_success(ens), abs=1e-7)


def test_classical_examples_and_errors():
    a = np.diag([0.2, 0.3])
    assert classical_success(Ensemble((a,))) == pytest.approx(0.5)
    with pytest.raises(PreconditionError):
        classical_success(Ensemble((proj(PLUS), proj(KET0))))


def test_verify_ykl():
    a, b = 0.5 * proj(KET0), 0.5 * proj(PLUS)
    ens = Ensemble((a, b))
    _, e = binary_error(a, b)
    rep = verify_ykl(ens, Povm((e, np.eye(2) - e)))
    assert rep.optimal and rep.slackness_residual <= 1e-9
    assert not verify_ykl(ens, Povm((np.eye(2) / 2, np.eye(2) / 2))).optimal
    assert verify_ykl(trine(), pretty_good(trine())).optimal


def test_pairwise_examples():
    rho = rand_state(np.random.default_rng(2), 2)
    for r in (2, 3, 4):
        assert pairwise_error(Ensemble(tuple(rho / r for _ in range(r)))) == pytest.approx(0.5)
    orth = Ensemble.from_vectors([np.eye(3)[k] for k in range(3)], [1 / 3] * 3)
    assert pairwise_error(orth) == pytest.approx(0, abs=1e-12)
    ens = rand_ensemble(np.random.default_rng(3), 2, 3)
    assert pairwise_error(ens) == pytest.approx(binary_error(*ens.hypotheses)[0])


@given(st.integers(0, 10_000), st.integers(2, 4), st.integers(2, 3))
def test_pairwise_complement(seed, r, d):
    ens = rand_ensemble(np.random.default_rng(seed), r, d, weighted=False)
    assert pairwise_error(ens) + pairwise_success(ens) == pytest.approx(ens.total_trace, abs=1e-9)


def test_dichotomic_examples():
    orth = Ensemble.from_vectors([np.eye(3)[k] for k in range(3)], [1 / 3] * 3)
    assert dichotomic_error(orth).total == pytest.approx(0, abs=1e-12)
    rho = rand_state(np.random.default_rng(4), 2)
    for r in (2, 3, 5):
        assert dichotomic_error(Ensemble(tuple(rho / r for _ in range(r)))).total == pytest.approx(1)
    ens = rand_ensemble(np.random.default_rng(5), 2, 2)
    assert dichotomic_error(ens).total == pytest.approx(2 * binary_error(*ens.hypotheses)[0])


@given(st.integers(0, 10_000), st.integers(2, 4), st.integers(2, 4))
def test_dichotomic_forms(seed, r, d):
    ens = rand_ensemble(np.random.default_rng(seed), r, d, weighted=False)
    res = dichotomic_error(ens)
    assert res.total == pytest.approx(res.positive_part_form, abs=1e-9)
    assert -1e-12 <= res.total <= ens.total_trace + 1e-12


@given(st.integers(0, 10_000), st.integers(2, 4), st.integers(2, 4), st.booleans())
def test_dich_chain_and_qiu(seed, r, d, pure):
    ens = rand_ensemble(np.random.default_rng(seed), r, d, pure=pure)
    pe, pe2, dich = optimal_error(ens), pairwise_error(ens), dichotomic_error(ens).total
    assert pe2 <= 0.5 * dich + 1e-8
    assert 0.5 * dich <= pe + 1e-8
    assert pe <= dich + 1e-8
    res = optimal_povm(ens)
    assert res.p_success.value <= pairwise_success(ens) + 1e-8


@given(st.integers(0, 10_000), st.integers(1, 3))
def test_concavity_and_monotonicity(seed, m):
    rng = np.random.default_rng(seed)
    a = 0.5 * rand_state(rng, 3)
    bs = [0.5 * rand_state(rng, 3) for _ in range(m)]
    q = rng.dirichlet(np.ones(m))
    mix = sum(qi * b for qi, b in zip(q, bs))
    assert glb2_trace(a, mix) >= sum(qi * glb2_trace(a, b) for qi, b in zip(q, bs)) - 1e-9
    total = glb2_trace(a, sum(bs))
    assert all(glb2_trace(a, b) <= total + 1e-9 for b in bs)


@given(st.integers(0, 10_000), st.integers(1, 3), st.integers(2, 5))
def test_classical_subadditivity(seed, m, d):
    rng = np.random.default_rng(seed)
    a = np.diag(rng.random(d))
    bs = [np.diag(rng.random(d)) for _ in range(m)]
    assert glb2_trace(a, sum(bs)) <= sum(glb2_trace(a, b) for b in bs) + 1e-9


def test_gram_examples():
    vs = [np.eye(3)[k] for k in range(3)]
    for n in (1, 4):
        assert pure_gram_error(vs, [1 / 3] * 3, n) == pytest.approx(0, abs=1e-9)
    c = 0.6
    v2 = [np.array([1, 0]), np.array([c, math.sqrt(1 - c * c)])]
    assert pure_gram_error(v2, [0.5, 0.5], 1) == pytest.approx((1 - math.sqrt(1 - c * c)) / 2)
    assert pure_gram_error(v2, [0.5, 0.5], 2) == pytest.approx((1 - math.sqrt(1 - c ** 4)) / 2)
    with pytest.raises(PreconditionError):
        pure_gram_error([np.array([2.0, 0]), np.array([0, 1.0]), np.array([1.0, 0])],
                        [1 / 3] * 3, 1)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("seed", range(3))
def test_gram_matches_tensor(seed, n):
    rng = np.random.default_rng(seed)
    vs = [rand_vector(rng, 2) for _ in range(3)]
    w = rng.dirichlet(np.ones(3))
    full = Ensemble.from_states([matops.tensor_power(proj(v), n) for v in vs], w)
    assert pure_gram_error(vs, w, n) == pytest.approx(optimal_error(full), abs=1e-7)


def test_gram_dependent_vectors():
    vs = [KET0, KET1, PLUS, np.array([1, 1j]) / math.sqrt(2)]
    w = [0.25] * 4
    full = Ensemble.from_vectors(vs, w)
    assert pure_gram_error(vs, w, 1) == pytest.approx(optimal_error(full), abs=1e-7)


def test_glb_error_forms():
    ens = rand_ensemble(np.random.default_rng(7), 3, 2)
    pe_bar, glb_plain = glb_error_forms(ens)
    assert pe_bar == pytest.approx(optimal_error(ens), abs=1e-6)
    assert math.isfinite(glb_plain)
