import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from discrimlab import matops
from discrimlab.divergences import (chernoff, d_max, fidelity, fidelity_pair, fvdg_chain, q_s,
                                    rank_one_f2_bound)
from discrimlab.errors import DomainError, PreconditionError
from discrimlab.lattice import glb2_trace

from conftest import KET0, KET1, PLUS, proj, rand_pure, rand_state, rand_vector

D1 = np.diag([0.75, 0.25])
D2 = np.diag([0.25, 0.75])


def grid_qmin(a, b, n=1001):
    """Oracle: brute-force grid over s with scipy-free eigen-powers."""
    return min(q_s(a, b, s) for s in np.linspace(0, 1, n))


def test_q_s_examples():
    rho = rand_state(np.random.default_rng(0), 3)
    for s in (0, 0.3, 1):
        assert q_s(rho, rho, s) == pytest.approx(1, abs=1e-10)
    assert q_s(proj(KET0), proj(KET1), 0.5) == pytest.approx(0, abs=1e-12)
    assert q_s(D1, D2, 0.5) == pytest.approx(np.sqrt(3) / 2, abs=1e-12)


def test_q_s_endpoint_convention():
    a = np.diag([0.5, 0.0])
    b = np.diag([0.3, 0.7])
    # Tr A^0 B with A^0 the support projection
    assert q_s(a, b, 0) == pytest.approx(0.3)
    assert q_s(a, b, 1) == pytest.approx(0.5)


def test_chernoff_examples():
    rho = rand_state(np.random.default_rng(1), 2)
    res = chernoff(rho, rho)
    assert res.q_min == pytest.approx(1, abs=1e-9) and res.divergence == pytest.approx(0, abs=1e-9)
    psi, phi = rand_vector(np.random.default_rng(2), 3), rand_vector(np.random.default_rng(3), 3)
    res = chernoff(proj(psi), proj(phi))
    assert res.q_min == pytest.approx(abs(np.vdot(psi, phi)) ** 2, abs=1e-9)
    res = chernoff(D1, D2)
    assert res.s_star == pytest.approx(0.5, abs=1e-6)
    assert res.q_min == pytest.approx(np.sqrt(3) / 2, abs=1e-12)
    assert res.q_min == pytest.approx(grid_qmin(D1, D2), abs=1e-9)


def test_chernoff_zero_operator():
    res = chernoff(D1, np.zeros((2, 2)))
    assert res.q_min == 0 and math.isinf(res.divergence)


def test_chernoff_psd_gate():
    with pytest.raises(DomainError):
        chernoff(np.diag([1.0, -1.0]), D1)


@given(st.integers(0, 10_000), st.integers(2, 4))
def test_chernoff_below_grid(seed, d):
    rng = np.random.default_rng(seed)
    a, b = rand_state(rng, d), 0.5 * rand_state(rng, d)
    res = chernoff(a, b)
    assert res.divergence == pytest.approx(-math.log(res.q_min))
    assert res.q_min <= grid_qmin(a, b, 201) + 1e-9


def test_fidelity_examples():
    rho = rand_state(np.random.default_rng(4), 3)
    assert fidelity(rho, rho) == pytest.approx(1, abs=1e-8)
    assert fidelity(proj(KET0), proj(KET1)) == pytest.approx(0, abs=1e-12)
    assert fidelity(D1, D2) == pytest.approx(np.sqrt(3) / 2, abs=1e-12)


@given(st.integers(0, 10_000), st.integers(1, 4))
def test_fidelity_two_formulas(seed, d):
    rng = np.random.default_rng(seed)
    a, b = rand_state(rng, d), 0.3 * rand_state(rng, d)
    f1, f2 = fidelity_pair(a, b)
    assert f1 == pytest.approx(f2, abs=1e-8)


def test_d_max_examples():
    rho = rand_state(np.random.default_rng(5), 2)
    assert d_max(rho, rho) == pytest.approx(0, abs=1e-9)
    assert d_max(proj(KET0), np.eye(2) / 2) == pytest.approx(math.log(2))
    assert d_max(proj(KET0), proj(KET1)) == math.inf


@given(st.integers(0, 10_000), st.floats(0.1, 10))
def test_d_max_scaling_and_domination(seed, c):
    rng = np.random.default_rng(seed)
    a, b = rand_state(rng, 3), rand_state(rng, 3)
    dm = d_max(a, b)
    assert d_max(a, c * b) == pytest.approx(dm - math.log(c), abs=1e-9)
    assert matops.min_eig(math.exp(dm) * b - a) >= -1e-9


def test_fvdg_examples():
    rho = rand_state(np.random.default_rng(6), 2)
    ch = fvdg_chain(rho, rho)
    assert np.allclose(ch.terms, (1, 1, 1, math.sqrt(2), math.sqrt(2)), atol=1e-8)
    ch = fvdg_chain(proj(KET0), proj(KET1))
    assert np.allclose(ch.terms, 0, atol=1e-12)


@given(st.integers(0, 10_000), st.integers(2, 4))
def test_fvdg_ordering(seed, d):
    rng = np.random.default_rng(seed)
    ch = fvdg_chain(0.6 * rand_state(rng, d), 0.4 * rand_state(rng, d))
    assert min(ch.slacks) >= -1e-9


def test_rank_one_f2_examples():
    assert rank_one_f2_bound(proj(KET0), proj(KET0)) == pytest.approx((1, 1))
    lhs, rhs = rank_one_f2_bound(proj(KET0), proj(KET1))
    assert lhs == pytest.approx(0, abs=1e-12) and rhs == pytest.approx(0, abs=1e-12)
    lhs, rhs = rank_one_f2_bound(0.5 * proj(KET0), 0.5 * proj(PLUS))
    assert lhs == pytest.approx((1 - math.sqrt(0.5)) / 2, abs=1e-12)
    assert rhs == pytest.approx(0.25, abs=1e-12)
    with pytest.raises(PreconditionError):
        rank_one_f2_bound(np.eye(2) / 2, proj(KET0))


@given(st.integers(0, 10_000), st.integers(2, 4))
def test_rank_one_f2_property(seed, d):
    rng = np.random.default_rng(seed)
    lhs, rhs = rank_one_f2_bound(0.4 * rand_pure(rng, d), 0.6 * rand_state(rng, d))
    assert lhs <= rhs + 1e-9


@given(st.integers(0, 10_000), st.sampled_from([0, 0.25, 0.5, 0.75, 1]))
def test_binary_error_below_qs(seed, s):
    rng = np.random.default_rng(seed)
    a, b = 0.7 * rand_state(rng, 3), 0.3 * rand_state(rng, 3)
    assert glb2_trace(a, b) <= q_s(a, b, s) + 1e-9


@given(st.integers(0, 10_000))
def test_fidelity_squared_below_qmin(seed):
    rng = np.random.default_rng(seed)
    a, b = rand_state(rng, 3), rand_state(rng, 3)
    assert fidelity(a, b) ** 2 <= chernoff(a, b).q_min + 1e-9


@given(st.integers(0, 10_000), st.integers(1, 4), st.floats(0, 1))
def test_q_s_tensor_multiplicative(seed, n, s):
    rng = np.random.default_rng(seed)
    a, b = rand_state(rng, 2), rand_state(rng, 2)
    lhs = q_s(matops.tensor_power(a, n), matops.tensor_power(b, n), s)
    assert lhs == pytest.approx(q_s(a, b, s) ** n, rel=1e-7)


@given(st.integers(0, 10_000))
def test_fidelity_subadditive(seed):
    rng = np.random.default_rng(seed)
    a = rand_state(rng, 3)
    bs = [0.5 * rand_state(rng, 3) for _ in range(3)]
    assert fidelity(a, sum(bs)) <= sum(fidelity(a, b) for b in bs) + 1e-9
