import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from discrimlab import Ensemble

settings.register_profile("lab", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("lab")


def rand_state(rng, d, rank=None):
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def rand_vector(rng, d):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def rand_pure(rng, d):
    v = rand_vector(rng, d)
    return np.outer(v, v.conj())


def rand_ensemble(rng, r, d, pure=False, weighted=True):
    states = [rand_pure(rng, d) if pure else rand_state(rng, d) for _ in range(r)]
    w = rng.dirichlet(np.ones(r)) if weighted else rng.exponential(size=r) * 2.0
    return Ensemble.from_states(states, w)


def rand_diag_ensemble(rng, r, d):
    return Ensemble(tuple(np.diag(rng.random(d) / (r * d)).astype(complex) for _ in range(r)))


def ket(*amps):
    v = np.array(amps, dtype=complex)
    return v / np.linalg.norm(v)


def proj(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


KET0 = ket(1, 0)
KET1 = ket(0, 1)
PLUS = ket(1, 1)


def trine_vectors():
    return [ket(1, 0), ket(-0.5, np.sqrt(3) / 2), ket(-0.5, -np.sqrt(3) / 2)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)


def cvx_lub_trace(ops):
    """Independent LUB trace via a generic conic solver."""
    cp = pytest.importorskip("cvxpy")
    d = ops[0].shape[0]
    y = cp.Variable((d, d), hermitian=True)
    prob = cp.Problem(cp.Minimize(cp.real(cp.trace(y))), [y - a >> 0 for a in ops])
    prob.solve(solver="CLARABEL")
    return float(prob.value)
