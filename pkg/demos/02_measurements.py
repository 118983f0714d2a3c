"""Pretty good and square measurements, and Tyson's two-sided approximant.

Run: python demos/02_measurements.py
"""
import numpy as np

from discrimlab import Ensemble
from discrimlab.discrimination import optimal_error
from discrimlab.povm import gamma, gamma_star, povm_error, pretty_good, sq_operators, square_povm


def rand_state(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = g @ g.conj().T
    return m / np.trace(m).real


rng = np.random.default_rng(3)
ens = Ensemble.from_states([rand_state(rng, 3) for _ in range(4)], rng.dirichlet(np.ones(4)))

# %% Closed-form measurements are never better than the optimum.
pe = optimal_error(ens)
print("optimal P_e*        ", pe)
print("PGM error           ", povm_error(ens, pretty_good(ens)))
print("SQ error            ", povm_error(ens, square_povm(ens)))

# %% Gamma* sandwiches the optimum within a factor 2, and SQ attains Gamma*.
gs = gamma_star(ens)
print("Gamma* <= P_e* <= 2 Gamma*:", gs, "<=", pe, "<=", 2 * gs)
print("Gamma(SQ) - Gamma*  ", gamma(ens, sq_operators(ens)) - gs)

# %% Identical pure states: Gamma* = 1 - 1/sqrt(r).
v = np.array([1.0, 0.0, 0.0])
for r in (2, 3, 4):
    same = Ensemble.from_vectors([v] * r, [1 / r] * r)
    print(f"identical r={r}: Gamma* = {gamma_star(same):.12f}, 1 - 1/sqrt(r) = {1 - r ** -0.5:.12f}")
