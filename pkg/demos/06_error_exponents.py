"""Finite-n error exponents for i.i.d. copies.

Run: python demos/06_error_exponents.py
"""
import math

import numpy as np

from discrimlab.asymptotics import averaged_iid_series, exponent_series, multi_chernoff

# %% Pure binary qubits with overlap c: the Gram path is exact up to large n.
c = 0.5
vecs = [np.array([1.0, 0.0]), np.array([c, math.sqrt(1 - c * c)])]
est = exponent_series([np.outer(v, v) for v in vecs], [0.5, 0.5], 200)
print("pure pair slope", est.slope, "expected log c^2 =", math.log(c * c), est.method)

# %% Mixed qubit triple: slope sits between -C and -C/2 (C = multi-Chernoff bound).
rng = np.random.default_rng(1)


def rand_state(d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = g @ g.conj().T
    return m / np.trace(m).real


states = [rand_state(2) for _ in range(3)]
est = exponent_series(states, [1 / 3] * 3, 12)
print("multi-Chernoff C", multi_chernoff(states)[0])
print("triple slope", est.slope, "window", (est.lower_envelope, est.half_envelope),
      "slack", est.slack, est.verdict)
for pt in est.series:
    print(f"  n={pt.n:2d}  P_e*={pt.p_error:.3e}")

# %% Averaged alternative with pure rho: the slope approaches -min_i C(rho, sigma_i).
rho = np.outer(vecs[1], vecs[1]).astype(complex)
avg = averaged_iid_series(rho, states[:2], 0.5, [0.5, 0.5], 40)
print("averaged slope", avg.slope, "target", -min(avg.notes["divergences"]),
      "tight", avg.notes.get("tight"))
