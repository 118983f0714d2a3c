"""Least upper and greatest lower bounds in the trace ordering.

Run: python demos/03_lattice.py
"""
import numpy as np

from discrimlab import matops
from discrimlab.lattice import dmax_radius, glb2, glb2_trace, glb_sdp, lub2, lub2_trace, lub_sdp

# %% Two operators: closed forms (A + B +- |A - B|)/2, checked against the SDP.
a = np.diag([1.0, 0.0]).astype(complex)
plus = np.array([1, 1]) / np.sqrt(2)
b = np.outer(plus, plus).astype(complex)
print("Tr LUB closed/SDP ", lub2_trace(a, b), lub_sdp([a, b]).trace_value)
print("Tr GLB closed/SDP ", glb2_trace(a, b), glb_sdp([a, b]).trace_value)

# %% The GLB of two PSD operators need not be PSD.
x, y = np.array([1, 1], dtype=complex), np.array([1, 1j])
g = glb2(np.outer(x, x.conj()), np.outer(y, y.conj()))
print("min eig of GLB    ", matops.min_eig(g), "(1 - sqrt 2 =", 1 - np.sqrt(2), ")")

# %% For r > 2 the LUB is an SDP; its trace is the optimal success probability.
angles = 2 * np.pi * np.arange(3) / 3
trine = [matops.projector(np.array([np.cos(t / 2), np.sin(t / 2)])) / 3 for t in angles]
res = lub_sdp(trine)
print("trine Tr LUB      ", res.trace_value, "gap", res.dual_gap)

# %% log Tr LUB of unit-trace states is their max-relative-entropy radius.
radius, center = dmax_radius([3 * t for t in trine])
print("D_max radius      ", radius, "center trace", np.trace(center).real)
print("two-state LUB     ", np.round(lub2(a, b).real, 6).tolist())
