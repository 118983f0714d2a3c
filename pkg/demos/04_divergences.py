"""Chernoff divergence, fidelity and the Fuchs-van de Graaf chain.

Run: python demos/04_divergences.py
"""
import numpy as np

from discrimlab.divergences import chernoff, d_max, fidelity, fvdg_chain, q_s

rho = np.array([[0.7, 0.2], [0.2, 0.3]], dtype=complex)
sigma = np.array([[0.4, -0.1j], [0.1j, 0.6]], dtype=complex)

# %% Q_s = Tr A^s B^(1-s) is log-convex; its minimum defines the Chernoff divergence.
res = chernoff(rho, sigma)
print("Q_min, s*, C       ", res.q_min, res.s_star, res.divergence)
print("Q_s on a coarse grid", [round(q_s(rho, sigma, s), 6) for s in np.linspace(0, 1, 5)])

# %% Fidelity and the chain P_e* <= F <= ... <= sqrt(Tr(A+B)) sqrt(P_e*).
a, b = 0.5 * rho, 0.5 * sigma
print("F(A,B)             ", fidelity(a, b))
chain = fvdg_chain(a, b)
print("chain terms        ", [round(t, 8) for t in chain.terms])
print("all slacks >= 0    ", all(s >= -1e-12 for s in chain.slacks))

# %% Max-relative entropy: log of the smallest lambda with A <= lambda B.
print("D_max(rho||sigma)  ", d_max(rho, sigma))
