"""Optimal multi-hypothesis discrimination with a checkable certificate.

Run: python demos/01_optimal_discrimination.py
"""
import numpy as np

from discrimlab import Ensemble
from discrimlab.discrimination import (binary_error, classical_error, optimal_povm,
                                       pure_binary_error, verify_ykl)

# %% Trine: three symmetric qubit states, equal priors. Optimum is 1/3.
angles = 2 * np.pi * np.arange(3) / 3
trine = Ensemble.from_vectors([np.array([np.cos(t / 2), np.sin(t / 2)]) for t in angles],
                              [1 / 3] * 3)
res = optimal_povm(trine)
print("trine P_e*           ", res.p_error.primal, "gap", res.p_error.gap)

# %% The returned POVM is certified by the YKL conditions on Y = sum A_k E_k.
ykl = verify_ykl(trine, res.povm)
print("YKL slackness        ", ykl.slackness_residual, "min feasibility", ykl.min_feasibility)

# %% Two hypotheses have a closed form; the SDP reproduces it.
a, b = trine.hypotheses[:2]
pair = Ensemble((a, b))
print("binary closed form   ", binary_error(a, b)[0], "SDP", optimal_povm(pair).p_error.primal)
print("pure-pair formula    ", pure_binary_error(1 / 3, 1 / 3, 0.25))

# %% Commuting (diagonal) hypotheses reduce to a classical max-likelihood rule.
rng = np.random.default_rng(0)
diag = Ensemble(tuple(np.diag(rng.random(4) / 8).astype(complex) for _ in range(3)))
print("diagonal: classical  ", classical_error(diag), "SDP", optimal_povm(diag).p_error.primal)
