"""Decoupling bounds: multi-hypothesis error from pairwise quantities.

Run: python demos/05_bound_suite.py
"""
import numpy as np

from discrimlab import Ensemble
from discrimlab.bounds import averaged_bounds, evaluate_bound_suite, nussbaum_split

rng = np.random.default_rng(5)
vecs = [rng.normal(size=3) + 1j * rng.normal(size=3) for _ in range(4)]
ens = Ensemble.from_vectors(vecs, rng.dirichlet(np.ones(4)))

# %% Every entry is an inequality lhs <= rhs with a slack; theorems must hold.
rep = evaluate_bound_suite(ens)
for e in rep.entries:
    if e.applicable:
        print(f"{e.kind:10s} slack {e.slack:+.3e}  {e.name}")
print("theorem violations:", len(rep.theorem_violations()))

# %% Averaged and composite alternatives: A against B_1 + B_2.
a, *bs = ens.hypotheses
for e in averaged_bounds(a, bs).entries:
    if e.applicable:
        print(f"averaged   slack {e.slack:+.3e}  {e.name}")

# %% Preferential split: P_e* <= 2 P_e*(first K) + P_e*(3 pooled, rest).
for k in range(1, ens.r + 1):
    lhs, rhs, _ = nussbaum_split(ens, k)
    print(f"split K={k}: {lhs:.6f} <= {rhs:.6f}")
