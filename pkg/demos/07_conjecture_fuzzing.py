"""Randomized search for counterexamples to conjectured constants.

Run: python demos/07_conjecture_fuzzing.py
"""
from discrimlab import fuzz

# %% A campaign samples ensembles from a seeded stream; ratios above the constant are findings.
spec = fuzz.SampleSpec(dim=2, r=3, kind="mixed-wishart", seed=0)
for conj in ("conj2.2", "claim2", "mixedbound"):
    rec = fuzz.fuzz_conjecture(conj, spec, 300)
    print(f"{conj:10s} worst ratio {rec.worst_ratio:.4f} (constant {rec.constant}) "
          f"at seed {rec.worst_seed}, exceedances {rec.exceed_count}")

# %% Any trial is replayable from its seed.
rec = fuzz.fuzz_conjecture("claim2", spec, 50, recheck="none")
print("replay matches:", fuzz.replay("claim2", spec, rec.worst_seed) == rec.worst_ratio)

# %% The multiplicative-constant grid for the one-vs-rest conjecture.
rec = fuzz.fuzz_conjecture("claim3", spec, 200)
for key, v in rec.per_constant.items():
    print(f"  constants {key:>4s}: worst {v['worst_ratio']:.3f}, violation rate {v['violation_rate']:.3f}")

# %% Explicit counterexamples: pairwise sums fail to bound the error against B_1 + B_2.
for eps in (1e-2, 1e-3, 1e-4):
    lhs, rhs, ratio = fuzz.counterexample_wrong1(eps)
    print(f"eps={eps:g}: lhs {lhs:.3e}, rhs {rhs:.3e}, rhs/lhs {ratio:.3e}")
v = fuzz.counterexample_wrong2(1e-3)
print("normalized variant violated:", v.violated, "by factor", round(v.factor, 1))
