"""Numerical looks at the estimates behind well-posedness.

Each check reports ratios of the two sides of an inequality over random
inputs.  A bounded estimate shows up as ratios that do not grow when the
inputs are rescaled or the frequency lattice is refined.
"""
from kp5 import verify as v

res = v.check_resonance_identity(20_000, seed=1)
print(f"resonance factorisation: max relative error {res.max_rel_error:.1e}, "
      f"lower-bound violations {res.bound_violations}")

lem = v.calculus_lemma_sweep()
print(f"calculus lemma: largest ratio {lem.max:.2f} over {lem.samples} cases")

kato = v.kato_ratio(s=1.0, ensemble=10, seed=0)
print(f"trace smoothing of the free flow: ratios in [{kato.min:.3f}, {kato.max:.3f}], "
      f"spread {kato.growth:.2f} across dyadic rescalings")

for name, fn in (("X^{s+a,-b}", v.bilinear_ratio), ("weighted", v.weighted_bilinear_ratio)):
    rep = fn(1.0, 0.3, 0.45, grids=(8, 16), trials=20)
    print(f"bilinear estimate into {name}: max per lattice {rep.detail['max_per_grid']}, growth {rep.growth:.2f}")
