"""Lines in convex bodies and progressions in finite tori.

First, a slab holding half the volume of an isotropic body: as dimension
grows, random lines see either all of their chord in the slab or none of it.
Second, the discrete analogue: arithmetic progressions of length p in
(Z/pZ)^2 against a random half set.
"""

from radon_sampling import (
    TorusConfig,
    make_isotropic_body,
    run_torus_experiment,
    run_zero_one_experiment,
)
from radon_sampling.torus_sim import random_half_set

for kind in ("ball", "cube"):
    for n in (10, 100, 1000):
        rep = run_zero_one_experiment(make_isotropic_body(kind, n), 1000, seed=5)
        ex = rep.extras
        print(f"{kind:4s} n={n:4d}: chord ratio in {{0,1}} for {ex['fraction_in_01']:.3f} of lines")

cfg = TorusConfig(31, 2)
res = run_torus_experiment(cfg, random_half_set(cfg, seed=5))
print(f"\n(Z/31Z)^2, |A| = {res['set_size']}: every progression checked")
print(f"  P(count far from p/2) = {res['probability']:.4f}")
print(f"  literal bound {res['literal_bound']:.4f}, Chebyshev bound {res['chebyshev_bound']:.4f}")
