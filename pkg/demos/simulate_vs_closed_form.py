"""Monte Carlo crossing times against the closed-form transform.

Simulates the log-GBM representation of the Bessel path, detects the
boundary crossing with a within-step bridge test (plain interpolation
systematically misses excursions and biases sigma high by O(sqrt(dt))),
and compares moment estimates with the exact transform values.

~30 s at the default settings below.
"""

import math

from rootbound.simulate import SimConfig, sample_hitting_times
from rootbound.transforms import BesselSpec, Boundary, mellin_transform

bnd = Boundary(b=0.25, c=1.0)
cfg = SimConfig(n_paths=40_000, seed=7, dt=2e-4)

for sign, s_grid in ((-1, (0.5, 1.0, 2.0)), (+1, (0.75, 1.5, 3.0))):
    spec = BesselSpec(nu=0.5, sign=sign)
    hits = sample_hitting_times(spec, bnd, cfg)
    y = bnd.b + hits.valid_sigma
    label = "negative" if sign < 0 else "positive"
    print(f"{label} index: {y.size} of {cfg.n_paths} paths crossed "
          f"(excluded {hits.excluded_fraction:.1e})")
    print(f"  {'s':>5} {'monte carlo':>14} {'closed form':>14} {'z':>6}")
    for s in s_grid:
        w = y ** (-s)
        mean = w.mean()
        se = w.std(ddof=1) / math.sqrt(w.size)
        closed = mellin_transform(spec, bnd, s)
        print(f"  {s:5.2f} {mean:14.6f} {closed:14.6f} {abs(mean - closed) / se:6.2f}")
    print()

print("z-scores should sit within +-2 for most seeds; the determinism")
print("contract makes this exact run reproducible from (seed, dt, n_paths)")
