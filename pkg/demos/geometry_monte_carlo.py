"""
Pair distances in a square, analytically and by simulation
==========================================================

The probability that two uniform points of an h x h field are within d
of each other sets how many transmitters can share one channel.
"""

import numpy as np

from lpwanplan import capacity, mcsim

h, d = 100.0, 2.0
F = capacity.distance_cdf(d, h)
print(f"P(dist <= {d}) in a {h:g} km square: {F:.6f}")
print(f"expected successful transmitters: {1 / F:.1f} (geometric), "
      f"{(1 - F) / F:.1f} (sum from i = 1)")

# Per km^2 the count approaches 1 / (pi d^2) as the field grows
for ratio in (5, 20, 100):
    n_c = capacity.expected_concurrent_transmitters(d, ratio * d)
    print(f"h/d = {ratio:>3}: {n_c / (ratio * d) ** 2:.5f} per km^2 "
          f"(limit {capacity.asymptotic_channel_density(d):.5f})")

# A million sampled pairs agree with the closed form
cfg = mcsim.SimConfig(side=1.0, exclusion=1.0, n=1_000_000, seed=7, workers=4)
print(f"KS distance: {mcsim.ks_distance(cfg):.5f}")
print(f"mean distance: {mcsim.mean_pair_distance(cfg).estimate:.5f} (exact 0.52141)")

# Streaming points and admitting those clear of all earlier ones
counts = {mode: np.mean([
    mcsim.simulate_admission(mcsim.SimConfig(h, d, seed=s, mode=mode)).estimate
    for s in range(10)]) for mode in mcsim.MODES}
for mode, c in counts.items():
    print(f"{mode:>13}: {c:.1f} admitted on average (1/F = {1 / F:.1f})")
