"""
Trading coverage radius against duty cycle
==========================================

Bigger cells need fewer gateways but squeeze more devices into each
channel. Past the feasibility boundary no number of gateways helps.
"""

import sys

import numpy as np

from lpwanplan import costmodel

s = costmodel.REFERENCE_SCENARIO
print(f"{s.devices:.0f} devices over {s.area:g} km^2, {s.channels} channels")

for d in (0.5, 1.0, 2.0):
    print(f"d = {d} km: feasible for alpha < {costmodel.feasibility_bound(s, d):.5f}")

best = costmodel.min_cost(s, np.linspace(0.1, 3.0, 30), np.linspace(1e-4, 1e-2, 100))
print(f"cheapest: d = {best.radius:.2f} km, alpha = {best.duty_cycle:.4f}, "
      f"{best.gateways} gateways, cost {best.total_cost:,.0f}")

# A few rows of the surface, as CSV for plotting elsewhere
costmodel.to_csv(costmodel.cost_surface(s, [1.0, 2.0], [0.001, 0.002, 0.005]), sys.stdout)
