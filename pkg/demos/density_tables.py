"""
Worst-case rural densities for LoRa and Sigfox
==============================================

Channel plans, regulatory duty cycles and coverage radii combine into
the number of devices and the traffic one gateway can serve per km^2.
"""

import sys

from lpwanplan import techplans

# Channel plans: LoRa EU mixes CSS and FSK channels
plan = techplans.builtin_plan("LoRa", "EU")
print(f"LoRa EU: {plan.channels} channels, {plan.aggregate_capacity} bit/s in total")

# Sigfox US/CA is tabulated with a total that differs from count * rate
for note in techplans.builtin_plan("Sigfox", "US/CA").discrepancies():
    print("note:", note)

# The whole table; duty cycle drives node density, not traffic density
techplans.to_csv(techplans.density_table(), sys.stdout)

# Sigfox radii for China and India are swapped in the printed source
for region in ("CN", "IN"):
    print(techplans.radius_discrepancy("Sigfox", region))
