"""
Link budgets, coverage radius and channel capacity
==================================================

How far a sub-GHz link reaches in free space, and how an empirical
anchor radius carries over to another power and carrier.
"""

from lpwanplan.propagation import (
    ChannelSpec, LinkBudget, fspl_db, max_range, scale_range, shannon_capacity,
)

# Free-space loss grows 20 dB per decade of distance
for d in (1, 10, 100):
    print(f"FSPL at {d:>3} km, 868 MHz: {fspl_db(d, 868):6.2f} dB")

# A 14 dBm transmitter and a -137 dBm receiver: 151 dB to spend
budget = LinkBudget(tx_power=14, rx_sensitivity=-137, frequency=868)
print(f"free-space range for {budget.budget_db} dB: {max_range(budget):.0f} km")

# Real rural coverage is far shorter; scale a 10 km anchor instead
for label, p, f in [("US/CA", 30, 915), ("China", 12.5, 780), ("India", 30, 866)]:
    print(f"LoRa {label:<6} radius: {scale_range((10.0, 16, 868), (p, f)):.2f} km")

# Shannon bound of a 125 kHz channel at 0 dB SNR
print(f"125 kHz at SNR 1: {shannon_capacity(ChannelSpec(125e3, 1.0)) / 1e3:.0f} kbit/s")
