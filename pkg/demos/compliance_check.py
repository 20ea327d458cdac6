"""
Checking a transmission schedule against regional rules
=======================================================

A device that reports every 100 s in the EU 869.4-869.6 MHz sub-band,
then the same device moved to the 868.0-868.7 MHz gap, then a Japanese
device claiming short carrier sense.
"""

from lpwanplan.regulation import (
    TransmissionEvent, TransmissionSchedule, applicable_power_limit,
    check_schedule, duty_cycle, get_profile,
)

eu = get_profile("EU")
print("EU power at 869.5 MHz:", applicable_power_limit(eu, 869.5), "dBm")

hourly = [TransmissionEvent(100 * k, 0.5, 869.5, 125, 27) for k in range(36)]
print(f"worst hourly duty: {100 * duty_cycle(hourly, 3600):.2f} %")
report = check_schedule(eu, TransmissionSchedule(hourly))
print("overall:", report.overall)

# No printed duty rule covers 868.3 MHz, so the engine will not guess
gap = [TransmissionEvent(0, 0.1, 868.3, 125, 14)]
print("868.3 MHz:", check_schedule(eu, TransmissionSchedule(gap)).overall)

jp = get_profile("JP")
long_burst = TransmissionSchedule([TransmissionEvent(0, 0.5, 921, 125, 13)], variant="SCS")
rep = check_schedule(jp, long_burst)
v = rep.get("max_tx_on")
print(f"JP SCS: {v.measured} s on air vs {v.limit} s allowed -> {v.verdict}")
print(rep.to_json())
