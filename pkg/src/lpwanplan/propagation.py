"""Link-budget mathematics: channel capacity, free-space loss and range.

Antenna gains are fixed at 0 dBi and no terrain or clutter model is
applied. Coverage radii for other regions are obtained by scaling an
empirical anchor radius at constant received power (:func:`scale_range`).
"""

import math
from dataclasses import dataclass

from .units import SPEED_OF_LIGHT, amplitude_db, from_amplitude_db

__all__ = [
    "ChannelSpec",
    "LinkBudget",
    "shannon_capacity",
    "fspl_db",
    "max_range",
    "scale_range",
    "FSPL_CONSTANT_DB",
]

# 20 log10(4 pi / c) with d in km and f in MHz folded in (1e3 * 1e6)
FSPL_CONSTANT_DB = amplitude_db(4.0 * math.pi * 1e3 * 1e6 / SPEED_OF_LIGHT)


@dataclass(frozen=True)
class ChannelSpec:
    """Bandwidth in Hz and linear signal-to-noise power ratio."""

    bandwidth: float
    snr: float

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise ValueError(f"bandwidth must be > 0 Hz, got {self.bandwidth}")
        if not self.snr >= 0:
            raise ValueError(f"snr must be a linear ratio >= 0, got {self.snr}")


@dataclass(frozen=True)
class LinkBudget:
    """Transmit power and receiver sensitivity in dBm, carrier in MHz."""

    tx_power: float
    rx_sensitivity: float
    frequency: float

    def __post_init__(self):
        if not self.frequency > 0:
            raise ValueError(f"frequency must be > 0 MHz, got {self.frequency}")

    @property
    def budget_db(self):
        return self.tx_power - self.rx_sensitivity


def shannon_capacity(channel):
    """Shannon-Hartley capacity ``B log2(1 + S/N)`` in bit/s."""
    return channel.bandwidth * math.log2(1.0 + channel.snr)


def fspl_db(distance, frequency):
    """Free-space path loss in dB for ``distance`` km at ``frequency`` MHz.

    Equal to ``20 log10(4 pi d f / c)`` with SI units; the constant term
    evaluates to about 32.45 dB.
    """
    if not distance > 0:
        raise ValueError(f"distance must be > 0 km, got {distance}")
    if not frequency > 0:
        raise ValueError(f"frequency must be > 0 MHz, got {frequency}")
    return FSPL_CONSTANT_DB + amplitude_db(distance) + amplitude_db(frequency)


def max_range(budget):
    """Distance in km at which free-space loss consumes the whole budget."""
    allowed = budget.budget_db
    if not allowed > 0:
        raise ValueError(
            f"link budget must be positive, got {allowed} dB "
            f"(tx {budget.tx_power} dBm, sensitivity {budget.rx_sensitivity} dBm)"
        )
    return from_amplitude_db(
        allowed - FSPL_CONSTANT_DB - amplitude_db(budget.frequency)
    )


def scale_range(base, target):
    """Rescale an anchor radius to a new transmit power and frequency.

    Parameters
    ----------
    base : tuple
        ``(d_km, p_dbm, f_mhz)`` of the empirical anchor.
    target : tuple
        ``(p_dbm, f_mhz)`` to scale to.

    Returns
    -------
    float
        ``d * 10**((p_t - p_b) / 20) * f_b / f_t`` in km, which keeps the
        received power constant under free-space loss.
    """
    d_base, p_base, f_base = base
    p_target, f_target = target
    if not (d_base > 0 and f_base > 0 and f_target > 0):
        raise ValueError("distances and frequencies must be positive")
    if p_target == p_base and f_target == f_base:
        return float(d_base)
    return d_base * from_amplitude_db(p_target - p_base) * (f_base / f_target)
