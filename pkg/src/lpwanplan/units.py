"""Decibel and unit conversions shared by every module.

All base-10 logarithms in the package go through :func:`db` / :func:`undb`
so that rounding behaviour is identical everywhere.
"""

import math

SPEED_OF_LIGHT = 299_792_458.0  # m/s

__all__ = [
    "SPEED_OF_LIGHT",
    "db",
    "undb",
    "dbm_to_mw",
    "mw_to_dbm",
    "amplitude_db",
    "from_amplitude_db",
]


def db(ratio):
    """Power ratio -> dB."""
    return 10.0 * math.log10(ratio)


def undb(value_db):
    """dB -> power ratio."""
    return 10.0 ** (value_db / 10.0)


def amplitude_db(ratio):
    """Amplitude (field) ratio -> dB, i.e. ``20 log10``."""
    return 20.0 * math.log10(ratio)


def from_amplitude_db(value_db):
    return 10.0 ** (value_db / 20.0)


def dbm_to_mw(p_dbm):
    return undb(p_dbm)


def mw_to_dbm(p_mw):
    if p_mw <= 0:
        raise ValueError(f"power must be positive, got {p_mw} mW")
    return db(p_mw)
