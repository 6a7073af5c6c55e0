"""dB / dBm conversions.

All internal computation is carried out in linear SI units (watts, hertz,
meters, seconds, joules).  Decibel values exist only at I/O boundaries;
these helpers are the single place where the conversion happens.
"""

import math

__all__ = ["dbm_to_watts", "watts_to_dbm", "db_to_linear", "linear_to_db"]


def dbm_to_watts(p_dbm: float) -> float:
    """Convert a power level in dBm to watts."""
    return 1e-3 * 10.0 ** (p_dbm / 10.0)


def watts_to_dbm(p_w: float) -> float:
    """Convert a power in watts (> 0) to dBm."""
    if p_w <= 0.0:
        raise ValueError(f"power must be positive to express in dBm, got {p_w}")
    return 10.0 * math.log10(p_w / 1e-3)


def db_to_linear(x_db: float) -> float:
    """Convert a dB ratio to a linear ratio."""
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    """Convert a linear ratio (> 0) to dB."""
    if x <= 0.0:
        raise ValueError(f"ratio must be positive to express in dB, got {x}")
    return 10.0 * math.log10(x)
