"""Link-level electric energy model for one uplink message.

A message of fixed length is sent at the Shannon-limited rate for the chosen
SINR; the radio draws ``conv_factor`` electric watts per RF watt plus a
constant electronics overhead.  The per-message energy as a function of the
target SINR gamma is

    energy(gamma) = [ conv/gain * (P_I + P_N) * gamma + P_o ] * n_bits / (B * log2(1 + gamma))

which is unimodal in gamma; its minimum has a closed form through the
Lambert W function, implemented in :func:`optimal_operating_point`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .special_functions import lambert_w0
from .units import dbm_to_watts, db_to_linear

__all__ = [
    "RadioConfig",
    "LinkState",
    "OperatingPoint",
    "ContourResult",
    "airtime",
    "path_gain",
    "sinr_at",
    "electric_power",
    "energy",
    "minimum_energy",
    "optimal_operating_point",
    "restricted_energy",
    "fit_power_model",
    "energy_contour",
]

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class RadioConfig:
    """Link-budget constants, all in linear SI units.

    n_bits          message length in bits
    bandwidth_hz    channel bandwidth
    noise_w         noise power, watts
    pathloss_const  constant path-loss gain at 1 m, in (0, 1]
    pathloss_exp    path-loss exponent, must exceed 2 for finite moments
    conv_factor     electric watts drawn per RF watt transmitted
    overhead_w      electronics overhead during transmission, watts
    """

    n_bits: float = 144.0
    bandwidth_hz: float = 125e3
    noise_w: float = dbm_to_watts(-117.0)
    pathloss_const: float = db_to_linear(-26.0)
    pathloss_exp: float = 3.68
    conv_factor: float = 4.0
    overhead_w: float = 0.210

    def __post_init__(self):
        for name in ("n_bits", "bandwidth_hz", "noise_w", "pathloss_exp",
                     "conv_factor"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"RadioConfig.{name} must be positive")
        if not 0.0 < self.pathloss_const <= 1.0:
            raise ValueError("RadioConfig.pathloss_const must be in (0, 1]")
        if self.pathloss_exp <= 2.0:
            raise ValueError("RadioConfig.pathloss_exp must exceed 2")
        if self.overhead_w < 0.0:
            raise ValueError("RadioConfig.overhead_w must be non-negative")

    def with_(self, **kwargs) -> "RadioConfig":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class LinkState:
    """One channel realization: contact distance, fading factor, interference."""

    distance_m: float
    fading: float = 1.0
    interference_w: float = dbm_to_watts(-95.4)

    def __post_init__(self):
        if self.distance_m <= 0.0:
            raise ValueError("LinkState.distance_m must be positive")
        if self.fading < 0.0:
            raise ValueError("LinkState.fading must be non-negative")
        if self.interference_w < 0.0:
            raise ValueError("LinkState.interference_w must be non-negative")


@dataclass(frozen=True)
class OperatingPoint:
    """Transmit power, SINR, energy and airtime of one operating point.

    ``attained`` is False only in the zero-overhead limit, where the energy
    value is an infimum approached as the SINR goes to zero with unbounded
    airtime, not an operating point the radio can realize.
    """

    tx_power_w: float
    sinr: float
    energy_j: float
    airtime_s: float
    attained: bool = True


def airtime(cfg: RadioConfig, sinr: float) -> float:
    """Shortest time-on-air for one message at the given SINR (seconds)."""
    if sinr <= 0.0:
        raise ValueError(f"airtime: SINR must be positive, got {sinr}")
    return cfg.n_bits / (cfg.bandwidth_hz * math.log2(1.0 + sinr))


def path_gain(cfg: RadioConfig, link: LinkState) -> float:
    """Dimensionless link gain: pathloss_const * fading * distance^-exponent."""
    return cfg.pathloss_const * link.fading * link.distance_m ** (-cfg.pathloss_exp)


def sinr_at(cfg: RadioConfig, link: LinkState, tx_power_w: float) -> float:
    """SINR seen by the gateway for a given RF transmit power."""
    if tx_power_w < 0.0:
        raise ValueError("sinr_at: transmit power must be non-negative")
    return path_gain(cfg, link) * tx_power_w / (link.interference_w + cfg.noise_w)


def electric_power(cfg: RadioConfig, tx_power_w: float) -> float:
    """Electric power drawn while transmitting at the given RF power."""
    if tx_power_w < 0.0:
        raise ValueError("electric_power: transmit power must be non-negative")
    return cfg.conv_factor * tx_power_w + cfg.overhead_w


def _coefficients(cfg: RadioConfig, gain: float, interference_w: float):
    # slope and offset of energy * log2(1+gamma): a1 * gamma + a2
    a1 = cfg.conv_factor * cfg.n_bits * (interference_w + cfg.noise_w) / (
        cfg.bandwidth_hz * gain)
    a2 = cfg.n_bits * cfg.overhead_w / cfg.bandwidth_hz
    return a1, a2


def energy(cfg: RadioConfig, link: LinkState, sinr: float) -> float:
    """Electric energy (joules) to deliver one message at the given SINR."""
    if sinr <= 0.0:
        raise ValueError(f"energy: SINR must be positive, got {sinr}")
    gain = path_gain(cfg, link)
    if gain == 0.0:
        raise ValueError("energy: link has zero gain (deep fade)")
    a1, a2 = _coefficients(cfg, gain, link.interference_w)
    return (a1 * sinr + a2) / math.log2(1.0 + sinr)


def minimum_energy(cfg: RadioConfig, distance_m, fading, interference_w):
    """Vectorized minimum per-message energy over arrays of link draws.

    Same closed form as :func:`optimal_operating_point` but returning only
    the energy, broadcasting over numpy arrays.  Requires positive overhead
    and strictly positive fading entries.
    """
    r = np.asarray(distance_m, dtype=float)
    h = np.asarray(fading, dtype=float)
    p_i = np.asarray(interference_w, dtype=float)
    if np.any(h <= 0.0):
        raise ValueError("minimum_energy: fading must be strictly positive")
    gain = cfg.pathloss_const * h * r ** (-cfg.pathloss_exp)
    a1 = cfg.conv_factor * cfg.n_bits * (p_i + cfg.noise_w) / (
        cfg.bandwidth_hz * gain)
    a2 = cfg.n_bits * cfg.overhead_w / cfg.bandwidth_hz
    w = lambert_w0((a2 / a1 - 1.0) / math.e)
    return a1 * _LN2 * np.exp(1.0 + w)


def optimal_operating_point(cfg: RadioConfig, link: LinkState) -> OperatingPoint:
    """Energy-minimizing transmit power, SINR, energy and airtime.

    With zero overhead power the minimum is an infimum at vanishing SINR;
    the returned point then carries the limiting energy with
    ``attained=False``, zero transmit power and infinite airtime.
    """
    if link.fading <= 0.0:
        raise ValueError("optimal_operating_point: link unusable, fading is zero")
    gain = path_gain(cfg, link)
    a1, a2 = _coefficients(cfg, gain, link.interference_w)
    if cfg.overhead_w == 0.0:
        return OperatingPoint(tx_power_w=0.0, sinr=0.0, energy_j=a1 * _LN2,
                              airtime_s=math.inf, attained=False)
    w = lambert_w0((a2 / a1 - 1.0) / math.e)
    sinr_opt = math.exp(1.0 + w) - 1.0
    tx_opt = sinr_opt * (link.interference_w + cfg.noise_w) / gain
    energy_opt = a1 * _LN2 * math.exp(1.0 + w)
    return OperatingPoint(tx_power_w=tx_opt, sinr=sinr_opt,
                          energy_j=energy_opt, airtime_s=airtime(cfg, sinr_opt))


def restricted_energy(cfg: RadioConfig, link: LinkState, target_sinr: float,
                      airtime_s: float | None = None) -> float:
    """Energy when a target SINR is mandated by the modulation scheme.

    The airtime defaults to the Shannon bound for the target SINR; a longer
    airtime may be supplied, a shorter one is rejected.  The result is the
    raw linear-in-airtime cost and is only guaranteed to exceed the
    unrestricted minimum when the target is at or above the optimal SINR.
    """
    if target_sinr <= 0.0:
        raise ValueError("restricted_energy: target SINR must be positive")
    if link.fading <= 0.0:
        raise ValueError("restricted_energy: link unusable, fading is zero")
    t_min = airtime(cfg, target_sinr)
    if airtime_s is None:
        airtime_s = t_min
    elif airtime_s < t_min * (1.0 - 1e-12):
        raise ValueError(
            f"restricted_energy: airtime {airtime_s} below the Shannon bound "
            f"{t_min} for target SINR {target_sinr}")
    gain = path_gain(cfg, link)
    return (cfg.conv_factor / gain * (link.interference_w + cfg.noise_w)
            * target_sinr + cfg.overhead_w) * airtime_s


def fit_power_model(samples: Sequence[tuple[float, float]]):
    """Least-squares line through (rf_power_w, electric_power_w) samples.

    Returns (conv_factor, overhead_w, residual) where residual is the RMS
    misfit.  Needs at least two samples with distinct RF powers.
    """
    pts = np.asarray(samples, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
        raise ValueError("fit_power_model: need at least two (rf, electric) samples")
    x, y = pts[:, 0], pts[:, 1]
    sxx = float(np.sum((x - x.mean()) ** 2))
    if sxx == 0.0:
        raise ValueError("fit_power_model: all RF power values are identical")
    slope = float(np.sum((x - x.mean()) * (y - y.mean())) / sxx)
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (slope * x + intercept)
    return slope, intercept, float(np.sqrt(np.mean(resid ** 2)))


@dataclass(frozen=True)
class ContourResult:
    """Energy over a (distance, transmit power) grid plus the optimum curve."""

    r_m: np.ndarray          # shape (nr,)
    pt_w: np.ndarray         # shape (np,)
    energy_j: np.ndarray     # shape (nr, np)
    pt_opt_w: np.ndarray     # shape (nr,)
    energy_opt_j: np.ndarray  # shape (nr,)


def energy_contour(cfg: RadioConfig, r_grid, pt_grid, fading: float = 1.0,
                   interference_w: float | None = None) -> ContourResult:
    """Per-message energy over a distance x transmit-power grid.

    Also evaluates the closed-form optimal power and energy for every
    distance, the curve the grid minima converge to as the power grid is
    refined.
    """
    r = np.asarray(r_grid, dtype=float)
    pt = np.asarray(pt_grid, dtype=float)
    if r.size == 0 or pt.size == 0:
        raise ValueError("energy_contour: grids must be non-empty")
    if np.any(r <= 0.0) or np.any(pt <= 0.0):
        raise ValueError("energy_contour: grids must be positive")
    if fading <= 0.0:
        raise ValueError("energy_contour: fading must be positive")
    if interference_w is None:
        interference_w = LinkState(1.0).interference_w

    gain = cfg.pathloss_const * fading * r ** (-cfg.pathloss_exp)
    noise_itf = interference_w + cfg.noise_w
    sinr = gain[:, None] * pt[None, :] / noise_itf
    a2 = cfg.n_bits * cfg.overhead_w / cfg.bandwidth_hz
    a1 = cfg.conv_factor * cfg.n_bits * noise_itf / (cfg.bandwidth_hz * gain)
    grid = (a1[:, None] * sinr + a2) / np.log2(1.0 + sinr)

    pt_opt = np.empty_like(r)
    e_opt = np.empty_like(r)
    for i, ri in enumerate(r):
        opt = optimal_operating_point(
            cfg, LinkState(float(ri), fading, interference_w))
        pt_opt[i] = opt.tx_power_w
        e_opt[i] = opt.energy_j
    return ContourResult(r, pt, grid, pt_opt, e_opt)
