"""Fading and interference models.

Fading is Rayleigh in amplitude, i.e. the power factor h is unit-mean
exponential, or a deterministic constant for controlled experiments.

Band-level interference is pluggable because real spectrum measurements are
site-specific: a constant power, an empirical CDF table of (power_dbm, cdf)
knots, or a lognormal law.  The default is a constant at -95.4 dBm.  A
SYNTHETIC example table with that mean is bundled for exercising the
empirical-CDF path; it is generated data, not a measurement campaign.

The mean of 1/h under exponential fading diverges, so every consumer of
E[1/h] in this package conditions on h >= h_min (default 0.01); the cutoff
is an explicit configuration value echoed in all outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .special_functions import QuadSpec, integrate, integrate_semi_infinite
from .units import dbm_to_watts, watts_to_dbm

__all__ = [
    "DEFAULT_H_MIN",
    "DEFAULT_INTERFERENCE_DBM",
    "FadingModel",
    "InterferenceModel",
    "sample_fading",
    "sample_interference",
    "mean_interference",
    "truncated_inv_fading_mean",
    "load_interference_table",
    "synthetic_interference_table",
]

DEFAULT_H_MIN = 0.01
DEFAULT_INTERFERENCE_DBM = -95.4


@dataclass(frozen=True)
class FadingModel:
    """Power fading factor law: unit-mean exponential or a constant."""

    kind: str                      # "exponential_unit" | "deterministic"
    value: float = 1.0             # constant for the deterministic kind

    def __post_init__(self):
        if self.kind not in ("exponential_unit", "deterministic"):
            raise ValueError(f"unknown fading kind {self.kind!r}")
        if self.kind == "deterministic" and self.value < 0.0:
            raise ValueError("deterministic fading must be non-negative")

    @classmethod
    def exponential(cls) -> "FadingModel":
        return cls("exponential_unit")

    @classmethod
    def deterministic(cls, value: float) -> "FadingModel":
        return cls("deterministic", value)


@dataclass(frozen=True)
class InterferenceModel:
    """Interference power law: constant, empirical CDF table, or lognormal.

    The empirical table rows are (power_dbm, cdf), strictly increasing in
    both columns and spanning essentially [0, 1]; sampling interpolates the
    inverse CDF linearly in the dB domain.
    """

    kind: str                          # "constant" | "empirical_cdf" | "lognormal"
    power_w: float = 0.0               # constant kind
    table: np.ndarray | None = None    # empirical kind, shape (n, 2)
    mu_dbm: float = 0.0                # lognormal kind
    sigma_db: float = 0.0

    def __post_init__(self):
        if self.kind == "constant":
            if self.power_w < 0.0:
                raise ValueError("constant interference must be non-negative")
        elif self.kind == "empirical_cdf":
            t = np.asarray(self.table, dtype=float)
            if t.ndim != 2 or t.shape[1] != 2 or len(t) < 2:
                raise ValueError("empirical table needs (n >= 2, 2) rows")
            if np.any(np.diff(t[:, 0]) <= 0.0) or np.any(np.diff(t[:, 1]) <= 0.0):
                raise ValueError("empirical table must increase strictly in "
                                 "both power and cdf")
            if t[0, 1] < 0.0 or t[-1, 1] > 1.0:
                raise ValueError("empirical cdf column must stay within [0, 1]")
            if t[0, 1] > 0.01 or t[-1, 1] < 0.99:
                raise ValueError("empirical cdf must span [~0, ~1]")
            object.__setattr__(self, "table", t)
        elif self.kind == "lognormal":
            if self.sigma_db < 0.0:
                raise ValueError("lognormal sigma must be non-negative")
        else:
            raise ValueError(f"unknown interference kind {self.kind!r}")

    @classmethod
    def constant(cls, power_w: float) -> "InterferenceModel":
        return cls("constant", power_w=power_w)

    @classmethod
    def constant_dbm(cls, power_dbm: float = DEFAULT_INTERFERENCE_DBM
                     ) -> "InterferenceModel":
        return cls("constant", power_w=dbm_to_watts(power_dbm))

    @classmethod
    def from_table(cls, table) -> "InterferenceModel":
        return cls("empirical_cdf", table=np.asarray(table, dtype=float))

    @classmethod
    def lognormal(cls, mu_dbm: float, sigma_db: float) -> "InterferenceModel":
        return cls("lognormal", mu_dbm=mu_dbm, sigma_db=sigma_db)

    def describe(self) -> str:
        if self.kind == "constant":
            dbm = watts_to_dbm(self.power_w) if self.power_w > 0 else -math.inf
            return f"constant {dbm:.2f} dBm ({self.power_w:.6e} W)"
        if self.kind == "empirical_cdf":
            return (f"empirical cdf, {len(self.table)} knots over "
                    f"[{self.table[0, 0]:.1f}, {self.table[-1, 0]:.1f}] dBm")
        return f"lognormal mu {self.mu_dbm:.2f} dBm, sigma {self.sigma_db:.2f} dB"


def sample_fading(model: FadingModel, rng: np.random.Generator,
                  size: int | None = None, minimum: float = 0.0):
    """Draw fading factors, optionally conditioned on h >= minimum.

    For the exponential law the conditional draw uses memorylessness
    (minimum plus a fresh exponential), which is exact.  A deterministic
    value below the minimum is an error rather than an endless rejection.
    """
    if minimum < 0.0:
        raise ValueError("minimum must be non-negative")
    n = 1 if size is None else size
    if model.kind == "deterministic":
        if model.value < minimum:
            raise ValueError(
                f"deterministic fading {model.value} below cutoff {minimum}")
        out = np.full(n, model.value)
    else:
        out = minimum - np.log1p(-rng.random(n))
    return float(out[0]) if size is None else out


def sample_interference(model: InterferenceModel, rng: np.random.Generator,
                        size: int | None = None):
    """Draw interference powers in watts."""
    n = 1 if size is None else size
    if model.kind == "constant":
        out = np.full(n, model.power_w)
    elif model.kind == "empirical_cdf":
        t = model.table
        u = np.clip(rng.random(n), t[0, 1], t[-1, 1])
        dbm = np.interp(u, t[:, 1], t[:, 0])
        out = 1e-3 * 10.0 ** (dbm / 10.0)
    else:
        dbm = rng.normal(model.mu_dbm, model.sigma_db, n)
        out = 1e-3 * 10.0 ** (dbm / 10.0)
    return float(out[0]) if size is None else out


def mean_interference(model: InterferenceModel,
                      quad: QuadSpec | None = None) -> float:
    """Expected interference power in watts."""
    if model.kind == "constant":
        return model.power_w
    if model.kind == "lognormal":
        scale = math.log(10.0) / 10.0
        return 1e-3 * math.exp(model.mu_dbm * scale
                               + 0.5 * (model.sigma_db * scale) ** 2)
    t = model.table
    spec = quad or QuadSpec(abs_tol=1e-18, rel_tol=1e-12)

    def inv_cdf_watts(u: float) -> float:
        dbm = float(np.interp(u, t[:, 1], t[:, 0]))
        return 1e-3 * 10.0 ** (dbm / 10.0)

    # probability mass clamped to the end knots plus the interior integral
    lo, hi = t[0, 1], t[-1, 1]
    return (lo * inv_cdf_watts(lo) + (1.0 - hi) * inv_cdf_watts(hi)
            + integrate(inv_cdf_watts, lo, hi, spec))


def truncated_inv_fading_mean(h_min: float,
                              quad: QuadSpec | None = None) -> float:
    """Conditional mean of 1/h given h >= h_min under unit exponential h.

    The unconditional mean diverges at h -> 0; this truncated form is the
    finite stand-in used by the expected-energy formulas.
    """
    if h_min <= 0.0:
        raise ValueError("h_min must be positive")
    spec = quad or QuadSpec(abs_tol=1e-300, rel_tol=1e-12)
    numerator = integrate_semi_infinite(
        lambda h: math.exp(-h) / h, h_min, spec, scale=max(h_min, 1.0))
    return numerator / math.exp(-h_min)


def load_interference_table(path) -> InterferenceModel:
    """Read a CSV with header power_dbm,cdf into an empirical model."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header.replace(" ", "") != "power_dbm,cdf":
            raise ValueError(
                f"{path}: expected header 'power_dbm,cdf', got {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected two columns")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return InterferenceModel.from_table(np.array(rows))


def synthetic_interference_table(mean_dbm: float = DEFAULT_INTERFERENCE_DBM,
                                 sigma_db: float = 4.0,
                                 knots: int = 33) -> InterferenceModel:
    """Bundled SYNTHETIC empirical table: lognormal shape, watt-domain mean
    forced to ``mean_dbm``.  Stands in for unavailable band measurements so
    the empirical-CDF code path can be exercised end to end.
    """
    scale = math.log(10.0) / 10.0
    mu = mean_dbm - 0.5 * sigma_db ** 2 * scale
    z = np.linspace(-3.8, 3.8, knots)
    dbm = mu + sigma_db * z
    cdf = 0.5 * (1.0 + np.array([math.erf(v / math.sqrt(2.0)) for v in z]))
    return InterferenceModel.from_table(np.column_stack([dbm, cdf]))


def bundled_interference_table_path() -> str:
    """Filesystem path of the packaged synthetic interference table."""
    return str(resources.files("iotenergy").joinpath(
        "data/synthetic_interference_cdf.csv"))
