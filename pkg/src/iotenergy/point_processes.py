"""Gateway point processes: samplers, contact-distance laws, nearest queries.

Three placement models are supported at equal intensity lambda:

* ``ppp`` - homogeneous Poisson process, fully irregular;
* ``mhc`` - Matern hard-core type II, no two retained points closer than the
  hard-core distance delta, with lambda pinned to 1/(pi delta^2) by a dense
  parent process;
* ``tri`` - randomly shifted triangular lattice, the fully regular extreme
  whose cells are hexagons.

The contact distance is the distance from an arbitrary location to the
nearest gateway.  Its cumulative law is closed-form for ppp and tri; for mhc
it is expressed through a conditional retention intensity and evaluated by
quadrature of the resulting exponent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .special_functions import QuadSpec, integrate

__all__ = [
    "Window",
    "ProcessSpec",
    "PointSet",
    "sample_ppp",
    "sample_mhc",
    "sample_tri",
    "lens_area",
    "contact_cdf",
    "contact_pdf",
    "nearest_distances",
    "sample_contact_distances",
    "tri_lattice_side",
    "tri_breakpoints",
]

PROCESS_KINDS = ("ppp", "mhc", "tri")

# parent intensity multiplier: exp(-14) keeps the retained intensity within
# 1e-6 of the dense-parent limit 1/(pi delta^2)
MIN_PARENT_AREA_FACTOR = 14.0

# devices used for contact sampling stay this many mean cell radii away from
# the window edge (in units of 1/sqrt(pi*lambda))
CORE_INSET_FACTOR = 3.0


@dataclass(frozen=True)
class Window:
    """Axis-aligned rectangular simulation region, meters."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if self.x_max <= self.x_min or self.y_max <= self.y_min:
            raise ValueError("Window must have positive area")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    def expand(self, margin: float) -> "Window":
        return Window(self.x_min - margin, self.x_max + margin,
                      self.y_min - margin, self.y_max + margin)

    def inset(self, margin: float) -> "Window":
        return Window(self.x_min + margin, self.x_max - margin,
                      self.y_min + margin, self.y_max - margin)

    def contains(self, points: np.ndarray) -> np.ndarray:
        p = np.atleast_2d(points)
        return ((p[:, 0] >= self.x_min) & (p[:, 0] <= self.x_max)
                & (p[:, 1] >= self.y_min) & (p[:, 1] <= self.y_max))

    def sample_uniform(self, n: int, rng: np.random.Generator) -> np.ndarray:
        xy = rng.random((n, 2))
        xy[:, 0] = self.x_min + xy[:, 0] * self.width
        xy[:, 1] = self.y_min + xy[:, 1] * self.height
        return xy


@dataclass(frozen=True)
class ProcessSpec:
    """Gateway process choice with intensity in points per square meter.

    For the hard-core process the intensity is tied to the hard-core
    distance, intensity = 1/(pi * hardcore_m^2), and the parent intensity
    must satisfy parent * pi * hardcore^2 >= 14 so the dense-parent limit
    applies to within 1e-6.
    """

    kind: str
    intensity: float
    hardcore_m: float | None = None
    parent_intensity: float | None = None

    def __post_init__(self):
        if self.kind not in PROCESS_KINDS:
            raise ValueError(f"unknown process kind {self.kind!r}")
        if self.intensity <= 0.0:
            raise ValueError("intensity must be positive")
        if self.kind == "mhc":
            if self.hardcore_m is None or self.hardcore_m <= 0.0:
                raise ValueError("mhc requires a positive hard-core distance")
            tied = 1.0 / (math.pi * self.hardcore_m ** 2)
            if abs(self.intensity - tied) > 1e-12 * tied:
                raise ValueError(
                    "mhc intensity must equal 1/(pi*hardcore^2); "
                    f"got {self.intensity} vs {tied}")
            if self.parent_intensity is None:
                object.__setattr__(
                    self, "parent_intensity",
                    MIN_PARENT_AREA_FACTOR / (math.pi * self.hardcore_m ** 2))
            if (self.parent_intensity * math.pi * self.hardcore_m ** 2
                    < MIN_PARENT_AREA_FACTOR - 1e-9):
                raise ValueError(
                    "mhc parent intensity too low for the dense-parent limit")
        elif self.hardcore_m is not None or self.parent_intensity is not None:
            raise ValueError(f"{self.kind} takes no hard-core parameters")

    @classmethod
    def ppp(cls, intensity: float) -> "ProcessSpec":
        return cls("ppp", intensity)

    @classmethod
    def tri(cls, intensity: float) -> "ProcessSpec":
        return cls("tri", intensity)

    @classmethod
    def mhc(cls, intensity: float | None = None,
            hardcore_m: float | None = None,
            parent_intensity: float | None = None) -> "ProcessSpec":
        """Build from either the intensity or the hard-core distance."""
        if hardcore_m is None:
            if intensity is None:
                raise ValueError("mhc needs intensity or hardcore_m")
            hardcore_m = 1.0 / math.sqrt(math.pi * intensity)
        if intensity is None:
            intensity = 1.0 / (math.pi * hardcore_m ** 2)
        return cls("mhc", intensity, hardcore_m, parent_intensity)


@dataclass(frozen=True)
class PointSet:
    """Sampled gateway coordinates with their generating context."""

    points: np.ndarray          # shape (n, 2), meters
    window: Window
    spec: ProcessSpec | None = None
    seed: int | None = None

    def __len__(self) -> int:
        return len(self.points)


def sample_ppp(intensity: float, window: Window, seed: int) -> PointSet:
    """Homogeneous Poisson process on the window; deterministic per seed."""
    if intensity <= 0.0:
        raise ValueError("intensity must be positive")
    rng = np.random.default_rng(seed)
    pts = _ppp_points(intensity, window, rng)
    return PointSet(pts, window, ProcessSpec.ppp(intensity), seed)


def _ppp_points(intensity: float, window: Window,
                rng: np.random.Generator) -> np.ndarray:
    n = rng.poisson(intensity * window.area)
    return window.sample_uniform(n, rng)


def sample_mhc(spec: ProcessSpec, window: Window, seed: int) -> PointSet:
    """Matern type-II thinning of a dense parent Poisson process.

    Parents carry i.i.d. uniform marks and are generated on the window
    expanded by the hard-core distance so retention near the edge is
    unbiased; a parent survives only if no other parent within the
    hard-core distance has a smaller mark.
    """
    if spec.kind != "mhc":
        raise ValueError("sample_mhc requires an mhc ProcessSpec")
    rng = np.random.default_rng(seed)
    pts = _mhc_points(spec, window, rng)
    return PointSet(pts, window, spec, seed)


def _mhc_points(spec: ProcessSpec, window: Window,
                rng: np.random.Generator) -> np.ndarray:
    delta = spec.hardcore_m
    parent_win = window.expand(delta)
    parents = _ppp_points(spec.parent_intensity, parent_win, rng)
    marks = rng.random(len(parents))
    keep = np.ones(len(parents), dtype=bool)
    if len(parents) > 1:
        pairs = cKDTree(parents).query_pairs(delta, output_type="ndarray")
        if len(pairs):
            i, j = pairs[:, 0], pairs[:, 1]
            keep[np.where(marks[i] > marks[j], i, j)] = False
    retained = parents[keep]
    return retained[window.contains(retained)]


def tri_lattice_side(intensity: float) -> float:
    """Side length of the triangular lattice with the given intensity."""
    return math.sqrt(2.0 / (math.sqrt(3.0) * intensity))


def sample_tri(intensity: float, window: Window,
               offset: tuple[float, float] | None = None,
               seed: int | None = None) -> PointSet:
    """Triangular lattice clipped to the window.

    The translation offset is drawn uniformly over one lattice cell per seed
    when not supplied, which makes the process stationary as seen from any
    fixed location.
    """
    if intensity <= 0.0:
        raise ValueError("intensity must be positive")
    s = tri_lattice_side(intensity)
    b1 = np.array([s, 0.0])
    b2 = np.array([0.5 * s, 0.5 * math.sqrt(3.0) * s])
    if offset is None:
        rng = np.random.default_rng(seed)
        u1, u2 = rng.random(2)
        off = u1 * b1 + u2 * b2
    else:
        off = np.asarray(offset, dtype=float)

    # lattice index ranges covering the window corners, padded by one cell
    corners = np.array([[window.x_min, window.y_min],
                        [window.x_min, window.y_max],
                        [window.x_max, window.y_min],
                        [window.x_max, window.y_max]]) - off
    basis = np.column_stack([b1, b2])
    idx = np.linalg.solve(basis, corners.T).T
    i_lo, j_lo = np.floor(idx.min(axis=0)).astype(int) - 1
    i_hi, j_hi = np.ceil(idx.max(axis=0)).astype(int) + 1
    ii, jj = np.meshgrid(np.arange(i_lo, i_hi + 1), np.arange(j_lo, j_hi + 1),
                         indexing="ij")
    pts = (off[None, :] + ii.reshape(-1, 1) * b1[None, :]
           + jj.reshape(-1, 1) * b2[None, :])
    pts = pts[window.contains(pts)]
    return PointSet(pts, window, ProcessSpec.tri(intensity), seed)


# ---------------------------------------------------------------------------
# Analytic contact-distance laws
# ---------------------------------------------------------------------------

def lens_area(r, intensity: float):
    """Overlap area between the contact ball of radius r and the hard-core
    ball of radius delta = 1/sqrt(pi*intensity) centered r away.

    Equals pi*r^2 while the contact ball fits inside the hard-core ball
    (r below delta/2) and the asymmetric two-circle lens beyond.
    """
    if intensity <= 0.0:
        raise ValueError("intensity must be positive")
    r_arr = np.asarray(r, dtype=float)
    scalar = r_arr.ndim == 0
    r_arr = np.atleast_1d(r_arr)
    if np.any(r_arr < 0.0):
        raise ValueError("radius must be non-negative")
    out = _lens_area_arr(r_arr, intensity)
    return float(out[0]) if scalar else out


def _lens_area_arr(r: np.ndarray, lam: float) -> np.ndarray:
    breakpoint_ = 1.0 / (2.0 * math.sqrt(math.pi * lam))
    inv_pl = 1.0 / (math.pi * lam)
    out = math.pi * r * r
    m = r >= breakpoint_
    if np.any(m):
        rm = r[m]
        x = 2.0 * math.pi * lam * rm * rm
        arg = np.clip(breakpoint_ / rm, -1.0, 1.0)
        out[m] = (rm * rm * np.arccos((x - 1.0) / x)
                  + inv_pl * np.arccos(arg)
                  - breakpoint_ * np.sqrt(np.maximum(4.0 * rm * rm - inv_pl, 0.0)))
    return out


def _retention_intensity(r: np.ndarray, lam: float) -> np.ndarray:
    # conditional intensity of retained hard-core points at distance r
    return lam / (1.0 - lam * _lens_area_arr(r, lam))


def _mhc_exponent_scalar(r: float, lam: float, spec: QuadSpec) -> float:
    bp = 1.0 / (2.0 * math.sqrt(math.pi * lam))

    def g(t: float) -> float:
        return 2.0 * math.pi * t * float(
            _retention_intensity(np.array([t]), lam)[0])

    if r <= bp:
        return integrate(g, 0.0, r, spec)
    return integrate(g, 0.0, bp, spec) + integrate(g, bp, r, spec)


def _mhc_exponent_sorted(r_sorted: np.ndarray, lam: float) -> np.ndarray:
    """Cumulative exponent integral at ascending radii.

    Composite 15-point Gauss-Kronrod panels between consecutive radii (and
    the lens breakpoint); panel widths are tiny relative to the integrand
    scale, so the rule is effectively exact.
    """
    from .special_functions import _GK15

    bp = 1.0 / (2.0 * math.sqrt(math.pi * lam))
    bounds = np.unique(np.concatenate([[0.0, bp], r_sorted]))
    a = bounds[:-1]
    half = 0.5 * np.diff(bounds)
    mid = a + half
    acc = np.zeros(len(half))
    for node, _, wk in _GK15:
        t = mid + half * node
        acc += wk * 2.0 * math.pi * t * _retention_intensity(t, lam)
    seg = acc * half
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    return np.interp(r_sorted, bounds, cum)


def tri_breakpoints(intensity: float) -> tuple[float, float]:
    """Inradius and circumradius of the lattice's hexagonal cell."""
    r1 = math.sqrt(1.0 / (2.0 * math.sqrt(3.0) * intensity))
    r2 = math.sqrt(2.0 / (3.0 * math.sqrt(3.0) * intensity))
    return r1, r2


def _tri_cdf_arr(r: np.ndarray, lam: float) -> np.ndarray:
    r1, r2 = tri_breakpoints(lam)
    out = np.minimum(math.pi * lam * r * r, 1.0)
    m = (r > r1) & (r <= r2)
    if np.any(m):
        rm = r[m]
        rsq = rm * rm
        arg = np.sqrt(np.clip(1.0 / (2.0 * math.sqrt(3.0) * lam * rsq), 0.0, 1.0))
        out[m] = (math.pi * lam * rsq
                  + np.sqrt(np.maximum(6.0 * math.sqrt(3.0) * lam * rsq - 3.0, 0.0))
                  - 6.0 * lam * rsq * np.arccos(arg))
    out[r > r2] = 1.0
    return out


def _tri_pdf_arr(r: np.ndarray, lam: float) -> np.ndarray:
    r1, r2 = tri_breakpoints(lam)
    out = 2.0 * math.pi * lam * r
    m = (r > r1) & (r <= r2)
    if np.any(m):
        rm = r[m]
        arg = np.sqrt(np.clip(1.0 / (2.0 * math.sqrt(3.0) * lam * rm * rm), 0.0, 1.0))
        out[m] = 2.0 * math.pi * lam * rm - 12.0 * lam * rm * np.arccos(arg)
    out[r > r2] = 0.0
    return out


def contact_cdf(spec: ProcessSpec, r, quad: QuadSpec | None = None):
    """P(contact distance <= r) for the given process; scalar or array r."""
    r_arr = np.asarray(r, dtype=float)
    scalar = r_arr.ndim == 0
    r_arr = np.atleast_1d(r_arr)
    if np.any(r_arr < 0.0):
        raise ValueError("radius must be non-negative")
    lam = spec.intensity
    if spec.kind == "ppp":
        out = -np.expm1(-lam * math.pi * r_arr * r_arr)
    elif spec.kind == "tri":
        out = _tri_cdf_arr(r_arr, lam)
    else:
        if scalar:
            expo = _mhc_exponent_scalar(float(r_arr[0]), lam,
                                        quad or QuadSpec())
            out = np.array([-math.expm1(-expo)])
        else:
            order = np.argsort(r_arr)
            expo = np.empty_like(r_arr)
            expo[order] = _mhc_exponent_sorted(r_arr[order], lam)
            out = -np.expm1(-expo)
    return float(out[0]) if scalar else out


def contact_pdf(spec: ProcessSpec, r, quad: QuadSpec | None = None):
    """Contact-distance density for the given process; scalar or array r."""
    r_arr = np.asarray(r, dtype=float)
    scalar = r_arr.ndim == 0
    r_arr = np.atleast_1d(r_arr)
    if np.any(r_arr < 0.0):
        raise ValueError("radius must be non-negative")
    lam = spec.intensity
    if spec.kind == "ppp":
        out = 2.0 * math.pi * lam * r_arr * np.exp(-lam * math.pi * r_arr * r_arr)
    elif spec.kind == "tri":
        out = _tri_pdf_arr(r_arr, lam)
    else:
        if scalar:
            expo = np.array([_mhc_exponent_scalar(float(r_arr[0]), lam,
                                                  quad or QuadSpec())])
        else:
            order = np.argsort(r_arr)
            expo = np.empty_like(r_arr)
            expo[order] = _mhc_exponent_sorted(r_arr[order], lam)
        out = (2.0 * math.pi * r_arr * _retention_intensity(r_arr, lam)
               * np.exp(-expo))
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Queries and contact-distance sampling
# ---------------------------------------------------------------------------

def nearest_distances(gateways: PointSet | np.ndarray, devices) -> np.ndarray:
    """Euclidean distance from each device to its nearest gateway."""
    pts = gateways.points if isinstance(gateways, PointSet) else np.asarray(gateways)
    if len(pts) == 0:
        raise ValueError("nearest_distances: no gateways")
    dev = np.atleast_2d(np.asarray(devices, dtype=float))
    d, _ = cKDTree(pts).query(dev)
    return d


def sample_contact_distances(spec: ProcessSpec, n: int,
                             rng: np.random.Generator,
                             devices_per_realization: int = 1000) -> np.ndarray:
    """Draw n contact distances from the process's stationary contact law.

    ppp and tri use exact inverse-CDF transforms (the tri branch beyond the
    cell inradius is inverted by bisection); mhc falls back to direct
    geometric simulation with interior-only devices, which samples the true
    process rather than the approximate analytic law.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    lam = spec.intensity
    if spec.kind == "ppp":
        u = rng.random(n)
        return np.sqrt(-np.log1p(-u) / (math.pi * lam))
    if spec.kind == "tri":
        return _tri_inverse_cdf(rng.random(n), lam)

    delta = spec.hardcore_m
    inset = CORE_INSET_FACTOR / math.sqrt(math.pi * lam)
    win = Window(0.0, 20.0 * delta, 0.0, 20.0 * delta)
    core = win.inset(inset)
    out = []
    remaining = n
    while remaining > 0:
        m = min(devices_per_realization, remaining)
        gws = _mhc_points(spec, win, rng)
        if len(gws) == 0:
            continue
        dev = core.sample_uniform(m, rng)
        d, _ = cKDTree(gws).query(dev)
        out.append(d)
        remaining -= m
    return np.concatenate(out)


def _tri_inverse_cdf(u: np.ndarray, lam: float) -> np.ndarray:
    r1, r2 = tri_breakpoints(lam)
    f1 = math.pi * lam * r1 * r1       # cdf value at the inradius
    out = np.sqrt(u / (math.pi * lam))
    m = u > f1
    if np.any(m):
        target = u[m]
        lo = np.full(target.shape, r1)
        hi = np.full(target.shape, r2)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            below = _tri_cdf_arr(mid, lam) < target
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        out[m] = 0.5 * (lo + hi)
    return out
