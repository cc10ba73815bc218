"""Range-measurement geometry in the position plane.

A noisy range ``y = ||x_i - x_j|| + r`` with ``r in [r_lo, r_hi]`` places the
displacement ``x_i - x_j`` in an annulus.  The annulus is cut into ``M`` equal
angular sectors; each sector is outer-bounded by a trapezoid written as an
extended constrained zonotope (two edge-ray generators with one-sided ranges,
plus one bisector-slab constraint).  Sectors that meet the prior are merged into
a single wedge, and the neighbour's own uncertainty is absorbed by inflating the
annulus around the neighbour's set center.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import NoActiveSectorError, WindowTooWideError
from .zonotope import (
    ExtConstrainedZonotope,
    generalized_intersect,
    interval_hull,
    is_empty,
    linear_map,
    make_zonotope,
    radius_bound,
)

DEFAULT_SECTORS = 64
QUARTER_TURN = 0.5 * math.pi


@dataclass(frozen=True)
class RangeRing:
    anchor_point: np.ndarray
    R_lo: float
    R_hi: float

    def __post_init__(self):
        object.__setattr__(self, "anchor_point", np.asarray(self.anchor_point, dtype=float).reshape(2))
        if not 0.0 <= self.R_lo <= self.R_hi:
            raise ValueError(f"ring radii must satisfy 0 <= R_lo <= R_hi, got [{self.R_lo}, {self.R_hi}]")

    def contains(self, pts, tol=1e-9) -> np.ndarray:
        d = np.linalg.norm(np.atleast_2d(pts) - self.anchor_point, axis=1)
        return (d >= self.R_lo - tol) & (d <= self.R_hi + tol)


@dataclass(frozen=True)
class BearingInterval:
    theta_lo: float
    theta_hi: float

    def __post_init__(self):
        if self.theta_lo > self.theta_hi:
            raise ValueError("theta_lo > theta_hi")
        if self.span >= QUARTER_TURN:
            raise WindowTooWideError(f"bearing span {self.span:.4f} rad must be below pi/2")

    @property
    def span(self) -> float:
        return self.theta_hi - self.theta_lo


@dataclass(frozen=True)
class SectorWindow:
    """Run of consecutive sector indices ``q_lo, q_lo+1, ..., q_hi`` taken modulo M."""

    q_lo: int
    q_hi: int
    M: int
    wrap: bool
    contiguous: bool = True
    active: tuple = field(default=(), compare=False)

    @property
    def count(self) -> int:
        return (self.q_hi - self.q_lo) % self.M + 1

    @property
    def span(self) -> float:
        return 2.0 * math.pi * self.count / self.M

    @property
    def theta_lo(self) -> float:
        return 2.0 * math.pi * self.q_lo / self.M

    @property
    def theta_hi(self) -> float:
        return 2.0 * math.pi * (self.q_lo + self.count) / self.M


def ring_from_range(y_r, r_lo, r_hi, anchor) -> RangeRing:
    if r_lo > r_hi:
        raise ValueError("range noise bounds reversed")
    if y_r - r_lo < 0.0:
        raise ValueError(f"range {y_r} with noise floor {r_lo} implies a negative distance")
    return RangeRing(anchor, max(0.0, y_r - r_hi), y_r - r_lo)


def sector_zonotope(anchor, R_lo, R_hi, theta: BearingInterval) -> ExtConstrainedZonotope:
    """Trapezoid outer bound of the annulus sector between two bearings.

    Generators run along the two edge rays, with ranges ``[0, R_hi / cos(half)]``;
    the third (zero) generator parametrises the slab
    ``R_lo cos(half) <= <bisector, z - anchor> <= R_hi``.
    """
    if not 0.0 <= R_lo <= R_hi:
        raise ValueError("ring radii must satisfy 0 <= R_lo <= R_hi")
    anchor = np.asarray(anchor, dtype=float).reshape(2)
    half = 0.5 * theta.span
    cos_half = math.cos(half)
    mid = 0.5 * (theta.theta_lo + theta.theta_hi)
    H = np.array([math.cos(mid), math.sin(mid)])
    G = np.array([
        [math.cos(theta.theta_hi), math.cos(theta.theta_lo), 0.0],
        [math.sin(theta.theta_hi), math.sin(theta.theta_lo), 0.0],
    ])
    sigma1 = R_lo * cos_half + H @ anchor
    sigma2 = R_hi + H @ anchor
    A = np.array([[*(H @ G[:, :2]), sigma1 - sigma2]])
    b = np.array([sigma1 - H @ anchor])
    reach = R_hi / cos_half
    return make_zonotope(G, anchor, A, b, (np.zeros(3), np.array([reach, reach, 1.0])))


def _sector(ring: RangeRing, q: int, M: int) -> ExtConstrainedZonotope:
    step = 2.0 * math.pi / M
    return sector_zonotope(ring.anchor_point, ring.R_lo, ring.R_hi, BearingInterval(q * step, (q + 1) * step))


def segment_ring(ring: RangeRing, M: int = DEFAULT_SECTORS) -> list[ExtConstrainedZonotope]:
    """Sector ``q`` covers bearings ``[2 pi q / M, 2 pi (q + 1) / M]``."""
    if M < 8:
        raise ValueError(f"need at least 8 sectors, got {M}")
    return [_sector(ring, q, M) for q in range(M)]


class _LazySectors(Sequence):
    # same contents as segment_ring, built on first access
    def __init__(self, ring: RangeRing, M: int):
        if M < 8:
            raise ValueError(f"need at least 8 sectors, got {M}")
        self.ring, self.M, self._cache = ring, M, {}

    def __len__(self):
        return self.M

    def __getitem__(self, q):
        if q not in self._cache:
            self._cache[q] = _sector(self.ring, q, self.M)
        return self._cache[q]


def _candidate_sectors(ring: RangeRing, M: int, hull_lo, hull_hi) -> np.ndarray:
    # Sector q's trapezoid lies inside the cone between its edge rays, at distance
    # at most R_hi / cos(pi/M) from the apex; a sector whose cone or reach misses
    # the prior's bounding box cannot meet the prior.
    p = ring.anchor_point
    step = 2.0 * math.pi / M
    closest = np.clip(p, hull_lo, hull_hi)
    if np.linalg.norm(closest - p) > ring.R_hi / math.cos(0.5 * step) + 1e-9:
        return np.zeros(0, dtype=int)
    if np.all(closest == p):
        return np.arange(M)
    corners = np.array([[hull_lo[0], hull_lo[1]], [hull_hi[0], hull_lo[1]],
                        [hull_lo[0], hull_hi[1]], [hull_hi[0], hull_hi[1]]]) - p
    ang = np.arctan2(corners[:, 1], corners[:, 0])
    ref = math.atan2(closest[1] - p[1], closest[0] - p[0])
    rel = (ang - ref + math.pi) % (2.0 * math.pi) - math.pi
    lo_ang = ref + rel.min() - 1e-9
    hi_ang = ref + rel.max() + 1e-9
    q0 = math.floor(lo_ang / step)
    q1 = math.floor(hi_ang / step)
    return np.arange(q0, q1 + 1) % M


def _window_from_active(active: np.ndarray, M: int) -> SectorWindow:
    mask = np.zeros(M, dtype=bool)
    mask[active] = True
    idx = np.flatnonzero(mask)
    if idx.size == M:
        return SectorWindow(0, M - 1, M, False, True, tuple(idx.tolist()))
    # open the circle at the end of the largest run of inactive sectors
    gaps = (np.roll(idx, -1) - idx) % M
    gaps[gaps == 0] = M
    k = int(np.argmax(gaps))
    q_lo = int(idx[(k + 1) % idx.size])
    q_hi = int(idx[k])
    wrap = q_hi < q_lo
    count = (q_hi - q_lo) % M + 1
    return SectorWindow(q_lo, q_hi, M, wrap, count == idx.size, tuple(idx.tolist()))


def select_active_window(sectors, prior: ExtConstrainedZonotope, selector=None, ring: RangeRing | None = None) -> SectorWindow:
    """Smallest run of sectors (mod M) covering every sector that meets the prior.

    ``selector`` maps the prior's space onto the plane (default identity).  When
    ``ring`` is given, sectors whose cone misses the prior's bounding box are
    skipped without solving an LP; the result is the same.
    """
    M = len(sectors)
    T = np.eye(2) if selector is None else np.asarray(selector, dtype=float)
    if ring is not None:
        hull = interval_hull(linear_map(T, prior))
        candidates = _candidate_sectors(ring, M, hull.lo, hull.hi)
    else:
        candidates = np.arange(M)
    active = [int(q) for q in candidates if not is_empty(generalized_intersect(prior, sectors[q], T))]
    if not active:
        raise NoActiveSectorError("no sector of the ring intersects the prior")
    return _window_from_active(np.array(sorted(set(active))), M)


def merged_wedge(anchor, R_lo, R_hi, window: SectorWindow) -> ExtConstrainedZonotope:
    if window.span >= QUARTER_TURN:
        raise WindowTooWideError(f"window of {window.count} sectors spans {window.span:.4f} rad")
    return sector_zonotope(anchor, R_lo, R_hi, BearingInterval(window.theta_lo, window.theta_hi))


def inflate_ring(ring: RangeRing, radius: float) -> RangeRing:
    if radius < 0.0:
        raise ValueError("inflation radius must be nonnegative")
    return RangeRing(ring.anchor_point, max(0.0, ring.R_lo - radius), ring.R_hi + radius)


@dataclass(frozen=True)
class RelativeWedge:
    """Everything the relative update builds along the way (kept for logging)."""

    zonotope: ExtConstrainedZonotope
    ring: RangeRing
    window: SectorWindow
    radius: float


def relative_wedge(neighbor_posterior, y_r, r_lo, r_hi, prior, selector=None, M=DEFAULT_SECTORS) -> RelativeWedge:
    T = np.eye(2) if selector is None else np.asarray(selector, dtype=float)
    neighbor_pos = linear_map(T, neighbor_posterior)
    radius = radius_bound(neighbor_pos)
    ring = inflate_ring(ring_from_range(y_r, r_lo, r_hi, neighbor_pos.c), radius)
    sectors = _LazySectors(ring, M)
    window = select_active_window(sectors, prior, T, ring)
    Z = merged_wedge(ring.anchor_point, ring.R_lo, ring.R_hi, window)
    return RelativeWedge(Z, ring, window, radius)


def relative_measurement_set(neighbor_posterior, y_r, r_lo, r_hi, prior, selector=None, M=DEFAULT_SECTORS) -> ExtConstrainedZonotope:
    """Planar wedge containing ``(neighbor_posterior (+) ring) intersected with prior``."""
    return relative_wedge(neighbor_posterior, y_r, r_lo, r_hi, prior, selector, M).zonotope


def separation_holds(prior, ring: RangeRing, selector=None) -> bool:
    """Conservative check of ``d(prior) < R_lo < dist(center, prior)`` in the plane.

    The prior's diameter is over-estimated by its bounding-box diagonal and its
    distance from the ring center under-estimated by the box distance, so a True
    answer means the condition certainly holds.
    """
    T = np.eye(2) if selector is None else np.asarray(selector, dtype=float)
    hull = interval_hull(linear_map(T, prior))
    diam = float(np.linalg.norm(hull.hi - hull.lo))
    p = ring.anchor_point
    dist = float(np.linalg.norm(np.clip(p, hull.lo, hull.hi) - p))
    return diam < ring.R_lo < dist


def neighbour_compact(radius: float, y_r: float, ratio: float = 0.1) -> bool:
    """Neighbour uncertainty small against the measured range (``radius <= ratio * y_r``)."""
    return radius <= ratio * y_r
