"""Planar geometry for the source-position prior.

The prior support is a union of building footprints, optionally clipped by a
disc. Membership uses even-odd ray casting with boundary points counted as
inside; uniform sampling is rejection from the bounding box of the support.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from binloc.errors import SamplingError, ValidationError
from binloc.rng import AREA, RandomStream, random_stream

# draws allowed per requested point before the sampler gives up
REJECTION_BUDGET = 10**6
AREA_MC_POINTS = 10**6
_AREA_SEED = 20150101
_CHUNK = 200_000


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValidationError(f"point coordinates must be finite, got ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y


def _as_xy(points) -> np.ndarray:
    """Coerce a Point, an (x, y) pair or an (n, 2) array-like to a float (n, 2) array."""
    if isinstance(points, Point):
        return np.array([[points.x, points.y]])
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValidationError(f"expected (n, 2) coordinates, got shape {arr.shape}")
    return arr


def _shoelace(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _orient(ax, ay, bx, by, cx, cy) -> float:
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _segments_intersect(p1, p2, q1, q2) -> bool:
    d1 = _orient(*q1, *q2, *p1)
    d2 = _orient(*q1, *q2, *p2)
    d3 = _orient(*p1, *p2, *q1)
    d4 = _orient(*p1, *p2, *q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0:
        return True

    def on_seg(a, b, c, d):
        return d == 0 and min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])

    return on_seg(q1, q2, p1, d1) or on_seg(q1, q2, p2, d2) or on_seg(p1, p2, q1, d3) or on_seg(p1, p2, q2, d4)


@dataclass(frozen=True)
class Polygon:
    """Simple polygon; the vertex list is implicitly closed."""

    vertices: tuple[Point, ...]
    name: str = ""

    def __post_init__(self):
        verts = tuple(v if isinstance(v, Point) else Point(*map(float, v)) for v in self.vertices)
        if len(verts) >= 2 and verts[0] == verts[-1]:
            verts = verts[:-1]
        object.__setattr__(self, "vertices", verts)
        label = f"polygon {self.name!r}" if self.name else "polygon"
        if len(verts) < 3:
            raise ValidationError(f"{label} needs at least 3 vertices, got {len(verts)}")
        if not self._is_simple():
            raise ValidationError(f"{label} is self-intersecting")
        if abs(self.signed_area) <= 0.0:
            raise ValidationError(f"{label} has zero area")

    @classmethod
    def from_coords(cls, coords: Iterable[Sequence[float]], name: str = "") -> Polygon:
        return cls(tuple(Point(float(x), float(y)) for x, y in coords), name=name)

    @cached_property
    def array(self) -> np.ndarray:
        return np.array([[v.x, v.y] for v in self.vertices])

    @property
    def signed_area(self) -> float:
        return _shoelace(np.array([[v.x, v.y] for v in self.vertices]))

    @property
    def area(self) -> float:
        return abs(self.signed_area)

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        a = self.array
        return float(a[:, 0].min()), float(a[:, 1].min()), float(a[:, 0].max()), float(a[:, 1].max())

    def _is_simple(self) -> bool:
        v = [(p.x, p.y) for p in self.vertices]
        n = len(v)
        for i in range(n):
            a1, a2 = v[i], v[(i + 1) % n]
            for j in range(i + 1, n):
                if j == i or (j + 1) % n == i or j == (i + 1) % n:
                    continue
                if _segments_intersect(a1, a2, v[j], v[(j + 1) % n]):
                    return False
        return True

    def contains(self, points) -> np.ndarray:
        return points_in_polygon(points, self)


@dataclass(frozen=True)
class Disc:
    center: Point
    radius: float

    def __post_init__(self):
        if not isinstance(self.center, Point):
            object.__setattr__(self, "center", Point(*map(float, self.center)))
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValidationError(f"disc radius must be > 0, got {self.radius}")

    def contains(self, points) -> np.ndarray:
        xy = _as_xy(points)
        return np.hypot(xy[:, 0] - self.center.x, xy[:, 1] - self.center.y) <= self.radius


def _disc_overlaps_polygon(disc: Disc, poly: Polygon) -> bool:
    """True if the open disc and the polygon interior share positive area."""
    c = np.array([disc.center.x, disc.center.y])
    v = poly.array
    if np.any(np.hypot(*(v - c).T) < disc.radius):
        return True
    if points_in_polygon(c, poly)[0]:
        return True
    w = np.roll(v, -1, axis=0)
    e = w - v
    t = np.clip(np.einsum("ij,ij->i", c - v, e) / np.einsum("ij,ij->i", e, e), 0.0, 1.0)
    nearest = v + t[:, None] * e
    return bool(np.any(np.hypot(*(nearest - c).T) < disc.radius))


@dataclass(frozen=True)
class PriorRegion:
    """Union of polygons, intersected with ``disc`` when one is given."""

    polygons: tuple[Polygon, ...]
    disc: Disc | None = None
    _area_cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "polygons", tuple(self.polygons))
        if not self.polygons:
            raise ValidationError("prior region needs at least one polygon")
        if self.disc is not None and not any(_disc_overlaps_polygon(self.disc, p) for p in self.polygons):
            raise ValidationError(
                f"prior support is empty: no polygon overlaps the disc centred at "
                f"({self.disc.center.x:.1f}, {self.disc.center.y:.1f}) with radius {self.disc.radius:g} m"
            )

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        boxes = np.array([p.bbox for p in self.polygons])
        x0, y0 = boxes[:, 0].min(), boxes[:, 1].min()
        x1, y1 = boxes[:, 2].max(), boxes[:, 3].max()
        if self.disc is not None:
            c, r = self.disc.center, self.disc.radius
            x0, y0 = max(x0, c.x - r), max(y0, c.y - r)
            x1, y1 = min(x1, c.x + r), min(y1, c.y + r)
        return float(x0), float(y0), float(x1), float(y1)

    def contains(self, points) -> np.ndarray:
        xy = _as_xy(points)
        inside = np.zeros(len(xy), dtype=bool)
        for poly in self.polygons:
            inside |= points_in_polygon(xy, poly)
        if self.disc is not None:
            inside &= self.disc.contains(xy)
        return inside

    def _polygons_disjoint(self) -> bool:
        boxes = [p.bbox for p in self.polygons]
        for i, a in enumerate(boxes):
            for b in boxes[i + 1 :]:
                if not (a[2] < b[0] or b[2] < a[0] or a[3] < b[1] or b[3] < a[1]):
                    return False
        return True

    def support_area(self) -> float:
        """Area of the support in m^2.

        Exact (shoelace) for disc-free supports whose polygons have disjoint
        bounding boxes; otherwise a cached hit-fraction estimate from
        ``AREA_MC_POINTS`` bounding-box draws on a fixed private stream.
        """
        if "area" not in self._area_cache:
            if self.disc is None and self._polygons_disjoint():
                area = sum(p.area for p in self.polygons)
            else:
                x0, y0, x1, y1 = self.bbox
                rng = random_stream(_AREA_SEED, AREA)
                hits = 0
                for start in range(0, AREA_MC_POINTS, _CHUNK):
                    n = min(_CHUNK, AREA_MC_POINTS - start)
                    xy = np.column_stack((rng.uniform(x0, x1, n), rng.uniform(y0, y1, n)))
                    hits += int(self.contains(xy).sum())
                area = (x1 - x0) * (y1 - y0) * hits / AREA_MC_POINTS
            self._area_cache["area"] = area
        return self._area_cache["area"]


def points_in_polygon(points, poly: Polygon) -> np.ndarray:
    """Vectorised even-odd test; points on an edge or vertex count as inside."""
    xy = _as_xy(points)
    x, y = xy[:, 0], xy[:, 1]
    v = poly.array
    w = np.roll(v, -1, axis=0)
    scale = max(1.0, float(np.abs(v).max()))
    tol = 1e-12 * scale
    inside = np.zeros(len(xy), dtype=bool)
    boundary = np.zeros(len(xy), dtype=bool)
    for (ax, ay), (bx, by) in zip(v, w):
        crosses = (ay > y) != (by > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_int = ax + (y - ay) * (bx - ax) / (by - ay)
        inside ^= crosses & (x < x_int)
        cross = (bx - ax) * (y - ay) - (by - ay) * (x - ax)
        seg_len = math.hypot(bx - ax, by - ay)
        boundary |= (
            (np.abs(cross) <= tol * seg_len)
            & (x >= min(ax, bx) - tol)
            & (x <= max(ax, bx) + tol)
            & (y >= min(ay, by) - tol)
            & (y <= max(ay, by) + tol)
        )
    return inside | boundary


def point_in_polygon(p: Point, poly: Polygon) -> bool:
    return bool(points_in_polygon(p, poly)[0])


def region_contains(p: Point, region: PriorRegion) -> bool:
    return bool(region.contains(p)[0])


def sample_region_uniform(region: PriorRegion, rng: RandomStream, size: int | None = None):
    """Draw uniformly over the region support by bounding-box rejection.

    Returns a :class:`Point` when ``size`` is None, otherwise an ``(size, 2)``
    array. Raises :class:`SamplingError` if ``REJECTION_BUDGET`` consecutive
    draws are all rejected.
    """
    n = 1 if size is None else int(size)
    x0, y0, x1, y1 = region.bbox
    if not (x1 > x0 and y1 > y0):
        raise ValidationError("prior support has a degenerate bounding box")
    out = np.empty((n, 2))
    filled = 0
    misses = 0
    batch = max(64, 2 * n)
    while filled < n:
        xy = np.column_stack((rng.uniform(x0, x1, batch), rng.uniform(y0, y1, batch)))
        ok = region.contains(xy)
        hits = xy[ok]
        if len(hits) == 0:
            misses += batch
            if misses >= REJECTION_BUDGET:
                raise SamplingError(
                    f"no point accepted in {misses} draws from bbox "
                    f"[{x0:.1f}, {x1:.1f}] x [{y0:.1f}, {y1:.1f}]; the support is "
                    f"a negligible fraction of its bounding box"
                )
            batch = min(batch * 2, _CHUNK)
            continue
        misses = 0
        take = min(len(hits), n - filled)
        out[filled : filled + take] = hits[:take]
        filled += take
        rate = len(hits) / len(xy)
        batch = int(min(_CHUNK, max(64, 1.2 * (n - filled) / rate)))
    if size is None:
        return Point(float(out[0, 0]), float(out[0, 1]))
    return out


def to_wind_frame_xy(points, origin=(0.0, 0.0), alpha: float = 0.0) -> np.ndarray:
    """Translate by ``-origin`` and rotate by ``-alpha`` degrees; (n, 2) in, (n, 2) out."""
    xy = _as_xy(points)
    ox, oy = origin
    a = math.radians(alpha)
    c, s = math.cos(a), math.sin(a)
    dx, dy = xy[:, 0] - ox, xy[:, 1] - oy
    return np.column_stack((c * dx + s * dy, -s * dx + c * dy))


def from_wind_frame_xy(points, origin=(0.0, 0.0), alpha: float = 0.0) -> np.ndarray:
    """Inverse of :func:`to_wind_frame_xy`."""
    ox, oy = origin
    back = to_wind_frame_xy(points, (0.0, 0.0), -alpha)
    return back + np.array([ox, oy])


def to_wind_frame(p: Point, origin: Point = Point(0.0, 0.0), alpha: float = 0.0) -> Point:
    """Express ``p`` in the frame whose +x axis points along the mean wind."""
    x, y = to_wind_frame_xy(p, (origin.x, origin.y), alpha)[0]
    return Point(float(x), float(y))


def convex_hull(points) -> np.ndarray:
    """Andrew's monotone chain; counter-clockwise hull vertices without repetition."""
    xy = np.unique(_as_xy(points), axis=0)
    if len(xy) < 3:
        return xy
    pts = [tuple(p) for p in xy]

    def half(seq):
        h = []
        for p in seq:
            while len(h) >= 2 and _orient(*h[-2], *h[-1], *p) <= 0:
                h.pop()
            h.append(p)
        return h

    lower = half(pts)
    upper = half(reversed(pts))
    return np.array(lower[:-1] + upper[:-1])


def hull_area(points) -> float:
    hull = convex_hull(points)
    if len(hull) < 3:
        return 0.0
    return abs(_shoelace(hull))


def in_convex_hull(p, points) -> bool:
    hull = convex_hull(points)
    if len(hull) < 3:
        return False
    x, y = _as_xy(p)[0]
    w = np.roll(hull, -1, axis=0)
    cross = (w[:, 0] - hull[:, 0]) * (y - hull[:, 1]) - (w[:, 1] - hull[:, 1]) * (x - hull[:, 0])
    return bool(np.all(cross >= 0))
