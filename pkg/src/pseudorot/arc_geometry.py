"""Polyline essential arcs in the band and the operations on them.

Arcs run from the bottom line ``t = 0`` to the top line ``t = 1``.  All
regions are closed: a point within ``tol`` of an arc belongs to both
sides, and two arcs closer than ``tol`` intersect.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import shapely
import shapely.affinity
from shapely.geometry import LineString, Point, Polygon

from .band_maps import AnyMap
from .errors import InternalCheckError, InvalidInputError, NonGenericInputError

TAU_GEO = 1e-9
DELTA_IMG = 1e-3

_CHUNK = 2_000_000


@dataclass(frozen=True, eq=False)
class EssentialArc:
    """Simple polyline from ``t = 0`` to ``t = 1`` with interior in ``0 < t < 1``."""

    vertices: np.ndarray
    tol: float = TAU_GEO

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 2:
            raise InvalidInputError("an arc needs at least two (x, t) vertices")
        if abs(v[0, 1]) > self.tol or abs(v[-1, 1] - 1) > self.tol:
            raise InvalidInputError("arc must start on t = 0 and end on t = 1")
        v[0, 1], v[-1, 1] = 0.0, 1.0
        keep = np.ones(len(v), dtype=bool)
        keep[1:] = np.any(np.diff(v, axis=0) != 0, axis=1)
        v = v[keep]
        inner = v[1:-1, 1]
        if np.any(inner <= 0) or np.any(inner >= 1):
            raise InvalidInputError("interior vertices must satisfy 0 < t < 1")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        if not self.line.is_simple:
            raise InvalidInputError("arc polyline is not simple")

    @property
    def line(self) -> LineString:
        cached = self.__dict__.get("_line")
        if cached is None:
            cached = LineString(self.vertices)
            object.__setattr__(self, "_line", cached)
        return cached

    @property
    def x(self) -> np.ndarray:
        return self.vertices[:, 0]

    @property
    def t(self) -> np.ndarray:
        return self.vertices[:, 1]

    @property
    def bottom(self) -> np.ndarray:
        return self.vertices[0]

    def translate(self, dx: float) -> "EssentialArc":
        return EssentialArc(self.vertices + np.array([dx, 0.0]), self.tol)

    def same_as(self, other: "EssentialArc") -> bool:
        return self.vertices.shape == other.vertices.shape and np.allclose(
            self.vertices, other.vertices, rtol=0, atol=self.tol)

    def to_json(self) -> dict:
        return {"vertices": self.vertices.tolist()}

    @classmethod
    def from_json(cls, data, tol: float = TAU_GEO) -> "EssentialArc":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(np.asarray(data["vertices"], dtype=float), tol)


def vertical_arc(x: float = 0.0, tol: float = TAU_GEO) -> EssentialArc:
    return EssentialArc(np.array([[x, 0.0], [x, 1.0]]), tol)


@dataclass(frozen=True)
class RightRegion:
    arc: EssentialArc

    def contains(self, points) -> np.ndarray:
        return in_right_region(self.arc, points)


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    return pts.reshape(-1, 2)


def distance_to_arc(arc: EssentialArc, points) -> np.ndarray:
    pts = _as_points(points)
    return shapely.distance(shapely.points(pts), arc.line)


def _crossings_left(arc: EssentialArc, pts: np.ndarray) -> np.ndarray:
    a, b = arc.vertices[:-1], arc.vertices[1:]
    t_lo = np.minimum(a[:, 1], b[:, 1])
    t_hi = np.maximum(a[:, 1], b[:, 1])
    dt = b[:, 1] - a[:, 1]
    safe_dt = np.where(dt == 0, 1.0, dt)
    counts = np.empty(len(pts), dtype=np.int64)
    step = max(1, _CHUNK // max(1, len(a)))
    for s in range(0, len(pts), step):
        px = pts[s:s + step, 0:1]
        pt = pts[s:s + step, 1:2]
        # half-open rule: an edge counts iff its lower endpoint is strictly below the ray
        straddle = (t_lo < pt) & (pt <= t_hi)
        x_cross = a[:, 0] + (pt - a[:, 1]) * (b[:, 0] - a[:, 0]) / safe_dt
        counts[s:s + step] = np.count_nonzero(straddle & (x_cross < px), axis=1)
    return counts


def in_right_region(arc: EssentialArc, points) -> np.ndarray | bool:
    """Membership in the closed region on the right of ``arc``."""
    scalar = np.ndim(points) == 1
    pts = _as_points(points)
    if np.any(pts[:, 1] < -arc.tol) or np.any(pts[:, 1] > 1 + arc.tol):
        raise InvalidInputError("points must lie in the band")
    odd = _crossings_left(arc, pts) % 2 == 1
    on_floor = pts[:, 1] <= 0
    odd[on_floor] = pts[on_floor, 0] >= arc.bottom[0]
    inside = odd | (distance_to_arc(arc, pts) <= arc.tol)
    return bool(inside[0]) if scalar else inside


def arc_distance(a: EssentialArc, b: EssentialArc) -> float:
    return float(a.line.distance(b.line))


def arcs_disjoint(a: EssentialArc, b: EssentialArc, tol: float | None = None) -> bool:
    tol = a.tol if tol is None else tol
    return arc_distance(a, b) > tol


def arc_less(a: EssentialArc, b: EssentialArc) -> bool:
    """``a < b``: ``b`` lies in the interior of the right region of ``a``."""
    if not arcs_disjoint(a, b):
        raise InvalidInputError("arc order is only defined for disjoint arcs")
    flags = in_right_region(a, b.vertices)
    if flags.all():
        return True
    if not flags.any():
        return False
    raise InternalCheckError("disjoint arcs with vertices on both sides")


def _left_polygon(arc: EssentialArc, x_left: float) -> Polygon:
    ring = np.vstack([arc.vertices, [[x_left, 1.0], [x_left, 0.0]]])
    return Polygon(ring)


def _polygons(geom) -> list[Polygon]:
    if isinstance(geom, Polygon):
        return [geom]
    return [g for g in getattr(geom, "geoms", []) if isinstance(g, Polygon)]


def vee(a: EssentialArc, b: EssentialArc) -> EssentialArc:
    """Boundary of the left-unbounded component of the common left region.

    The result is contained in ``a`` union ``b`` and its right region
    contains both right regions.
    """
    tol = max(a.tol, b.tol)
    if a.same_as(b):
        return a
    overlap = a.line.intersection(b.line)
    if overlap.length > tol:
        raise NonGenericInputError(f"arcs share segments of total length {overlap.length:.3g}")
    x_left = min(a.x.min(), b.x.min()) - 1.0
    common = _left_polygon(a, x_left).intersection(_left_polygon(b, x_left))
    anchor = Point(x_left, 0.5)
    parts = [g for g in _polygons(common) if g.distance(anchor) <= tol]
    if len(parts) != 1:
        raise InternalCheckError("no unique left component in the common left region")
    ring = np.asarray(parts[0].exterior.coords)[:-1]
    n = len(ring)

    def artificial(p, q) -> bool:
        return ((abs(p[1]) <= tol and abs(q[1]) <= tol)
                or (abs(p[1] - 1) <= tol and abs(q[1] - 1) <= tol)
                or (abs(p[0] - x_left) <= tol and abs(q[0] - x_left) <= tol))

    real = [not artificial(ring[i], ring[(i + 1) % n]) for i in range(n)]
    starts = [i for i in range(n) if real[i] and not real[i - 1]]
    if len(starts) != 1:
        raise InternalCheckError(f"boundary of the left component has {len(starts)} arc pieces")
    i = starts[0]
    path = [ring[i]]
    while real[i % n]:
        i += 1
        path.append(ring[i % n])
    path = np.asarray(path)
    if path[0, 1] > 0.5:
        path = path[::-1]
    return EssentialArc(path, tol)


def vee_all(arcs: Iterable[EssentialArc]) -> EssentialArc:
    arcs = list(arcs)
    out = arcs[0]
    for arc in arcs[1:]:
        out = vee(out, arc)
    return out


def cyclic_order(arcs: Sequence[EssentialArc], tol: float = TAU_GEO) -> tuple[int, ...]:
    """Indices of pairwise disjoint annulus arcs in positive cyclic order from arc 0.

    Read off the angular positions of the bottom endpoints.
    """
    if not arcs:
        return ()
    pos = np.array([arc.bottom[0] % 1.0 for arc in arcs])
    rel = (pos - pos[0]) % 1.0
    order = np.argsort(rel, kind="stable")
    gaps = np.diff(np.append(rel[order], 1.0))
    if len(arcs) > 1 and gaps.min() <= tol:
        raise NonGenericInputError("two arcs share a bottom endpoint")
    return tuple(int(i) for i in order)


def map_arc(m: AnyMap, arc: EssentialArc, delta: float = DELTA_IMG,
            max_rounds: int = 30) -> EssentialArc:
    """Image of ``arc``, refining the source until image gaps are below ``delta``."""
    src = arc.vertices.copy()
    for _ in range(max_rounds):
        ix, it = m.apply(src[:, 0], src[:, 1])
        img = np.column_stack([ix, it])
        gaps = np.hypot(*np.diff(img, axis=0).T)
        bad = gaps > delta
        if not bad.any():
            break
        pieces = [src[:1]]
        for j in range(len(src) - 1):
            if bad[j]:
                k = int(math.ceil(gaps[j] / delta))
                f = (np.arange(1, k + 1) / k)[:, None]
                pieces.append(src[j] + f * (src[j + 1] - src[j]))
            else:
                pieces.append(src[j + 1:j + 2])
        src = np.vstack(pieces)
    else:
        raise InternalCheckError("arc image refinement did not converge")
    img[0, 1], img[-1, 1] = 0.0, 1.0
    return EssentialArc(img, arc.tol)


def _shift_range(a: EssentialArc, b: EssentialArc, reach: float) -> range:
    lo = math.floor(a.x.min() - b.x.max() - reach)
    hi = math.ceil(a.x.max() - b.x.min() + reach)
    return range(lo, hi + 1)


def projected_distance(a: EssentialArc, b: EssentialArc) -> float:
    """Distance between the projections of two arcs to the annulus."""
    best = math.inf
    for shift in _shift_range(a, b, 1.0):
        best = min(best, float(a.line.distance(shapely.affinity.translate(b.line, shift))))
    return best


def self_projected_distance(a: EssentialArc) -> float:
    """Distance between ``a`` and its nearest nonzero integer translate."""
    best = math.inf
    for shift in _shift_range(a, a, 1.0):
        if shift:
            best = min(best, float(a.line.distance(shapely.affinity.translate(a.line, shift))))
    return best


def hausdorff(a: EssentialArc, b: EssentialArc, densify: float = 0.01) -> float:
    return float(shapely.hausdorff_distance(a.line, b.line, densify=densify))
