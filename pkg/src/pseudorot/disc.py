"""Homeomorphisms of the closed unit disc and their eps-factorisations.

Maps form a small closed algebra (twists, radial profiles, Alexander
rescalings, boundary extensions, compositions) in which every inverse is
explicit, so sup-distances can be evaluated on a grid and every factor
serialises to JSON.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import InternalCheckError, InvalidInputError

TAU_FAC = 1e-6
TAU_BDRY = 1e-9


def disc_grid(n: int = 200) -> np.ndarray:
    """Points of an ``n x n`` grid on ``[-1, 1]^2`` lying in the closed disc."""
    s = np.linspace(-1.0, 1.0, n)
    X, Y = np.meshgrid(s, s, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    return pts[np.hypot(pts[:, 0], pts[:, 1]) <= 1.0]


def boundary_points(n: int = 720) -> np.ndarray:
    th = np.arange(n) * 2 * np.pi / n
    return np.column_stack([np.cos(th), np.sin(th)])


class DiscHomeo:
    kind = "abstract"

    def apply(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def inverse(self) -> "DiscHomeo":
        raise NotImplementedError

    def to_spec(self) -> dict:
        raise NotImplementedError

    def __call__(self, pts) -> np.ndarray:
        return self.apply(np.asarray(pts, dtype=float))


@dataclass(frozen=True)
class Identity(DiscHomeo):
    kind = "identity"

    def apply(self, pts):
        return np.array(pts, dtype=float)

    def inverse(self):
        return self

    def to_spec(self):
        return {"kind": "identity"}


@dataclass(frozen=True)
class Twist(DiscHomeo):
    """Rotate about ``center`` by ``amp (1 - d / radius)^2`` at distance ``d < radius``."""

    amp: float
    radius: float = 1.0
    center: tuple[float, float] = (0.0, 0.0)
    kind = "radial"

    def __post_init__(self):
        cx, cy = self.center
        if self.radius <= 0 or math.hypot(cx, cy) + self.radius > 1 + 1e-12:
            raise InvalidInputError("twist support must lie inside the unit disc")

    def apply(self, pts):
        c = np.asarray(self.center)
        v = np.asarray(pts, dtype=float) - c
        d = np.hypot(v[..., 0], v[..., 1])
        ang = self.amp * np.clip(1 - d / self.radius, 0, None) ** 2
        co, si = np.cos(ang), np.sin(ang)
        out = np.stack([co * v[..., 0] - si * v[..., 1], si * v[..., 0] + co * v[..., 1]], -1)
        return out + c

    def inverse(self):
        return Twist(-self.amp, self.radius, self.center)

    def to_spec(self):
        return {"kind": "twist", "amp": self.amp, "radius": self.radius,
                "center": list(self.center)}


def _check_profile(points, period: float) -> np.ndarray:
    bp = np.asarray(points, dtype=float)
    if bp.ndim != 2 or bp.shape[1] != 2 or len(bp) < 2:
        raise InvalidInputError("breakpoints must be a list of (in, out) pairs")
    if not (bp[0] == 0).all() or not np.allclose(bp[-1], period, atol=0, rtol=0):
        raise InvalidInputError(f"breakpoints must run from (0, 0) to ({period}, {period})")
    if np.any(np.diff(bp[:, 0]) <= 0) or np.any(np.diff(bp[:, 1]) <= 0):
        raise InvalidInputError("breakpoints must be strictly increasing")
    return bp


@dataclass(frozen=True, eq=False)
class RadialProfile(DiscHomeo):
    """``x -> phi(|x|) x / |x|`` for a piecewise-linear increasing ``phi`` of [0, 1]."""

    breakpoints: np.ndarray
    kind = "radial"

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", _check_profile(self.breakpoints, 1.0))

    def phi(self, r):
        return np.interp(r, self.breakpoints[:, 0], self.breakpoints[:, 1])

    def apply(self, pts):
        pts = np.asarray(pts, dtype=float)
        r = np.hypot(pts[..., 0], pts[..., 1])
        scale = np.divide(self.phi(r), r, out=np.zeros_like(r), where=r > 0)
        # near 0 the profile is linear, so the ratio is its first slope
        slope = self.breakpoints[1, 1] / self.breakpoints[1, 0]
        scale = np.where(r > 0, scale, slope)
        return pts * scale[..., None]

    def inverse(self):
        return RadialProfile(self.breakpoints[:, ::-1].copy())

    def to_spec(self):
        return {"kind": "profile", "breakpoints": self.breakpoints.tolist()}


@dataclass(frozen=True, eq=False)
class CircleMap:
    """Increasing PL map of the angle interval ``[0, 2 pi]``; fixes the angle 0."""

    breakpoints: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", _check_profile(self.breakpoints, 2 * np.pi))

    def __call__(self, theta):
        return self.lift(np.mod(theta, 2 * np.pi))

    def lift(self, theta):
        """The map on ``[0, 2 pi]`` itself, with ``2 pi`` kept as ``2 pi``."""
        return np.interp(theta, self.breakpoints[:, 0], self.breakpoints[:, 1])

    def inverse(self) -> "CircleMap":
        return CircleMap(self.breakpoints[:, ::-1].copy())

    def max_angle_shift(self) -> float:
        return float(np.max(np.abs(self.breakpoints[:, 1] - self.breakpoints[:, 0])))

    def interpolate(self, s: float) -> "CircleMap":
        """``id + s (F - id)``, sampled on the union of breakpoints."""
        th = self.breakpoints[:, 0]
        return CircleMap(np.column_stack([th, th + s * (self.breakpoints[:, 1] - th)]))

    def fixed_arcs(self) -> list[tuple[float, float]]:
        bp = self.breakpoints
        return [(float(a[0]), float(b[0])) for a, b in zip(bp, bp[1:])
                if a[0] == a[1] and b[0] == b[1]]


@dataclass(frozen=True, eq=False)
class BoundaryExtension(DiscHomeo):
    """``r e^{i theta} -> r e^{i F(theta)}``."""

    circle: CircleMap
    kind = "boundary-extended"

    def apply(self, pts):
        pts = np.asarray(pts, dtype=float)
        r = np.hypot(pts[..., 0], pts[..., 1])
        th = self.circle(np.arctan2(pts[..., 1], pts[..., 0]))
        return np.stack([r * np.cos(th), r * np.sin(th)], -1)

    def inverse(self):
        return BoundaryExtension(self.circle.inverse())

    def to_spec(self):
        return {"kind": "boundary", "breakpoints": self.circle.breakpoints.tolist()}


@dataclass(frozen=True)
class Alexander(DiscHomeo):
    """``A_t(x) = t h(x / t)`` on ``|x| < t``, identity outside."""

    base: DiscHomeo
    t: float
    kind = "rescaled"

    def __post_init__(self):
        if not 0 < self.t <= 1:
            raise InvalidInputError("t must lie in ]0, 1]")

    def apply(self, pts):
        pts = np.asarray(pts, dtype=float)
        r = np.hypot(pts[..., 0], pts[..., 1])
        inside = r < self.t
        out = pts.copy()
        out[inside] = self.t * self.base.apply(pts[inside] / self.t)
        return out

    def inverse(self):
        return Alexander(self.base.inverse(), self.t)

    def to_spec(self):
        return {"kind": "alexander", "t": self.t, "map": self.base.to_spec()}


@dataclass(frozen=True)
class Composed(DiscHomeo):
    """``maps`` applied first to last."""

    maps: tuple[DiscHomeo, ...]
    kind = "composed"

    def apply(self, pts):
        out = np.asarray(pts, dtype=float)
        for m in self.maps:
            out = m.apply(out)
        return out

    def inverse(self):
        return Composed(tuple(m.inverse() for m in reversed(self.maps)))

    def to_spec(self):
        return {"kind": "composed", "maps": [m.to_spec() for m in self.maps]}


def power(m: DiscHomeo, k: int) -> DiscHomeo:
    if k == 0:
        return Identity()
    step = m if k > 0 else m.inverse()
    return Composed((step,) * abs(k))


def disc_from_spec(spec: Mapping) -> DiscHomeo:
    try:
        kind = spec["kind"]
        if kind == "identity":
            return Identity()
        if kind == "twist":
            return Twist(float(spec["amp"]), float(spec.get("radius", 1.0)),
                         tuple(float(v) for v in spec.get("center", (0.0, 0.0))))
        if kind == "profile":
            return RadialProfile(np.asarray(spec["breakpoints"], dtype=float))
        if kind == "boundary":
            return BoundaryExtension(CircleMap(np.asarray(spec["breakpoints"], dtype=float)))
        if kind == "alexander":
            return Alexander(disc_from_spec(spec["map"]), float(spec["t"]))
        if kind == "composed":
            return Composed(tuple(disc_from_spec(m) for m in spec["maps"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"bad disc map spec: {exc}") from None
    raise InvalidInputError(f"unknown disc map kind {spec.get('kind')!r}")


def sup_distance(f: DiscHomeo, g: DiscHomeo | None = None, grid: int = 200,
                 pts: np.ndarray | None = None) -> float:
    """Sup of ``|f(x) - g(x)|`` over the grid points of the disc; ``g`` defaults to id."""
    pts = disc_grid(grid) if pts is None else pts
    other = pts if g is None else g.apply(pts)
    return float(np.max(np.hypot(*(f.apply(pts) - other).T)))


def fixes_boundary(h: DiscHomeo, n: int = 720, tol: float = TAU_BDRY) -> bool:
    b = boundary_points(n)
    return float(np.max(np.hypot(*(h.apply(b) - b).T))) <= tol


def alexander_split(h: DiscHomeo, eps: float, grid: int = 200,
                    max_halvings: int = 30) -> tuple[DiscHomeo, Alexander, float]:
    """``h = h' o h0`` with ``h0`` eps-close to id and ``h' = A_t0`` fixed near the boundary.

    Tries ``t0 = 1 - delta`` for ``delta = 1/2, 1/4, ...``; returns
    ``(h0, h', t0)``.
    """
    if eps <= 0:
        raise InvalidInputError("eps must be positive")
    if not fixes_boundary(h):
        raise InvalidInputError("map is not the identity on the boundary circle")
    pts = disc_grid(grid)
    delta = 0.5
    for _ in range(max_halvings):
        t0 = 1 - delta
        a = Alexander(h, t0)
        h0 = Composed((h, a.inverse()))
        if sup_distance(h0, pts=pts) < eps:
            return h0, a, t0
        delta /= 2
    raise InternalCheckError(f"no Alexander rescaling within {eps} of the map")


def radial_squeeze(delta: float, eps: float) -> RadialProfile:
    """Radial map ``g`` moving points by at most ``eps / 2`` that pulls ``B(0, 1 - delta)`` inward.

    The profile is linear through ``(0, 0)``, ``(a, a / 2)`` with
    ``a = min(eps, 1 - delta)``, ``(1 - delta, 1 - delta - eps / 2)`` and
    ``(1, 1)``; below ``a`` it halves radii, above it subtracts ``eps / 2``.
    """
    if not (0 < delta < 1 and eps > 0):
        raise InvalidInputError("need 0 < delta < 1 and eps > 0")
    r0 = 1 - delta
    a = min(eps, r0)
    bp = [(0.0, 0.0), (a, a / 2)]
    if r0 > a:
        bp.append((r0, r0 - eps / 2))
    bp.append((1.0, 1.0))
    return RadialProfile(np.asarray(bp))


def squeeze_count(eps: float) -> int:
    """The integer ``m`` in ``[2 / eps, 2 / eps + 1[``."""
    return math.ceil(2 / eps)


@dataclass
class Factorization:
    factors: list[DiscHomeo]   # rightmost (applied first) at index 0
    eps: float
    bound: int
    mode: str = "fixed"
    details: dict = field(default_factory=dict)

    def compose(self) -> Composed:
        return Composed(tuple(self.factors))

    def closeness(self, grid: int = 200) -> list[float]:
        pts = disc_grid(grid)
        return [sup_distance(f, pts=pts) for f in self.factors]

    def residual(self, h: DiscHomeo, grid: int = 200) -> float:
        return sup_distance(self.compose(), h, grid)

    def report(self, h: DiscHomeo, grid: int = 200) -> dict:
        close = self.closeness(grid)
        res = self.residual(h, grid)
        return {
            "mode": self.mode, "eps": self.eps, "count": len(self.factors), "bound": self.bound,
            "max_factor_distance": max(close), "residual": res,
            "ok": len(self.factors) <= self.bound and max(close) < self.eps and res < TAU_FAC,
            **self.details,
        }

    def to_json(self) -> dict:
        return {"mode": self.mode, "eps": self.eps, "bound": self.bound,
                "factors": [f.to_spec() for f in self.factors], **self.details}


def _fixed_boundary_factors(h: DiscHomeo, eps: float, grid: int) -> tuple[list[DiscHomeo], dict]:
    if sup_distance(h, grid=grid) < eps:
        return [h], {"t0": None, "m": 0}
    h0, h1, t0 = alexander_split(h, eps, grid)
    g = radial_squeeze(1 - t0, eps)
    m = squeeze_count(eps)
    r = float(1 - t0)
    for _ in range(m):
        r = float(g.phi(r))
    if not r < eps / 2:
        raise InternalCheckError(f"squeeze leaves radius {r:.3g} >= eps / 2")
    hb = Composed((power(g, -m), h1, power(g, m)))
    factors = [h0] + [g] * m + [hb] + [g.inverse()] * m
    return factors, {"t0": t0, "m": m}


def factorize_disc(h: DiscHomeo, eps: float, mode: str = "fixed",
                   grid: int = 200) -> Factorization:
    """Write ``h`` as a product of maps each within ``eps`` of the identity.

    ``fixed`` mode needs ``h`` to fix the boundary circle and uses at
    most ``ceil(4 / eps) + 4`` factors.  ``arcs`` mode accepts ``h``
    whose boundary map is a :class:`CircleMap` fixing two arcs: that map
    is split into short circle steps, extended radially, and the
    boundary-fixing remainder is factored as in ``fixed`` mode, within
    ``ceil(6 / eps) + 5`` factors.
    """
    if eps <= 0:
        raise InvalidInputError("eps must be positive")
    if mode == "fixed":
        factors, info = _fixed_boundary_factors(h, eps, grid)
        return Factorization(factors, eps, math.ceil(4 / eps) + 4, "fixed", info)
    if mode != "arcs":
        raise InvalidInputError(f"unknown mode {mode!r}")
    F = boundary_circle_map(h)
    if len(F.fixed_arcs()) < 2 and not np.allclose(F.breakpoints[:, 0], F.breakpoints[:, 1]):
        raise InvalidInputError("boundary map must be the identity on two arcs")
    steps = circle_steps(F, eps)
    ext = [BoundaryExtension(s) for s in steps]
    rest = Composed((h, BoundaryExtension(F).inverse()))
    inner, info = _fixed_boundary_factors(rest, eps, grid)
    info = {**info, "circle_factors": len(steps)}
    return Factorization(inner + ext, eps, math.ceil(6 / eps) + 5, "arcs", info)


def boundary_circle_map(h: DiscHomeo, n: int = 4096) -> CircleMap:
    """The boundary restriction of ``h`` as a PL circle map through its samples."""
    if isinstance(h, BoundaryExtension):
        return h.circle
    b = boundary_points(n)
    img = h.apply(b)
    if np.max(np.abs(np.hypot(*img.T) - 1)) > TAU_BDRY:
        raise InvalidInputError("map does not preserve the boundary circle")
    th = np.arange(n) * 2 * np.pi / n
    out = np.unwrap(np.arctan2(img[:, 1], img[:, 0]))
    out -= 2 * np.pi * round(out[0] / (2 * np.pi))
    if abs(out[0]) > TAU_BDRY:
        raise InvalidInputError("boundary map must fix the angle 0")
    bp = np.column_stack([np.append(th, 2 * np.pi), np.append(out, 2 * np.pi)])
    return CircleMap(bp)


def circle_steps(F: CircleMap, eps: float) -> list[CircleMap]:
    """``F = H_N o ... o H_1`` (returned first-applied first), each step eps-close on the circle."""
    shift = F.max_angle_shift()
    # a chord is at most its angle, so angle steps below eps suffice
    n = max(1, math.floor(shift / eps) + 1)
    th = F.breakpoints[:, 0]
    stages = [F.interpolate(k / n) for k in range(n + 1)]
    steps = []
    for prev, cur in zip(stages, stages[1:]):
        # H_k = G_k o G_{k-1}^{-1}, PL with breakpoints at G_{k-1}(th)
        steps.append(CircleMap(np.column_stack([prev.lift(th), cur.lift(th)])))
    return steps


def left_partial_gaps(factors: Sequence[DiscHomeo], grid: int = 100) -> list[float]:
    """Distances ``d(h_N o ... o h_k, h_N o ... o h_{k+1})`` for each ``k``.

    Right partial products always move by one eps-close factor; left ones
    need not, and these gaps show by how much.  The sup is sampled both on
    the grid and on its image under the right partial product before
    ``h_k``, which reaches the small balls the squeeze maps blow up.
    """
    pts = disc_grid(grid)
    gaps = []
    for k in range(len(factors)):
        left_k = Composed(tuple(factors[k:]))
        left_k1 = Composed(tuple(factors[k + 1:]))
        best = 0.0
        for sample in (pts, Composed(tuple(factors[:k])).apply(pts)):
            diff = left_k.apply(sample) - left_k1.apply(sample)
            best = max(best, float(np.max(np.hypot(*diff.T))))
        gaps.append(best)
    return gaps
