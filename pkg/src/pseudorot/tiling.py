"""Dynamical tiling of the annulus by a rigid rotation, and related estimates.

For ``alpha`` in a Farey interval ]p/q, p2/q2[ the strip ``D`` between
``x = 0`` and ``x = q alpha - p`` and the strip ``D2`` between
``x = q2 alpha - p2`` and ``x = 0`` tile the annulus once rotated:
``q2`` rotates of ``D`` and ``q`` rotates of ``D2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arc_geometry import TAU_GEO
from .errors import InvalidInputError
from .farey import FareyInterval, as_exact


@dataclass(frozen=True)
class Tile:
    """Vertical strip ``[x0, x0 + width] x [0, 1]`` of the annulus, ``x0`` mod 1."""

    kind: str        # "D" or "D2"
    k: int           # rotation exponent
    x0: float
    width: float

    def contains(self, x, tol: float = TAU_GEO) -> np.ndarray:
        return (np.asarray(x) - self.x0 + tol) % 1.0 <= self.width + 2 * tol

    def interior_contains(self, x, tol: float = TAU_GEO) -> np.ndarray:
        u = (np.asarray(x) - self.x0) % 1.0
        return (u > tol) & (u < self.width - tol)


@dataclass(frozen=True)
class DynamicalTiling:
    interval: FareyInterval
    alpha: float
    D: tuple[float, float]
    D2: tuple[float, float]
    tiles: tuple[Tile, ...]
    O: tuple[float, float]
    O_prime: tuple[float, float]

    def coverage(self, n: int = 100_000, seed: int = 0) -> dict:
        """Monte Carlo coverage and interior-overlap counts."""
        rng = np.random.default_rng(seed)
        # strips are full height, so membership depends on x only
        x = rng.random(n)
        covered = np.zeros(n, dtype=int)
        inner = np.zeros(n, dtype=int)
        for tile in self.tiles:
            covered += tile.contains(x)
            inner += tile.interior_contains(x)
        return {
            "samples": n,
            "uncovered": int(np.count_nonzero(covered == 0)),
            "interior_overlaps": int(np.count_nonzero(inner > 1)),
        }

    def as_dict(self) -> dict:
        return {
            "interval": str(self.interval),
            "alpha": self.alpha,
            "D": list(self.D),
            "D2": list(self.D2),
            "O": list(self.O),
            "O_prime": list(self.O_prime),
            "tiles": [{"kind": t.kind, "k": t.k, "x0": t.x0, "width": t.width} for t in self.tiles],
        }


def tile_widths(interval: FareyInterval, alpha) -> tuple[Fraction, Fraction]:
    """Exact widths ``(q alpha - p, p2 - q2 alpha)``."""
    a = as_exact(alpha)
    return interval.q * a - interval.p, interval.p2 - interval.q2 * a


def width_identity(interval: FareyInterval, alpha) -> Fraction:
    """``q2 (q alpha - p) + q (p2 - q2 alpha)``, identically 1 on Farey intervals."""
    w, w2 = tile_widths(interval, alpha)
    return interval.q2 * w + interval.q * w2


def exact_partition(interval: FareyInterval, alpha) -> bool:
    """Check in exact arithmetic that the tiles partition the circle."""
    a = as_exact(alpha)
    w, w2 = tile_widths(interval, a)
    pieces = [((k * a) % 1, w) for k in range(interval.q2)]
    pieces += [((k * a + interval.q2 * a - interval.p2) % 1, w2) for k in range(interval.q)]
    pieces.sort()
    for (x0, width), (x1, _) in zip(pieces, pieces[1:] + [(pieces[0][0] + 1, 0)]):
        if x0 + width != x1:
            return False
    return True


def build_tiling(interval: FareyInterval, alpha) -> DynamicalTiling:
    a = as_exact(alpha)
    if not interval.contains(a):
        raise InvalidInputError(f"alpha = {alpha} is not in ]{interval.lo}, {interval.hi}[")
    w, w2 = (float(v) for v in tile_widths(interval, a))
    af = float(a)
    d2_left = float(interval.q2 * a - interval.p2)
    tiles = [Tile("D", k, (k * af) % 1.0, w) for k in range(interval.q2)]
    tiles += [Tile("D2", k, (d2_left + k * af) % 1.0, w2) for k in range(interval.q)]
    O = (d2_left, w)
    return DynamicalTiling(interval, af, (0.0, w), (d2_left, 0.0), tuple(tiles), O,
                           (O[0] - af, O[1] - af))


def rect_to_disc(a: float, b: float, z) -> np.ndarray:
    """Homeomorphism from the unit disc onto the centred ``a x b`` rectangle.

    Circles around the origin go to concentric rectangles.  Accepts one
    point or an ``(n, 2)`` array.
    """
    if not (0 < a <= 1 and 0 < b <= 1):
        raise InvalidInputError("rectangle sides must lie in ]0, 1]")
    pts = np.asarray(z, dtype=float)
    flat = pts.reshape(-1, 2)
    r = np.hypot(flat[:, 0], flat[:, 1])
    m = np.max(np.abs(flat), axis=1)
    scale = np.divide(r, m, out=np.zeros_like(r), where=m > 0)
    out = scale[:, None] * flat * np.array([a / 2, b / 2])
    return out.reshape(pts.shape)


def lipschitz_ratio(a: float, b: float, n: int = 10_000, seed: int = 0) -> float:
    """Largest sampled ``|psi(z) - psi(z')| / |z - z'|`` over random disc pairs."""
    rng = np.random.default_rng(seed)

    def disc(k):
        r = np.sqrt(rng.random(k))
        th = rng.random(k) * 2 * np.pi
        return np.column_stack([r * np.cos(th), r * np.sin(th)])

    z1, z2 = disc(n), disc(n)
    # half the pairs are close, where the ratio is largest
    z2[: n // 2] = z1[: n // 2] + 1e-3 * (z2[: n // 2] - z1[: n // 2])
    d_in = np.linalg.norm(z1 - z2, axis=1)
    d_out = np.linalg.norm(rect_to_disc(a, b, z1) - rect_to_disc(a, b, z2), axis=1)
    return float(np.max(d_out / d_in))


@dataclass(frozen=True)
class ErrorBudget:
    budget: float
    s: int
    eps: float | None
    factor_budget: float | None
    factor_budget_ok: bool | None

    def as_dict(self) -> dict:
        return self.__dict__.copy()


def conjugacy_error_budget(interval: FareyInterval) -> ErrorBudget:
    """Distance to the rotation a conjugacy can guarantee: ``30 / min(q, q2)``.

    With ``s = min(q, q2) > 30`` the disc factorisation runs at
    ``eps = 12 / (s - 12)`` and needs at most ``2 (6 / eps + 5) = s - 2``
    factors; for ``s <= 30`` the trivial bound 1 applies.
    """
    s = min(interval.q, interval.q2)
    if s <= 30:
        return ErrorBudget(1.0, s, None, None, None)
    eps = 12 / (s - 12)
    nb = 2 * (6 / eps + 5)
    return ErrorBudget(30 / s, s, eps, nb, nb <= s - 2 + 1e-9)


def trivial_case(interval: FareyInterval) -> bool:
    """``q = q2 = 1``, where ``D2 u D`` is the whole annulus and not a disc."""
    return interval.q == 1 and interval.q2 == 1

