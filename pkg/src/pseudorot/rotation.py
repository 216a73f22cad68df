"""Sampled displacement sets, rotation-set estimates and pushing constants.

Estimates are deterministic functions of the sample grid.  They are
sampled lower bounds on the true hulls, not rigorous enclosures.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .band_maps import AnyMap, LiftedAnnulusMap, WordMap
from .errors import HypothesisError, InvalidInputError

TAU_S = 1e-6


@dataclass(frozen=True)
class RotationEstimate:
    lo: float
    hi: float
    n: int
    grid: int
    max_observed_defect: float = 0.0

    def __post_init__(self):
        if self.lo > self.hi:
            raise InvalidInputError("lo > hi")

    def as_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "n": self.n, "grid": self.grid,
                "max_observed_defect": self.max_observed_defect}


@dataclass(frozen=True)
class PushBound:
    rho: float
    s: float

    def holds(self, m: AnyMap, x, t, n_check: int) -> bool:
        x0 = np.asarray(x, dtype=float)
        xs, ts = np.array(x0), np.asarray(t, dtype=float)
        for n in range(1, n_check + 1):
            xs, ts = m.apply(xs, ts)
            if np.any(xs < x0 + self.rho * n - self.s):
                return False
        return True


def sample_grid(grid: int) -> tuple[np.ndarray, np.ndarray]:
    """``grid`` columns in ``[0, 1)`` times ``grid + 1`` rows in ``[0, 1]``.

    Refining by an integer factor yields a superset of points.
    """
    if grid < 2:
        raise InvalidInputError("grid must be >= 2")
    xs = np.arange(grid) / grid
    ts = np.arange(grid + 1) / grid
    X, Tt = np.meshgrid(xs, ts, indexing="ij")
    return X.ravel(), Tt.ravel()


def displacement_set(m: AnyMap, n: int, grid: int) -> tuple[float, float]:
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    x0, t0 = sample_grid(grid)
    x, t = x0, t0
    for _ in range(n):
        x, t = m.apply(x, t)
    d = (x - x0) / n
    return float(d.min()), float(d.max())


def _checkpoints(n_max: int) -> list[int]:
    pts, n = [], 1
    while n < n_max:
        pts.append(n)
        n *= 2
    pts.append(n_max)
    return pts


def rotation_estimate(m: AnyMap, n_max: int = 100, grid: int = 64) -> RotationEstimate:
    """Displacement interval at ``n_max``.

    ``max_observed_defect`` is the largest endpoint move between the
    dyadic checkpoints 1, 2, 4, ... and ``n_max``; a crude convergence
    diagnostic, no rate is claimed.
    """
    if n_max < 1:
        raise InvalidInputError("n_max must be >= 1")
    x0, t0 = sample_grid(grid)
    x, t = x0, t0
    stops = set(_checkpoints(n_max))
    hulls = []
    for n in range(1, n_max + 1):
        x, t = m.apply(x, t)
        if n in stops:
            d = (x - x0) / n
            hulls.append((float(d.min()), float(d.max())))
    lo, hi = hulls[-1]
    defect = max(max(abs(a - lo), abs(b - hi)) for a, b in hulls)
    return RotationEstimate(lo, hi, n_max, grid, defect)


def hausdorff_interval(a: tuple[float, float], b: tuple[float, float]) -> float:
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


def lemma21_check(m: LiftedAnnulusMap, p: int, q: int, n_max: int = 50, grid: int = 32) -> dict:
    """Compare the estimate for ``T^-p o h^q`` with ``q * estimate(h) - p``.

    ``n`` steps of the word are ``n q`` steps of ``h``, so the base map is
    estimated at ``n_max * q`` on the same grid; the two hulls then agree
    up to rounding.
    """
    if q < 1:
        raise InvalidInputError("q must be >= 1")
    base = rotation_estimate(m, n_max * q, grid)
    word = rotation_estimate(WordMap(m, ((q, -p),)), n_max, grid)
    affine = (q * base.lo - p, q * base.hi - p)
    return {
        "p": p, "q": q,
        "word_interval": [word.lo, word.hi],
        "affine_interval": list(affine),
        "distance": hausdorff_interval((word.lo, word.hi), affine),
    }


def push_bound(m: AnyMap, rho_margin: float = 0.1, n_check: int = 50, grid: int = 32,
               estimate: RotationEstimate | None = None) -> PushBound:
    """Smallest sampled ``s`` with ``x_n >= x_0 + rho n - s`` for ``n <= n_check``."""
    if not 0 < rho_margin < 1:
        raise InvalidInputError("rho_margin must lie in (0, 1)")
    est = estimate or rotation_estimate(m, max(n_check, 1), grid)
    if est.lo <= 0:
        raise HypothesisError(
            f"estimated rotation set [{est.lo:.6g}, {est.hi:.6g}] is not inside ]0, +inf["
        )
    rho = est.lo * (1 - rho_margin)
    x0, t0 = sample_grid(grid)
    x, t = x0, t0
    worst = 0.0
    for n in range(1, n_check + 1):
        x, t = m.apply(x, t)
        worst = max(worst, float(np.max(x0 + rho * n - x)))
    return PushBound(rho, worst + TAU_S)
