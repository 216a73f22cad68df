"""Search for an essential arc whose iterates realise a Farey interval.

Given a lifted map ``h`` and a Farey interval ]p/q, p2/q2[ containing
its rotation set, the return maps ``T^-p h^q`` and ``T^p2 h^-q2`` both
push points to the right.  The left boundary of everything reachable
from ``{x >= 0}`` by short-jump pseudo-orbits of the two return maps is
an arc that each return map moves off itself; its first ``q + q2``
iterates are then pairwise disjoint in the annulus.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .arc_geometry import (DELTA_IMG, TAU_GEO, EssentialArc, arc_distance, arc_less,
                           cyclic_order, map_arc, projected_distance,
                           self_projected_distance)
from .band_maps import LiftedAnnulusMap, WordMap, map_from_spec
from .bricks import ReachabilityError, build_grid, brick_reachability, extract_boundary
from .errors import (HypothesisError, InternalCheckError, InvalidInputError,
                     PseudorotError, ResolutionError)
from .farey import FareyInterval, iterate_plan, make_farey
from .rotation import TAU_S, push_bound, rotation_estimate

log = logging.getLogger(__name__)

EPS_MIN = 1e-5


class VerificationError(ResolutionError):
    """A candidate arc failed one of the certificate checks."""


def return_maps(h: LiftedAnnulusMap, interval: FareyInterval) -> tuple[WordMap, WordMap]:
    """``(T^-p h^q, T^p2 h^-q2)``."""
    phi1 = WordMap(h, ((interval.q, -interval.p),))
    phi2 = WordMap(h, ((-interval.q2, interval.p2),))
    return phi1, phi2


@dataclass(frozen=True)
class PseudoOrbitConstants:
    N: int
    eps: float
    M: float
    rho: float
    s: float

    def with_eps(self, eps: float) -> "PseudoOrbitConstants":
        return PseudoOrbitConstants(self.N, eps, self.N * (eps + self.s), self.rho, self.s)

    def as_dict(self) -> dict:
        return {"N": self.N, "eps": self.eps, "M": self.M, "rho": self.rho, "s": self.s}


def _pseudo_orbit_min_gain(phi1, phi2, N: int, eps: float, rng: np.random.Generator,
                           n_random: int) -> float:
    """Smallest ``x_N - x_0`` over sampled eps-pseudo-orbits of length N.

    Mixes random itineraries and jumps with greedy itineraries whose
    jumps all point left, the worst case for a translation-like pair.
    """
    half = n_random // 2
    x0 = np.concatenate([rng.random(n_random), np.repeat(np.linspace(0, 1, 16, endpoint=False), 17)])
    t0 = np.concatenate([rng.random(n_random), np.tile(np.linspace(0, 1, 17), 16)])
    n = len(x0)
    mode = np.zeros(n, dtype=int)          # 0 random, 1 greedy-left, 2 all phi1, 3 all phi2
    mode[half:n_random] = 1
    grid_modes = np.arange(n - n_random) % 3 + 1
    mode[n_random:] = grid_modes
    x, t = x0.copy(), t0.copy()
    for _ in range(N):
        x1, t1 = phi1.apply(x, t)
        x2, t2 = phi2.apply(x, t)
        pick2 = np.where(mode == 0, rng.random(n) < 0.5,
                         np.where(mode == 1, x2 < x1, mode == 3))
        x = np.where(pick2, x2, x1)
        t = np.where(pick2, t2, t1)
        ang = rng.random(n) * 2 * np.pi
        r = eps * (1 - 1e-9) * np.sqrt(rng.random(n))
        dx = np.where(mode == 0, r * np.cos(ang), -eps * (1 - 1e-9))
        dt = np.where(mode == 0, r * np.sin(ang), 0.0)
        x = x + dx
        t = np.clip(t + dt, 0.0, 1.0)
    return float((x - x0).min())


def pseudo_orbit_constants(phi1, phi2, rho_margin: float = 0.1, n_check: int = 50,
                           grid: int = 32, seed: int = 0, n_random: int = 2000,
                           eps_min: float = EPS_MIN) -> PseudoOrbitConstants:
    """Constants ``(N, eps, M)`` that bound how far pseudo-orbits drift left.

    ``N = ceil((2 + 2 s) / rho)`` makes every length-N composition of
    the return maps move points by at least 2; ``eps`` is the largest
    dyadic value for which sampled eps-pseudo-orbits of length N still
    move points by at least ``1 - TAU_S``.
    """
    N = 0
    b1 = b2 = None
    for _ in range(4):
        checks = max(n_check, 2 * N)
        est1 = rotation_estimate(phi1, checks, grid)
        est2 = rotation_estimate(phi2, checks, grid)
        b1 = push_bound(phi1, rho_margin, checks, grid, est1)
        b2 = push_bound(phi2, rho_margin, checks, grid, est2)
        rho, s = min(b1.rho, b2.rho), max(b1.s, b2.s)
        new_N = math.ceil((2 + 2 * s) / rho)
        if new_N <= checks:
            N = new_N
            break
        N = new_N
    rng = np.random.default_rng(seed)
    eps = 0.5
    while eps >= eps_min:
        if _pseudo_orbit_min_gain(phi1, phi2, N, eps, rng, n_random) >= 1 - TAU_S:
            return PseudoOrbitConstants(N, eps, N * (eps + s), rho, s)
        eps /= 2
    raise ResolutionError(f"no eps >= {eps_min} keeps length-{N} pseudo-orbits moving right")


@dataclass
class ArcTheoremCertificate:
    map_spec: dict
    interval: FareyInterval
    arc: EssentialArc
    iterates: list[EssentialArc]
    min_pairwise_distance: float
    cyclic_order: tuple[int, ...]
    sigma: tuple[int, ...]
    provenance: dict = field(default_factory=dict)

    @property
    def cyclic_order_matches_sigma(self) -> bool:
        return self.cyclic_order == (0,) + self.sigma

    def to_json(self) -> dict:
        return {
            "map": self.map_spec,
            "interval": self.interval.as_dict(),
            "arc": self.arc.to_json(),
            "iterates": [a.to_json() for a in self.iterates],
            "min_pairwise_distance": self.min_pairwise_distance,
            "cyclic_order": list(self.cyclic_order),
            "sigma": list(self.sigma),
            "cyclic_order_matches_sigma": self.cyclic_order_matches_sigma,
            "provenance": self.provenance,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def from_json(cls, data: Mapping | str) -> "ArcTheoremCertificate":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            iv = data["interval"]
            return cls(
                map_spec=dict(data["map"]),
                interval=make_farey(iv["p"], iv["q"], iv["p2"], iv["q2"]),
                arc=EssentialArc.from_json(data["arc"]),
                iterates=[EssentialArc.from_json(a) for a in data.get("iterates", [])],
                min_pairwise_distance=float(data.get("min_pairwise_distance", math.nan)),
                cyclic_order=tuple(data.get("cyclic_order", ())),
                sigma=tuple(data.get("sigma", ())),
                provenance=dict(data.get("provenance", {})),
            )
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"malformed certificate: {exc}") from None


def _normalise(arc: EssentialArc) -> EssentialArc:
    return arc.translate(-math.floor(arc.bottom[0]))


def _pairwise_min(arcs: list[EssentialArc]) -> float:
    best = min(self_projected_distance(a) for a in arcs)
    for i in range(len(arcs)):
        for j in range(i + 1, len(arcs)):
            best = min(best, projected_distance(arcs[i], arcs[j]))
    return best


def check_arc(h: LiftedAnnulusMap, interval: FareyInterval, arc: EssentialArc,
              delta: float = DELTA_IMG, tol: float = TAU_GEO) -> dict:
    """Run every certificate check on ``arc``; never raises on failure."""
    phi1, phi2 = return_maps(h, interval)
    img1 = map_arc(phi1, arc, delta)
    img2 = map_arc(phi2, arc, delta)
    pre2 = map_arc(phi2.inverse(), arc, delta)
    d1, d2 = arc_distance(arc, img1), arc_distance(arc, img2)
    disjoint_returns = d1 > tol and d2 > tol

    def safe_less(a, b):
        try:
            return arc_less(a, b)
        except PseudorotError:
            return False

    ordered = disjoint_returns and safe_less(pre2, arc) and safe_less(arc, img1)
    iterates = [arc]
    for _ in range(interval.size - 1):
        iterates.append(map_arc(h, iterates[-1], delta))
    iterates = [_normalise(a) for a in iterates]
    dmin = _pairwise_min(iterates)
    disjoint = dmin > tol
    plan = iterate_plan(interval)
    try:
        order = cyclic_order(iterates, tol) if disjoint else ()
    except PseudorotError:
        order = ()
    return {
        "ok": bool(disjoint_returns and ordered and disjoint and order == (0,) + plan.sigma),
        "return_distances": [d1, d2],
        "returns_disjoint": bool(disjoint_returns),
        "returns_ordered": bool(ordered),
        "min_pairwise_distance": dmin,
        "iterates_disjoint": bool(disjoint),
        "cyclic_order": list(order),
        "expected_order": [0, *plan.sigma],
        "iterates": iterates[1:],
        "sigma": plan.sigma,
    }


@dataclass(frozen=True)
class FindArcPolicy:
    eps: float | None = None
    max_retries: int = 3
    rho_margin: float = 0.1
    n_check: int = 50
    grid: int = 32
    window_right: float = 3.0
    delta_img: float = DELTA_IMG
    tol: float = TAU_GEO
    seed: int = 0
    n_random: int = 2000


def check_hypothesis(h: LiftedAnnulusMap, interval: FareyInterval, n_max: int = 100,
                     grid: int = 64) -> dict:
    """Raise :class:`HypothesisError` unless the estimated rotation set is inside the interval."""
    est = rotation_estimate(h, n_max, grid)
    if not (float(interval.lo) < est.lo and est.hi < float(interval.hi)):
        raise HypothesisError(
            f"estimated rotation set [{est.lo:.6g}, {est.hi:.6g}] is not inside "
            f"]{interval.lo}, {interval.hi}["
        )
    return est.as_dict()


def find_arc(h: LiftedAnnulusMap, interval: FareyInterval,
             policy: FindArcPolicy | None = None) -> ArcTheoremCertificate:
    """Build and check an arc for ``h`` and ``interval``.

    On a failed check the brick size is halved, up to ``max_retries``
    times, before giving up with :class:`ResolutionError`.
    """
    policy = policy or FindArcPolicy()
    rot = check_hypothesis(h, interval)
    phi1, phi2 = return_maps(h, interval)
    consts = pseudo_orbit_constants(phi1, phi2, policy.rho_margin, policy.n_check,
                                    policy.grid, policy.seed, policy.n_random)
    eps = policy.eps or consts.eps
    failures = []
    for attempt in range(policy.max_retries + 1):
        if eps < EPS_MIN:
            break
        c = consts.with_eps(eps)
        try:
            grid = build_grid(eps)
            reach = brick_reachability(grid, phi1, phi2, c.M, policy.window_right,
                                       policy.delta_img)
            arc = extract_boundary(reach, policy.tol)
        except (ReachabilityError, InternalCheckError) as exc:
            failures.append(f"eps={eps:g}: {exc}")
            log.info("attempt %d failed: %s", attempt, exc)
            eps /= 2
            continue
        report = check_arc(h, interval, arc, policy.delta_img, policy.tol)
        if report["ok"]:
            return ArcTheoremCertificate(
                map_spec=h.to_spec(),
                interval=interval,
                arc=arc,
                iterates=report["iterates"],
                min_pairwise_distance=report["min_pairwise_distance"],
                cyclic_order=tuple(report["cyclic_order"]),
                sigma=report["sigma"],
                provenance={
                    **c.as_dict(), "retries": attempt, "grid_rows": grid.rows,
                    "dilation": reach.dilation, "delta_img": policy.delta_img,
                    "tol": policy.tol, "seed": policy.seed, "rotation_estimate": rot,
                },
            )
        failures.append(f"eps={eps:g}: checks failed "
                        f"(min distance {report['min_pairwise_distance']:.3g})")
        eps /= 2
    raise ResolutionError("no certified arc; " + "; ".join(failures))


def verify_certificate(cert: ArcTheoremCertificate | Mapping | str,
                       delta: float = DELTA_IMG) -> dict:
    """Recompute every check from the map, interval and arc alone."""
    if not isinstance(cert, ArcTheoremCertificate):
        cert = ArcTheoremCertificate.from_json(cert)
    h = map_from_spec(cert.map_spec)
    tol = float(cert.provenance.get("tol", TAU_GEO))
    report = check_arc(h, cert.interval, cert.arc, delta, tol)
    report.pop("iterates")
    report["sigma"] = list(report["sigma"])
    return report
