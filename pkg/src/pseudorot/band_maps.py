"""Lifted annulus homeomorphisms acting on the band R x [0, 1].

Every map in the registry commutes with the unit translation
``T(x, t) = (x + 1, t)``, preserves both boundary lines and ships a
closed-form inverse.  Maps are immutable descriptors; evaluation is
vectorised over numpy arrays through :meth:`LiftedAnnulusMap.apply`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidInputError

TAU_MAP = 1e-9

ArrayPair = tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True)
class BandPoint:
    x: float
    t: float

    def __post_init__(self):
        if not (-TAU_MAP <= self.t <= 1 + TAU_MAP):
            raise InvalidInputError(f"t={self.t} outside [0, 1]")

    def __iter__(self):
        yield self.x
        yield self.t


@dataclass(frozen=True)
class Family:
    """Registry entry: parameter names, forward/inverse formulas, validator."""

    name: str
    param_names: tuple[str, ...]
    forward: Callable[[np.ndarray, np.ndarray, dict], ArrayPair]
    inverse: Callable[[np.ndarray, np.ndarray, dict], ArrayPair]
    validate: Callable[[dict], None] = lambda params: None
    doc: str = ""


_REGISTRY: dict[str, Family] = {}


def register_family(family: Family) -> None:
    _REGISTRY[family.name] = family


def families() -> list[str]:
    return sorted(_REGISTRY) + ["composed"]


# -- built-in families --------------------------------------------------------

def _rot_fwd(x, t, p):
    return x + p["alpha"], t


def _rot_inv(x, t, p):
    return x - p["alpha"], t


def _twist_fwd(x, t, p):
    return x + p["alpha"] + p["beta"] * t, t


def _twist_inv(x, t, p):
    return x - p["alpha"] - p["beta"] * t, t


def _shear_amp(x, p):
    return p["eps_p"] * np.sin(2 * np.pi * x)


def _perturbed_fwd(x, t, p):
    # vertical shear t -> t + c(x) t (1 - t), then the linear twist
    t1 = t + _shear_amp(x, p) * t * (1 - t)
    return x + p["alpha"] + p["beta"] * t1, t1


def _perturbed_inv(x1, t1, p):
    x = x1 - p["alpha"] - p["beta"] * t1
    c = _shear_amp(x, p)
    # root of c t^2 - (1 + c) t + t1 = 0 lying in [0, 1], cancellation-free form
    disc = np.maximum((1 + c) ** 2 - 4 * c * t1, 0.0)
    t = 2 * t1 / ((1 + c) + np.sqrt(disc))
    return x, t


def _check_perturbation(params):
    if not abs(params["eps_p"]) < 1:
        raise InvalidInputError(
            f"perturbed_twist needs |eps_p| < 1 to stay injective, got {params['eps_p']}"
        )


register_family(Family("rotation", ("alpha",), _rot_fwd, _rot_inv,
                       doc="(x, t) -> (x + alpha, t)"))
register_family(Family("linear_twist", ("alpha", "beta"), _twist_fwd, _twist_inv,
                       doc="(x, t) -> (x + alpha + beta t, t)"))
register_family(Family(
    "perturbed_twist", ("alpha", "beta", "eps_p"), _perturbed_fwd, _perturbed_inv,
    validate=_check_perturbation,
    doc="linear twist after the shear t -> t + eps_p sin(2 pi x) t (1 - t); |eps_p| < 1",
))


# -- map descriptors ----------------------------------------------------------

@dataclass(frozen=True)
class LiftedAnnulusMap:
    """A registry map, possibly composed, in forward or inverse direction.

    For ``family == "composed"`` the ``parts`` are applied first to last.
    """

    family: str
    params: tuple[tuple[str, float], ...] = ()
    direction: str = "forward"
    parts: tuple["LiftedAnnulusMap", ...] = ()

    @property
    def param_dict(self) -> dict:
        return dict(self.params)

    def apply(self, x, t) -> ArrayPair:
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        if self.family == "composed":
            seq = self.parts if self.direction == "forward" else reversed(self.parts)
            for part in seq:
                part = part if self.direction == "forward" else part.inverse()
                x, t = part.apply(x, t)
            return x, t
        fam = _REGISTRY[self.family]
        fn = fam.forward if self.direction == "forward" else fam.inverse
        return fn(x, t, self.param_dict)

    def apply_power(self, x, t, k: int) -> ArrayPair:
        step = self if k >= 0 else self.inverse()
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        for _ in range(abs(k)):
            x, t = step.apply(x, t)
        return x, t

    def inverse(self) -> "LiftedAnnulusMap":
        flipped = "inverse" if self.direction == "forward" else "forward"
        return LiftedAnnulusMap(self.family, self.params, flipped, self.parts)

    def __call__(self, p: BandPoint) -> BandPoint:
        return eval_map(self, p)

    def to_spec(self) -> dict:
        if self.family == "composed":
            spec = {"family": "composed", "params": {"maps": [m.to_spec() for m in self.parts]}}
        else:
            spec = {"family": self.family, "params": self.param_dict}
        if self.direction != "forward":
            spec["direction"] = self.direction
        return spec


@dataclass(frozen=True)
class WordMap:
    """Composition of letters ``T^shift o h^exp`` applied right to left."""

    base: LiftedAnnulusMap
    word: tuple[tuple[int, int], ...] = field(default=())

    def apply(self, x, t) -> ArrayPair:
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        for h_exp, t_shift in reversed(self.word):
            x, t = self.base.apply_power(x, t, h_exp)
            x = x + t_shift
        return x, t

    def inverse(self) -> "WordMap":
        return WordMap(self.base, tuple((-e, -s) for e, s in reversed(self.word)))

    def __call__(self, p: BandPoint) -> BandPoint:
        return eval_map(self, p)

    def to_spec(self) -> list[dict]:
        return [{"h_exp": e, "t_shift": s} for e, s in self.word]


AnyMap = LiftedAnnulusMap | WordMap


def make_map(family: str, params: Mapping | None = None) -> LiftedAnnulusMap:
    params = dict(params or {})
    if family == "composed":
        maps = params.get("maps")
        if not maps:
            raise InvalidInputError("composed family needs a non-empty 'maps' list")
        parts = tuple(m if isinstance(m, LiftedAnnulusMap) else map_from_spec(m) for m in maps)
        return LiftedAnnulusMap("composed", (), "forward", parts)
    if family not in _REGISTRY:
        raise InvalidInputError(f"unknown map family {family!r}; known: {families()}")
    fam = _REGISTRY[family]
    missing = set(fam.param_names) - set(params)
    extra = set(params) - set(fam.param_names)
    if missing or extra:
        raise InvalidInputError(
            f"{family} takes params {fam.param_names}; missing {sorted(missing)}, "
            f"unexpected {sorted(extra)}"
        )
    values = {}
    for name in fam.param_names:
        try:
            value = float(params[name])
        except (TypeError, ValueError):
            raise InvalidInputError(f"param {name!r} must be a real number") from None
        if not math.isfinite(value):
            raise InvalidInputError(f"param {name!r} must be finite")
        values[name] = value
    fam.validate(values)
    return LiftedAnnulusMap(family, tuple((n, values[n]) for n in fam.param_names))


def map_from_spec(spec: Mapping) -> LiftedAnnulusMap:
    """Build a map from ``{"family": ..., "params": {...}}``."""
    if not isinstance(spec, Mapping) or "family" not in spec:
        raise InvalidInputError("map spec must be an object with a 'family' key")
    m = make_map(spec["family"], spec.get("params", {}))
    direction = spec.get("direction", "forward")
    if direction not in ("forward", "inverse"):
        raise InvalidInputError(f"direction must be forward|inverse, got {direction!r}")
    return m if direction == "forward" else m.inverse()


def word_from_spec(base: LiftedAnnulusMap, letters: Iterable[Mapping]) -> WordMap:
    word = []
    for letter in letters:
        try:
            word.append((int(letter["h_exp"]), int(letter["t_shift"])))
        except (KeyError, TypeError, ValueError):
            raise InvalidInputError(f"bad word letter {letter!r}") from None
    return WordMap(base, tuple(word))


def translation_word(base: LiftedAnnulusMap, shift: int) -> WordMap:
    return WordMap(base, ((0, shift),))


def eval_map(m: AnyMap, p: BandPoint) -> BandPoint:
    x, t = m.apply(p.x, p.t)
    return BandPoint(float(x), float(np.clip(t, 0.0, 1.0)))


def iterate(m: AnyMap, p: BandPoint, n: int) -> list[BandPoint]:
    if n < 0:
        raise InvalidInputError("n must be >= 0")
    orbit = [p]
    for _ in range(n):
        orbit.append(eval_map(m, orbit[-1]))
    return orbit


def orbit_arrays(m: AnyMap, x: Sequence[float], t: Sequence[float], n: int) -> ArrayPair:
    """Vectorised orbits; returns arrays of shape ``(n + 1, len(x))``."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    xs = np.empty((n + 1,) + x.shape)
    ts = np.empty((n + 1,) + t.shape)
    xs[0], ts[0] = x, t
    for i in range(n):
        x, t = m.apply(x, t)
        xs[i + 1], ts[i + 1] = x, t
    return xs, ts
