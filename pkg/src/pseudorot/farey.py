"""Exact Farey-interval arithmetic.

Everything here is integer/rational.  Floating input only enters through
:func:`find_farey_containing`, where a float is read as the exact decimal
of its shortest repr (``0.63`` means ``63/100``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .errors import InternalCheckError, InvalidInputError


class NotFareyError(InvalidInputError):
    pass


class RationalInputError(InvalidInputError):
    """The descent landed exactly on a mediant: the input is rational."""


@dataclass(frozen=True)
class FareyInterval:
    """Open interval ]p/q, p2/q2[ with p2*q - p*q2 == 1."""

    p: int
    q: int
    p2: int
    q2: int

    def __post_init__(self):
        if self.q < 1 or self.q2 < 1:
            raise NotFareyError("denominators must be positive")
        if math.gcd(self.p, self.q) != 1 or math.gcd(self.p2, self.q2) != 1:
            raise NotFareyError(f"{self} has a non-reduced endpoint")
        det = self.p2 * self.q - self.p * self.q2
        if det != 1:
            raise NotFareyError(f"]{self.p}/{self.q}, {self.p2}/{self.q2}[ has determinant {det} != 1")

    @property
    def lo(self) -> Fraction:
        return Fraction(self.p, self.q)

    @property
    def hi(self) -> Fraction:
        return Fraction(self.p2, self.q2)

    @property
    def mediant(self) -> Fraction:
        return Fraction(self.p + self.p2, self.q + self.q2)

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    @property
    def size(self) -> int:
        """q + q2, the number of disjoint iterates of the arc."""
        return self.q + self.q2

    def contains(self, alpha) -> bool:
        return self.lo < alpha < self.hi

    def __str__(self) -> str:
        return f"{self.p}/{self.q}:{self.p2}/{self.q2}"

    def as_dict(self) -> dict:
        return {"p": self.p, "q": self.q, "p2": self.p2, "q2": self.q2}


def make_farey(p: int, q: int, p2: int, q2: int) -> FareyInterval:
    return FareyInterval(int(p), int(q), int(p2), int(q2))


def parse_interval(text: str) -> FareyInterval:
    """Parse ``"p/q:p2/q2"``."""
    try:
        left, right = text.split(":")
        p, q = (int(v) for v in left.split("/"))
        p2, q2 = (int(v) for v in right.split("/"))
    except ValueError:
        raise InvalidInputError(f"interval must look like 'p/q:p2/q2', got {text!r}") from None
    return make_farey(p, q, p2, q2)


def as_exact(alpha) -> Fraction:
    if isinstance(alpha, (Fraction, Rational, int)):
        return Fraction(alpha)
    if isinstance(alpha, str):
        return Fraction(alpha)
    value = float(alpha)
    if not math.isfinite(value):
        raise InvalidInputError("alpha must be finite")
    return Fraction(repr(value))


def find_farey_containing(alpha, min_qq: int) -> FareyInterval:
    """Stern-Brocot descent toward ``alpha`` until ``q + q2 >= min_qq``."""
    if min_qq < 2:
        raise InvalidInputError("min_qq must be >= 2")
    a = as_exact(alpha)
    n = math.floor(a)
    frac = a - n
    if frac == 0:
        raise RationalInputError(f"alpha = {a} is an integer")
    p, q, p2, q2 = 0, 1, 1, 1
    while q + q2 < min_qq:
        mp, mq = p + p2, q + q2
        m = Fraction(mp, mq)
        if frac == m:
            raise RationalInputError(f"alpha hits the mediant {m} exactly; it is rational")
        if frac > m:
            p, q = mp, mq
        else:
            p2, q2 = mp, mq
    return make_farey(p + n * q, q, p2 + n * q2, q2)


def stern_brocot_intervals(max_qq: int, lo: int = 0):
    """Yield every Farey interval inside [lo, lo + 1] with q + q2 <= max_qq."""
    stack = [(lo, 1, lo + 1, 1)]
    while stack:
        p, q, p2, q2 = stack.pop()
        if q + q2 > max_qq:
            continue
        yield FareyInterval(p, q, p2, q2)
        mp, mq = p + p2, q + q2
        stack.append((mp, mq, p2, q2))
        stack.append((p, q, mp, mq))


@dataclass(frozen=True)
class FareyApproximations:
    """Common Farey approximations ``seq[n] = p_n/q_n`` as integer pairs.

    ``seq[0]`` is the point at infinity, written ``(1, 0)`` when the
    descent first raises the lower endpoint and ``(-1, 0)`` when it first
    lowers the upper one, so that the recurrence holds at ``n = 1`` with
    ``a_2 = 1`` in both cases.  ``a[i]`` is ``a_{i+2}``.
    """

    seq: tuple[tuple[int, int], ...]
    a: tuple[int, ...]

    def fractions(self) -> list[Fraction | None]:
        return [None if qq == 0 else Fraction(pp, qq) for pp, qq in self.seq]

    def recurrence_holds(self) -> bool:
        for n in range(1, len(self.seq) - 1):
            an = self.a[n - 1]
            (p0, q0), (p1, q1), (p2, q2) = self.seq[n - 1], self.seq[n], self.seq[n + 1]
            if an < 1 or p2 != an * p1 + p0 or q2 != an * q1 + q0:
                return False
        return True


def farey_approximations(interval: FareyInterval) -> FareyApproximations:
    target = interval.mediant
    n = math.floor(interval.lo)
    lo, hi = (n, 1), (n + 1, 1)
    end = ((interval.p, interval.q), (interval.p2, interval.q2))
    moves = []
    while (lo, hi) != end:
        m = (lo[0] + hi[0], lo[1] + hi[1])
        if Fraction(*m) < target:
            lo = m
            moves.append("L")
        else:
            hi = m
            moves.append("H")
        if lo[1] + hi[1] > interval.size:
            raise InternalCheckError("descent overshot the Farey interval")
    # runs of identical moves collapse into one new approximation each
    runs: list[tuple[str, int]] = []
    for mv in moves:
        if runs and runs[-1][0] == mv:
            runs[-1] = (mv, runs[-1][1] + 1)
        else:
            runs.append((mv, 1))
    lo, hi = (n, 1), (n + 1, 1)
    if not runs or runs[0][0] == "L":
        seq = [(1, 0), lo, hi]
    else:
        seq = [(-1, 0), hi, lo]
    a = [1]
    for mv, count in runs:
        fixed, moving = seq[-1], seq[-2]
        new = (moving[0] + count * fixed[0], moving[1] + count * fixed[1])
        seq.append(new)
        a.append(count)
    out = FareyApproximations(tuple(seq), tuple(a))
    if set(seq[-2:]) != set(end) or not out.recurrence_holds():
        raise InternalCheckError(f"approximation sequence for {interval} is inconsistent")
    return out


def _n_k(interval: FareyInterval, k: int) -> int:
    # unique integer with ]k p/q - n, k p2/q2 - n[ inside ]0, 1[
    return (k * interval.p) // interval.q


def no_integer_check(interval: FareyInterval, k_max: int | None = None) -> dict:
    """Check ]k p/q, k p2/q2[ contains no integer for k = 1 .. k_max."""
    k_max = interval.size - 1 if k_max is None else k_max
    for k in range(1, k_max + 1):
        lo, hi = k * interval.lo, k * interval.hi
        first_int_above = math.floor(lo) + 1
        if first_int_above < hi:
            return {"ok": False, "witness_k": k, "integer": first_int_above}
    return {"ok": True, "witness_k": None, "integer": None}


@dataclass(frozen=True)
class IteratePlan:
    interval: FareyInterval
    n_k: tuple[int, ...]
    sigma: tuple[int, ...]

    def n(self, k: int) -> int:
        return self.n_k[k - 1]

    def as_dict(self) -> dict:
        return {"interval": str(self.interval), "n_k": list(self.n_k), "sigma": list(self.sigma)}


def iterate_plan(interval: FareyInterval) -> IteratePlan:
    if interval.size < 2:
        raise InvalidInputError("q + q2 must be >= 2")
    ks = range(1, interval.size)
    n_k = tuple(_n_k(interval, k) for k in ks)
    for k in ks:
        lo = k * interval.lo - n_k[k - 1]
        hi = k * interval.hi - n_k[k - 1]
        if not (0 <= lo and hi <= 1):
            raise InternalCheckError(f"no valid n_k for k={k} in {interval}")
    alpha = interval.mediant
    sigma = tuple(sorted(ks, key=lambda k: k * alpha - n_k[k - 1]))
    return IteratePlan(interval, n_k, sigma)


def order_law(interval: FareyInterval, a: tuple[int, int], b: tuple[int, int]) -> bool:
    """Whether ``k alpha - l < k' alpha - l'`` for every alpha in the interval."""
    (k, l), (k2, l2) = a, b
    if (k, l) == (k2, l2):
        raise InvalidInputError("pairs must differ")
    limit = interval.size - 1
    for kk in (k, k2):
        if not 0 <= kk <= limit:
            raise InvalidInputError(f"k={kk} outside 0..{limit}")

    def diff(alpha: Fraction) -> Fraction:
        return (k - k2) * alpha - (l - l2)

    at_lo, at_hi = diff(interval.lo), diff(interval.hi)
    if at_lo * at_hi < 0:
        raise InternalCheckError(f"order of {a} and {b} changes inside {interval}")
    return diff(interval.mediant) < 0
