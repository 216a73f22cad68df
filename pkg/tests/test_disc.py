import math

import numpy as np
import pytest

from pseudorot.disc import (Alexander, BoundaryExtension, CircleMap, Composed, Identity,
                            RadialProfile, Twist, alexander_split, circle_steps, disc_from_spec,
                            disc_grid, factorize_disc, fixes_boundary, left_partial_gaps, power,
                            radial_squeeze, squeeze_count, sup_distance)
from pseudorot.errors import InvalidInputError

SUITE = {
    "twist": Twist(2.0, 0.9),
    "offcenter_twist": Twist(3.0, 0.4, (0.3, -0.2)),
    "profile": RadialProfile(np.array([[0, 0], [0.3, 0.6], [0.7, 0.8], [1, 1]])),
    "twist_after_profile": Composed((RadialProfile(np.array([[0, 0], [0.5, 0.2], [1, 1]])),
                                     Twist(1.5, 1.0))),
    "rescaled_twist": Alexander(Twist(4.0, 1.0), 0.7),
}


@pytest.mark.parametrize("name", SUITE)
def test_inverses_and_specs(name):
    h = SUITE[name]
    pts = disc_grid(40)
    assert np.allclose(h.inverse().apply(h.apply(pts)), pts, atol=1e-12)
    again = disc_from_spec(h.to_spec())
    assert np.allclose(again.apply(pts), h.apply(pts))
    assert fixes_boundary(h)


def test_bad_specs():
    for spec in ({"kind": "blob"}, {"kind": "twist"}, {"kind": "profile", "breakpoints": [[0, 0]]},
                 {"kind": "profile", "breakpoints": [[0, 0], [0.5, 0.6], [0.4, 0.7], [1, 1]]}):
        with pytest.raises(InvalidInputError):
            disc_from_spec(spec)
    with pytest.raises(InvalidInputError):
        Twist(1.0, 0.8, (0.5, 0.0))


def test_alexander_split_identity():
    h0, h1, t0 = alexander_split(Identity(), 0.1)
    assert t0 == 0.5 and sup_distance(h0) == 0 and sup_distance(h1) == 0


def test_alexander_split_properties():
    h = SUITE["twist"]
    h0, h1, t0 = alexander_split(h, 0.1)
    pts = disc_grid(120)
    assert sup_distance(h0, pts=pts) < 0.1
    assert np.allclose(h1.apply(h0.apply(pts)), h.apply(pts), atol=1e-12)
    ring = pts[np.hypot(*pts.T) >= t0]
    assert np.allclose(h1.apply(ring), ring)


def test_alexander_needs_fixed_boundary():
    with pytest.raises(InvalidInputError):
        alexander_split(BoundaryExtension(CircleMap(np.array([[0, 0], [3, 3.5], [2 * np.pi] * 2]))), 0.1)


@pytest.mark.parametrize("eps", [0.5, 0.2, 0.1, 0.05])
def test_radial_squeeze(eps):
    delta = 0.125
    g = radial_squeeze(delta, eps)
    assert np.allclose(g.apply([[0.0, 0.0]]), 0)
    assert sup_distance(g) < eps
    m = squeeze_count(eps)
    assert 2 / eps <= m < 2 / eps + 1
    r = np.linspace(0, 1 - delta, 200)
    pts = np.column_stack([r, np.zeros_like(r)])
    assert np.max(np.hypot(*power(g, m).apply(pts).T)) < eps / 2


def test_identity_is_one_factor():
    fac = factorize_disc(Identity(), 0.1)
    assert len(fac.factors) == 1 and fac.report(Identity())["ok"]


@pytest.mark.parametrize("name", SUITE)
def test_factorization_of_suite(name):
    h = SUITE[name]
    fac = factorize_disc(h, 0.1)
    rep = fac.report(h, grid=120)
    assert rep["count"] <= math.ceil(4 / 0.1) + 4 == rep["bound"]
    assert rep["max_factor_distance"] < 0.1 and rep["residual"] < 1e-6


def test_left_partial_products_need_not_be_close():
    fac = factorize_disc(SUITE["twist"], 0.1)
    assert max(left_partial_gaps(fac.factors, grid=100)) > 0.1


def test_circle_steps():
    F = CircleMap(np.array([[0, 0], [1, 1], [2, 2.8], [4, 4.2], [5, 5], [2 * np.pi, 2 * np.pi]]))
    assert F.fixed_arcs() == [(0.0, 1.0), (5.0, 2 * np.pi)]
    steps = circle_steps(F, 0.2)
    assert len(steps) <= math.ceil(2 / 0.2) + 1
    th = np.linspace(0, 2 * np.pi, 1000)
    out = th
    for s in steps:
        assert np.max(np.abs(s.lift(out) - out)) < 0.2
        out = s.lift(out)
    assert np.allclose(out, F.lift(th))


def test_boundary_mode():
    F = CircleMap(np.array([[0, 0], [1, 1], [2, 2.8], [4, 4.2], [5, 5], [2 * np.pi, 2 * np.pi]]))
    h = Composed((Twist(1.0, 0.8), BoundaryExtension(F)))
    fac = factorize_disc(h, 0.2, mode="arcs")
    rep = fac.report(h, grid=120)
    assert rep["ok"] and rep["bound"] == math.ceil(6 / 0.2) + 5
    with pytest.raises(InvalidInputError):
        factorize_disc(h, 0.2, mode="nope")
