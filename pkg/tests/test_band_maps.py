import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pseudorot.band_maps import (BandPoint, WordMap, families, iterate, make_map, map_from_spec,
                                 orbit_arrays, translation_word, word_from_spec)
from pseudorot.errors import InvalidInputError

MAPS = [
    make_map("rotation", {"alpha": 0.63}),
    make_map("linear_twist", {"alpha": 0.615, "beta": 0.04}),
    make_map("perturbed_twist", {"alpha": 0.62, "beta": 0.02, "eps_p": 0.01}),
    make_map("perturbed_twist", {"alpha": 0.1, "beta": 0.5, "eps_p": 0.9}),
    make_map("composed", {"maps": [
        {"family": "perturbed_twist", "params": {"alpha": 0.3, "beta": 0.1, "eps_p": -0.4}},
        {"family": "linear_twist", "params": {"alpha": 0.2, "beta": -0.05}},
    ]}),
]

coords = st.tuples(st.floats(-5, 5), st.floats(0, 1))


@pytest.mark.parametrize("m", MAPS, ids=lambda m: m.family)
@settings(max_examples=200, deadline=None)
@given(p=coords)
def test_inverse_round_trip(m, p):
    x, t = m.inverse().apply(*m.apply(*p))
    assert abs(x - p[0]) < 1e-9 and abs(t - p[1]) < 1e-9


@pytest.mark.parametrize("m", MAPS, ids=lambda m: m.family)
def test_commutes_with_unit_translation_and_keeps_boundary(m):
    rng = np.random.default_rng(1)
    x, t = rng.uniform(-3, 3, 500), rng.random(500)
    a = m.apply(x + 1, t)
    b = m.apply(x, t)
    assert np.allclose(a[0], b[0] + 1, atol=1e-12) and np.allclose(a[1], b[1], atol=1e-12)
    for edge in (0.0, 1.0):
        _, tt = m.apply(x, np.full_like(x, edge))
        assert np.allclose(tt, edge, atol=1e-12)


def test_twist_formula():
    m = make_map("linear_twist", {"alpha": 0.5, "beta": 0.25})
    assert tuple(m(BandPoint(1.0, 0.5))) == (1.625, 0.5)


def test_word_letters_apply_right_to_left():
    h = make_map("rotation", {"alpha": 0.63})
    phi1 = WordMap(h, ((5, -3),))
    x, _ = phi1.apply(0.0, 0.3)
    assert x == pytest.approx(5 * 0.63 - 3)
    w = word_from_spec(h, [{"h_exp": 1, "t_shift": 0}, {"h_exp": 0, "t_shift": 2}])
    assert w.apply(0.0, 0.0)[0] == pytest.approx(2.63)
    assert translation_word(h, -1).apply(0.5, 0.5)[0] == pytest.approx(-0.5)
    assert w.inverse().apply(*w.apply(0.1, 0.4))[0] == pytest.approx(0.1)


def test_spec_round_trip():
    for m in MAPS:
        assert map_from_spec(m.to_spec()) == m
    inv = map_from_spec({**MAPS[1].to_spec(), "direction": "inverse"})
    assert inv == MAPS[1].inverse()


@pytest.mark.parametrize("spec", [
    {"family": "nope", "params": {}},
    {"family": "rotation", "params": {}},
    {"family": "rotation", "params": {"alpha": 0.1, "beta": 1}},
    {"family": "rotation", "params": {"alpha": "x"}},
    {"family": "rotation", "params": {"alpha": float("nan")}},
    {"family": "perturbed_twist", "params": {"alpha": 0, "beta": 0, "eps_p": 1.0}},
    {"family": "composed", "params": {"maps": []}},
    {"family": "rotation", "params": {"alpha": 0.1}, "direction": "sideways"},
    ["rotation"],
])
def test_bad_specs_rejected(spec):
    with pytest.raises(InvalidInputError):
        map_from_spec(spec)


def test_band_point_validates_height():
    with pytest.raises(InvalidInputError):
        BandPoint(0.0, 1.5)


def test_orbits():
    m = MAPS[0]
    orbit = iterate(m, BandPoint(0.0, 0.2), 3)
    assert [round(p.x, 12) for p in orbit] == [0.0, 0.63, 1.26, 1.89]
    xs, ts = orbit_arrays(m, [0.0, 1.0], [0.0, 1.0], 2)
    assert xs.shape == (3, 2) and xs[2, 1] == pytest.approx(2.26)
    assert "perturbed_twist" in families() and "composed" in families()
