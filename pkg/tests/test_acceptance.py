"""Acceptance criteria, one test each; every test records a PASS/FAIL line."""
import math
import random
import time
from fractions import Fraction

import numpy as np
import shapely

from pseudorot.arc_finder import return_maps
from pseudorot.arc_geometry import (TAU_GEO, EssentialArc, arc_less, hausdorff, in_right_region,
                                    map_arc, vee)
from pseudorot.band_maps import make_map
from pseudorot.disc import Alexander, Composed, RadialProfile, Twist, factorize_disc
from pseudorot.errors import NonGenericInputError
from pseudorot.farey import (iterate_plan, make_farey, no_integer_check, order_law,
                             stern_brocot_intervals)
from pseudorot.rotation import TAU_S, lemma21_check, rotation_estimate
from pseudorot.tiling import build_tiling, conjugacy_error_budget, exact_partition, width_identity

SIGMA = (5, 2, 7, 4, 1, 6, 3)


def test_criterion_1_farey_exhaustive(record_criterion):
    start = time.perf_counter()
    bad = []
    count = 0
    for iv in stern_brocot_intervals(50):
        count += 1
        if not no_integer_check(iv)["ok"] or iv.length != Fraction(1, iv.q * iv.q2):
            bad.append(str(iv))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 10
    record_criterion(1, "Farey intervals with q+q2 <= 50: no integer in ]k p/q, k p2/q2[, "
                     "length 1/(q q2)", ok, f"{count} intervals, {len(bad)} bad, {elapsed:.2f}s")
    assert ok


def test_criterion_2_sigma_stability(record_criterion):
    start = time.perf_counter()
    rng = random.Random(0)
    pool = list(stern_brocot_intervals(100))
    chosen = rng.sample(pool, 20)
    mismatches = 0
    for iv in chosen:
        sigma = iterate_plan(iv).sigma
        for _ in range(100):
            u = Fraction(rng.randint(1, 10**9 - 1), 10**9)
            alpha = iv.lo + u * iv.length
            order = tuple(sorted(range(1, iv.size), key=lambda k: (k * alpha) % 1))
            mismatches += order != sigma
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 30
    record_criterion(2, "sorted fractional parts of k alpha reproduce sigma", ok,
                     f"20 intervals x 100 alpha, {mismatches} mismatches, {elapsed:.2f}s")
    assert ok


def test_criterion_3_desk_scale_arcs(desk_certificates, record_criterion):
    details, ok = [], True
    for name, (_, cert, seconds) in desk_certificates.items():
        good = (len(cert.iterates) + 1 == 8
                and cert.min_pairwise_distance > 10 * TAU_GEO
                and cert.cyclic_order == (0,) + SIGMA
                and seconds < 120)
        ok &= good
        details.append(f"{name}: d={cert.min_pairwise_distance:.3g} "
                       f"order={list(cert.cyclic_order)} {seconds:.1f}s")
    record_criterion(3, "8 pairwise disjoint arcs in sigma order for the desk maps", ok,
                     "; ".join(details))
    assert ok


def test_criterion_4_order_law(desk_certificates, record_criterion):
    iv = make_farey(3, 5, 2, 3)
    tested = agree = 0
    for h, cert, _ in desk_certificates.values():
        lifted = [cert.arc]
        for _ in range(7):
            lifted.append(map_arc(h, lifted[-1]))
        arcs = {(k, l): lifted[k].translate(-l) for k in range(8) for l in (-1, 0, 1)}
        for a, arc_a in arcs.items():
            for b, arc_b in arcs.items():
                if a == b:
                    continue
                tested += 1
                agree += arc_less(arc_a, arc_b) == order_law(iv, a, b)
    ok = tested > 0 and agree == tested
    record_criterion(4, "arc order of lifted iterates matches k alpha - l order", ok,
                     f"{agree}/{tested} pairs agree")
    assert ok


def _random_arc(rng: np.random.Generator) -> EssentialArc:
    n = int(rng.integers(2, 9))
    t = np.concatenate([[0.0], np.sort(rng.uniform(0.02, 0.98, n)), [1.0]])
    x = rng.uniform(-0.3, 0.3, n + 2)
    return EssentialArc(np.column_stack([x, t]))


def _vee_properties(rng, arcs, result) -> bool:
    union = shapely.unary_union([a.line for a in arcs])
    subset = result.line.difference(union.buffer(TAU_GEO)).length <= TAU_GEO
    pts = np.column_stack([rng.uniform(-0.5, 0.5, 300), rng.random(300)])
    pts = np.vstack([pts] + [a.vertices for a in arcs])
    in_some = np.zeros(len(pts), dtype=bool)
    for a in arcs:
        in_some |= in_right_region(a, pts)
    contained = bool(np.all(in_right_region(result, pts)[in_some]))
    return subset and contained


def test_criterion_5_vee_algebra(record_criterion):
    start = time.perf_counter()
    rng = np.random.default_rng(0)
    cases = passed = skipped = 0
    while cases < 200:
        size = 2 if cases < 100 else 3
        arcs = [_random_arc(rng) for _ in range(size)]
        try:
            if size == 2:
                v1, v2 = vee(*arcs), vee(arcs[1], arcs[0])
            else:
                v1 = vee(vee(arcs[0], arcs[1]), arcs[2])
                v2 = vee(arcs[0], vee(arcs[1], arcs[2]))
        except NonGenericInputError:
            skipped += 1
            continue
        cases += 1
        same = hausdorff(v1, v2) <= TAU_GEO
        passed += same and _vee_properties(rng, arcs, v1)
    elapsed = time.perf_counter() - start
    ok = passed == cases and elapsed < 30
    record_criterion(5, "vee: inside the union, contains both right regions, commutative and "
                     "associative", ok,
                     f"{passed}/{cases} cases, {skipped} non-generic skipped, {elapsed:.1f}s")
    assert ok


def test_criterion_6_pseudo_orbit_bound(desk_certificates, record_criterion):
    start = time.perf_counter()
    iv = make_farey(3, 5, 2, 3)
    rng = np.random.default_rng(0)
    worst_margin = math.inf
    for h, cert, _ in desk_certificates.values():
        prov = cert.provenance
        N, eps, M = prov["N"], prov["eps"], prov["M"]
        phi1, phi2 = return_maps(h, iv)
        n = 1000
        x0, t0 = rng.random(n), rng.random(n)
        x, t = x0.copy(), t0.copy()
        lowest = np.zeros(n)
        # quarters: random, greedy leftward, all phi2 leftward, all phi1 leftward
        mode = np.arange(n) % 4
        for _ in range(10 * N):
            x1, t1 = phi1.apply(x, t)
            x2, t2 = phi2.apply(x, t)
            pick2 = np.where(mode == 0, rng.random(n) < 0.5, np.where(mode == 1, x2 < x1, mode == 2))
            x = np.where(pick2, x2, x1)
            t = np.where(pick2, t2, t1)
            r = eps * (1 - 1e-9) * np.sqrt(rng.random(n))
            ang = rng.random(n) * 2 * np.pi
            x = x + np.where(mode == 0, r * np.cos(ang), -eps * (1 - 1e-9))
            t = np.clip(t + np.where(mode == 0, r * np.sin(ang), 0.0), 0.0, 1.0)
            lowest = np.minimum(lowest, x - x0)
        worst_margin = min(worst_margin, float(lowest.min() + M + TAU_S))
    elapsed = time.perf_counter() - start
    ok = worst_margin >= 0 and elapsed < 60
    record_criterion(6, "eps-pseudo-orbits of length 10 N stay above x0 - M", ok,
                     f"smallest margin {worst_margin:.3g}, {elapsed:.1f}s")
    assert ok


def test_criterion_7_tiling(record_criterion):
    start = time.perf_counter()
    iv = make_farey(3, 5, 2, 3)
    cover = build_tiling(iv, 0.63).coverage(100_000, seed=0)
    exact = all(width_identity(iv, a) == 1 and exact_partition(iv, a)
                for a in (Fraction(63, 100), iv.mediant, Fraction(61, 100)))
    elapsed = time.perf_counter() - start
    ok = cover["uncovered"] == 0 and cover["interior_overlaps"] == 0 and exact and elapsed < 10
    record_criterion(7, "tiling covers the annulus with disjoint interiors; widths sum to 1", ok,
                     f"{cover['uncovered']} uncovered, {cover['interior_overlaps']} overlaps of "
                     f"{cover['samples']}; exact identity {exact}; {elapsed:.2f}s")
    assert ok


DISC_SUITE = {
    "twist": Twist(2.0, 0.9),
    "offcenter_twist": Twist(3.0, 0.4, (0.3, -0.2)),
    "profile": RadialProfile(np.array([[0, 0], [0.3, 0.6], [0.7, 0.8], [1, 1]])),
    "twist_after_profile": Composed((RadialProfile(np.array([[0, 0], [0.5, 0.2], [1, 1]])),
                                     Twist(1.5, 1.0))),
    "rescaled_twist": Alexander(Twist(4.0, 1.0), 0.7),
}


def test_criterion_8_disc_factorization(record_criterion):
    start = time.perf_counter()
    failures = []
    worst = 0.0
    for name, h in DISC_SUITE.items():
        for eps in (0.5, 0.2, 0.1):
            rep = factorize_disc(h, eps).report(h, grid=200)
            worst = max(worst, rep["residual"])
            if not (rep["count"] <= math.ceil(4 / eps) + 4
                    and rep["max_factor_distance"] < eps and rep["residual"] < 1e-6):
                failures.append(f"{name}@{eps}")
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 60
    record_criterion(8, "disc maps split into <= ceil(4/eps)+4 eps-small factors", ok,
                     f"15 cases, failures {failures}, worst residual {worst:.2g}, {elapsed:.1f}s")
    assert ok


def test_criterion_9_rotation_module(record_criterion):
    start = time.perf_counter()
    rng = np.random.default_rng(0)
    worst_rot = 0.0
    for alpha in rng.uniform(-2, 2, 50):
        est = rotation_estimate(make_map("rotation", {"alpha": alpha}))
        worst_rot = max(worst_rot, abs(est.lo - alpha), abs(est.hi - alpha))
    registry = [
        make_map("rotation", {"alpha": 0.63}),
        make_map("linear_twist", {"alpha": 0.615, "beta": 0.04}),
        make_map("perturbed_twist", {"alpha": 0.62, "beta": 0.02, "eps_p": 0.01}),
        make_map("composed", {"maps": [
            {"family": "perturbed_twist", "params": {"alpha": 0.3, "beta": 0.1, "eps_p": 0.2}},
            {"family": "rotation", "params": {"alpha": 0.2}},
        ]}),
    ]
    worst_affine = max(lemma21_check(m, 3, 5)["distance"] for m in registry)
    elapsed = time.perf_counter() - start
    ok = worst_rot < 1e-9 and worst_affine < 1e-6 and elapsed < 10
    record_criterion(9, "rotation of T_alpha recovered; word estimate is affine in q, p", ok,
                     f"max |est - alpha| {worst_rot:.2g}, max affine gap {worst_affine:.2g}, "
                     f"{elapsed:.2f}s")
    assert ok


def test_error_budget_formula(record_criterion):
    small = conjugacy_error_budget(make_farey(3, 5, 2, 3))
    big = conjugacy_error_budget(make_farey(9, 50, 11, 61))
    ok = (small.budget == 1 and big.budget == 0.6 and math.isclose(big.eps, 12 / 38)
          and math.isclose(big.factor_budget, 48) and big.factor_budget_ok)
    record_criterion("note", "error budget 30/min(q, q2) formula only; the conjugacy itself is "
                     "not built", ok, f"]3/5,2/3[ -> {small.budget}, ]9/50,11/61[ -> {big.budget}")
    assert ok
