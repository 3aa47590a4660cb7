"""Acceptance suite: one test per criterion, each printing a PASS line
with its runtime.  Property criteria use fixed seeds so runs are
reproducible."""

import math
import time

import numpy as np
import pytest

from oracle2d import oracle_agreement
from qcqp_hull.certify import analyze_problem, check_conditions
from qcqp_hull.core import EpigraphPoint
from qcqp_hull.gamma import build_gamma_data, classify_face, dd_vrep, enumerate_faces, optimal_face
from qcqp_hull.generators import example1, gtrs, quadratic_matrix_program, swiss_cheese
from qcqp_hull.hull import decompose, soc_description, verify_certificate
from qcqp_hull.linalg import kron_multiplicity
from qcqp_hull.solve import brute_force, minimize_soc

GTRS_INSTANCES = 50
GTRS_POINTS = 100
QMP_INSTANCES = 20
ORACLE_RANDOM_INSTANCES = 10
ORACLE_PROBES = 1000


def report(num, elapsed, detail=""):
    print(f"CRITERION {num}: PASS ({elapsed:.3f} s) {detail}")


def sample_relaxed_points(p, gd, count, rng, box=3.0, spread=2.0):
    pts = []
    while len(pts) < count:
        x = rng.uniform(-box, box, size=p.dim)
        res = optimal_face(gd.v, p, x, gd.h)
        if res is None:
            continue
        sup, _ = res
        pts.append(EpigraphPoint(x, 0.5 * (sup + abs(rng.uniform(0.0, spread)))))
    return pts


def test_criterion_1_multiplier_set_generators(ex1, ex1_gd):
    start = time.perf_counter()
    v = dd_vrep(ex1_gd.h)
    elapsed = time.perf_counter() - start
    expected = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]])
    assert v.vertices.shape == (3, 2)
    assert np.max(np.abs(v.vertices - expected)) <= 1e-9
    assert v.rays.shape == (1, 2)
    assert np.max(np.abs(v.rays[0] - np.array([1.0, 1.0]) / math.sqrt(2.0))) <= 1e-9
    assert elapsed < 0.1
    report(1, elapsed, "vertex/ray representation exact to 1e-9")


def test_criterion_2_hull_description(ex1, ex1_gd):
    start = time.perf_counter()
    soc = soc_description(ex1_gd.v, ex1)
    elapsed = time.perf_counter() - start
    assert len(soc.epigraph) == 3
    assert len(soc.homogeneous) == 0  # the ray constraint is constant and dropped
    expected = [
        (np.eye(2), np.array([5.0, 0.0]), 0.0),
        (np.diag([2.0, 0.0]), np.array([5.0, 0.0]), -5.0),
        (np.diag([0.0, 2.0]), np.array([5.0, 0.0]), -50.0),
    ]
    remaining = list(soc.epigraph)
    for A, b, c in expected:
        hits = [
            i
            for i, g in enumerate(remaining)
            if np.max(np.abs(g.A - A)) <= 1e-12
            and np.max(np.abs(g.b - b)) <= 1e-12
            and abs(g.c - c) <= 1e-12
        ]
        assert len(hits) == 1
        remaining.pop(hits[0])
    assert elapsed < 0.1
    report(2, elapsed, "three constraints, coefficient match to 1e-12")


def test_criterion_3_optimum(ex1, ex1_soc):
    start = time.perf_counter()
    res = minimize_soc(ex1_soc, (-10.0, 10.0), tol=1e-8)
    bf_val, _ = brute_force(ex1, (-10.0, 10.0), grid_points=400)
    elapsed = time.perf_counter() - start
    assert res.value == pytest.approx(-17.5, abs=1e-5)
    assert abs(bf_val - res.value) <= 1e-3
    assert res.minimizer[0] == pytest.approx(-2.5, abs=1e-4)
    assert abs(res.minimizer[1]) == pytest.approx(math.sqrt(1.25), abs=1e-4)
    assert elapsed < 5.0
    report(3, elapsed, f"relaxed optimum {res.value:.8f}, grid check {bf_val:.6f}")


def test_criterion_4_decomposition_certificate(ex1, ex1_gd):
    target = EpigraphPoint([4.0, 2.0], 33.5)
    start = time.perf_counter()
    comb = decompose(ex1, ex1_gd, target)
    ok = verify_certificate(ex1, comb, target, tol=1e-8)
    elapsed = time.perf_counter() - start
    assert ok
    s11 = math.sqrt(11.0)
    assert len(comb.points) == 2
    assert np.max(np.abs(comb.points[0].x - np.array([4.0, s11]))) <= 1e-8
    assert np.max(np.abs(comb.points[1].x - np.array([4.0, -s11]))) <= 1e-8
    assert comb.points[0].t == pytest.approx(33.5, abs=1e-8)
    assert comb.points[1].t == pytest.approx(33.5, abs=1e-8)
    assert comb.weights[0] == pytest.approx((2 + s11) / (2 * s11), abs=1e-8)
    assert comb.weights[1] == pytest.approx((s11 - 2) / (2 * s11), abs=1e-8)
    assert elapsed < 0.1
    report(4, elapsed, "two-point certificate with exact weights, verified")


def test_criterion_5_single_constraint_family():
    start = time.perf_counter()
    total_points = 0
    for seed in range(GTRS_INSTANCES):
        n = 2 + seed % 5  # N in 2..6
        p = gtrs(n, seed)
        gd = build_gamma_data(p)
        soc = soc_description(gd.v, p)
        rng = np.random.default_rng(1000 + seed)
        for pt in sample_relaxed_points(p, gd, GTRS_POINTS, rng):
            comb = decompose(p, gd, pt, tol=1e-8, soc=soc)
            assert verify_certificate(p, comb, pt, tol=1e-8)
            # single constraint: any split happens at the root call only
            for rec in comb.trace:
                assert rec["depth"] <= p.num_constraints - 1
            total_points += 1
    elapsed = time.perf_counter() - start
    assert total_points == GTRS_INSTANCES * GTRS_POINTS
    assert elapsed < 60.0
    report(5, elapsed, f"{total_points} certificates verified across {GTRS_INSTANCES} instances")


def test_criterion_6_multiplicity_family():
    start = time.perf_counter()
    for seed in range(QMP_INSTANCES):
        p = quadratic_matrix_program(2, 3, 2, seed=seed)
        kron = kron_multiplicity(p)
        assert kron.k >= 3
        gd = build_gamma_data(p)
        rep = check_conditions(p, gd, kron)
        assert rep.theorem2
        for f in enumerate_faces(gd.h, gd.v):
            cls = classify_face(f, p, gd.sd, gd.h)
            if not cls.definite:
                assert cls.dim_v >= kron.k
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0
    report(6, elapsed, f"{QMP_INSTANCES} block-structured instances")


def _oracle_instances():
    yield example1(), [(-3.0, 3.0)] * 2, [(-9.0, 9.0)] * 2, 6.0
    count = 0
    seed = 0
    while count < 5:  # tame single-constraint instances
        p = gtrs(2, seed)
        seed += 1
        gd = build_gamma_data(p)
        soc = soc_description(gd.v, p)
        coef = max(
            max(np.max(np.abs(g.A)), np.max(np.abs(g.b)), abs(g.c))
            for g in soc.epigraph + soc.homogeneous
        )
        if coef > 30.0:
            continue
        count += 1
        yield p, [(-2.0, 2.0)] * 2, [(-8.0, 8.0)] * 2, 5.0
    for i, counts in enumerate(((1, 1, 0), (1, 0, 1), (0, 1, 1))):
        yield swiss_cheese(2, *counts, seed=20 + i), [(-2.0, 2.0)] * 2, [(-8.0, 8.0)] * 2, 5.0
    for seed in (30, 31):
        yield quadratic_matrix_program(1, 2, 2, seed=seed), [(-2.0, 2.0)] * 2, [(-8.0, 8.0)] * 2, 5.0


def test_criterion_7_hull_oracle_2d():
    start = time.perf_counter()
    instances = list(_oracle_instances())
    assert len(instances) == 1 + ORACLE_RANDOM_INSTANCES
    worst = 1.0
    for i, (p, probe_box, sample_box, spread) in enumerate(instances):
        report_i, gd = analyze_problem(p)
        assert report_i.hull_guaranteed, f"oracle instance {i} must pass a condition"
        soc = soc_description(gd.v, p)
        rng = np.random.default_rng(5000 + i)
        agreement, n = oracle_agreement(
            p, soc, rng, probe_box, sample_box,
            resolution=501, count=ORACLE_PROBES, spread=spread,
        )
        assert n == ORACLE_PROBES
        assert agreement >= 0.995, f"instance {i}: agreement {agreement:.4f}"
        worst = min(worst, agreement)
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0
    report(7, elapsed, f"11 instances, worst agreement {worst:.4f}")


def test_criterion_8_property_based_coverage():
    # No numeric tables exist to pin beyond the worked instance; the
    # remaining guarantees are exercised as the properties above, at the
    # stated instance and sample counts.
    start = time.perf_counter()
    assert GTRS_INSTANCES * GTRS_POINTS >= 5000
    assert QMP_INSTANCES >= 20
    assert ORACLE_RANDOM_INSTANCES >= 10 and ORACLE_PROBES >= 1000
    report(8, time.perf_counter() - start, "property-based coverage locked to stated sizes")
