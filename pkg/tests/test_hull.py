import math

import numpy as np
import pytest

from oracle2d import oracle_agreement
from qcqp_hull.core import EpigraphPoint, Qcqp, QuadraticFn, check_feasible
from qcqp_hull.errors import NotInDsdp
from qcqp_hull.gamma import build_gamma_data, optimal_face
from qcqp_hull.generators import example1, gtrs, quadratic_matrix_program, swiss_cheese
from qcqp_hull.hull import (
    ConvexCombination,
    decompose,
    dsdp_membership,
    soc_description,
    verify_certificate,
)

SQRT11 = math.sqrt(11.0)


def sample_relaxed_points(p, gd, count, rng, box=3.0, spread=2.0):
    """Points of the relaxed epigraph: x in a box, 2t = sup + |noise|."""
    pts = []
    while len(pts) < count:
        x = rng.uniform(-box, box, size=p.dim)
        res = optimal_face(gd.v, p, x, gd.h)
        if res is None:
            continue
        sup, _ = res
        pts.append(EpigraphPoint(x, 0.5 * (sup + abs(rng.uniform(0.0, spread)))))
    return pts


class TestSocDescription:
    def test_example1_constraints(self, ex1, ex1_soc):
        assert len(ex1_soc.epigraph) == 3
        assert len(ex1_soc.homogeneous) == 0  # the ray reduces to -55/sqrt(2) <= 0
        expected = [
            (np.eye(2), [5.0, 0.0], 0.0),
            (np.diag([2.0, 0.0]), [5.0, 0.0], -5.0),
            (np.diag([0.0, 2.0]), [5.0, 0.0], -50.0),
        ]
        unmatched = list(ex1_soc.epigraph)
        for A, b, c in expected:
            hit = [
                g
                for g in unmatched
                if np.max(np.abs(g.A - A)) <= 1e-12
                and np.max(np.abs(g.b - b)) <= 1e-12
                and abs(g.c - c) <= 1e-12
            ]
            assert len(hit) == 1, f"constraint with constant {c} not matched within 1e-12"
            unmatched.remove(hit[0])
        assert not unmatched

    def test_point_polyhedron_gives_objective_epigraph(self):
        p = Qcqp(
            QuadraticFn(np.eye(2), np.zeros(2), 0.0),
            (QuadraticFn(np.diag([1.0, -1.0]), np.zeros(2), 0.0),),
            0,
            1,  # equality: gamma bounded to the single point 0... interval [-1, 1]
        )
        # actually gamma ranges over [-1, 1]; use a forced singleton instead:
        p = Qcqp(
            QuadraticFn(np.eye(1), np.zeros(1), 0.0),
            (QuadraticFn(np.eye(1), np.zeros(1), 0.0),),
            0,
            1,
        )
        gd = build_gamma_data(p)
        # gamma in [-1, inf) for 1 + gamma >= 0; not a point. Narrow explicitly:
        from qcqp_hull.gamma import PolyhedronV

        v = PolyhedronV(vertices=np.zeros((1, 1)), rays=np.zeros((0, 1)))
        soc = soc_description(v, p)
        assert len(soc.epigraph) == 1 and len(soc.homogeneous) == 0
        g = soc.epigraph[0]
        assert np.allclose(g.A, p.objective.A) and g.c == p.objective.c

    def test_interval_two_epigraph_constraints(self):
        p = Qcqp(
            QuadraticFn(np.eye(2), np.array([1.0, 0.0]), 0.0),
            (QuadraticFn(np.diag([1.0, -1.0]), np.zeros(2), -2.0),),
            1,
            0,
        )
        gd = build_gamma_data(p)
        soc = soc_description(gd.v, p)
        assert len(soc.epigraph) == 2 and len(soc.homogeneous) == 0
        consts = sorted(g.c for g in soc.epigraph)
        assert consts == [pytest.approx(-2.0), pytest.approx(0.0)]

    def test_ray_constraint_kept_when_nonconstant(self):
        # single convex constraint: gamma ray [0, inf) keeps q_1 <= 0
        p = Qcqp(
            QuadraticFn(np.eye(2), np.zeros(2), 0.0),
            (QuadraticFn(np.eye(2), np.zeros(2), -1.0),),
            1,
            0,
        )
        gd = build_gamma_data(p)
        soc = soc_description(gd.v, p)
        assert len(soc.homogeneous) == 1
        h = soc.homogeneous[0]
        assert np.allclose(h.A, np.eye(2)) and h.c == pytest.approx(-1.0)


class TestMembership:
    def test_example1_points(self, ex1_soc):
        inside, worst = dsdp_membership(ex1_soc, EpigraphPoint([0.0, 0.0], 0.0))
        assert inside and worst == pytest.approx(0.0, abs=1e-12)
        inside, worst = dsdp_membership(ex1_soc, EpigraphPoint([4.0, 2.0], 33.5))
        assert inside and worst == pytest.approx(0.0, abs=1e-9)
        inside, worst = dsdp_membership(ex1_soc, EpigraphPoint([4.0, 2.0], 33.0))
        assert not inside and worst == pytest.approx(1.0, abs=1e-9)


class TestDecompose:
    def test_singleton_at_definite_face(self, ex1, ex1_gd):
        comb = decompose(ex1, ex1_gd, EpigraphPoint([0.0, 0.0], 0.0))
        assert len(comb.points) == 1
        assert comb.weights[0] == pytest.approx(1.0)
        assert comb.trace == ()

    def test_two_point_split(self, ex1, ex1_gd):
        target = EpigraphPoint([4.0, 2.0], 33.5)
        comb = decompose(ex1, ex1_gd, target)
        assert len(comb.points) == 2
        (p_plus, p_minus) = comb.points
        assert np.allclose(p_plus.x, [4.0, SQRT11], atol=1e-8)
        assert np.allclose(p_minus.x, [4.0, -SQRT11], atol=1e-8)
        assert p_plus.t == pytest.approx(33.5, abs=1e-8)
        w_plus = (2 + SQRT11) / (2 * SQRT11)
        assert comb.weights[0] == pytest.approx(w_plus, abs=1e-8)
        assert comb.weights[1] == pytest.approx(1 - w_plus, abs=1e-8)
        # both points sit exactly on the first constraint boundary
        for pt in comb.points:
            assert pt.x[0] ** 2 - pt.x[1] ** 2 - 5 == pytest.approx(0.0, abs=1e-8)
        assert verify_certificate(ex1, comb, target)

    def test_surplus_lift(self, ex1, ex1_gd):
        base = decompose(ex1, ex1_gd, EpigraphPoint([4.0, 2.0], 33.5))
        lifted = decompose(ex1, ex1_gd, EpigraphPoint([4.0, 2.0], 38.5))
        assert np.allclose(lifted.weights, base.weights)
        for a, b in zip(lifted.points, base.points):
            assert np.allclose(a.x, b.x)
            assert a.t == pytest.approx(b.t + 5.0)

    def test_outside_point_rejected(self, ex1, ex1_gd):
        with pytest.raises(NotInDsdp):
            decompose(ex1, ex1_gd, EpigraphPoint([4.0, 2.0], 33.0))

    @pytest.mark.parametrize(
        "maker,seed",
        [
            (lambda s: gtrs(2, s), 0),
            (lambda s: gtrs(4, s), 1),
            (lambda s: quadratic_matrix_program(2, 3, 2, s), 2),
            (lambda s: swiss_cheese(3, 1, 1, 1, s), 3),
            (lambda s: example1(), 4),
        ],
    )
    def test_soundness_on_generated_instances(self, maker, seed):
        p = maker(seed)
        gd = build_gamma_data(p)
        soc = soc_description(gd.v, p)
        rng = np.random.default_rng(seed + 100)
        for pt in sample_relaxed_points(p, gd, 20, rng):
            comb = decompose(p, gd, pt, soc=soc)
            assert verify_certificate(p, comb, pt, tol=1e-8)
            # strict face growth along every recorded split
            for rec in comb.trace:
                assert all(ch > rec["aff_dim"] for ch in rec["child_aff_dims"])
                assert rec["depth"] <= p.num_constraints - 1
            # hull sandwich: certificate points are true epigraph points
            for cpt in comb.points:
                assert check_feasible(p, cpt, tol=1e-8).feasible


class TestVerifyCertificate:
    def test_negated_weight_fails(self, ex1, ex1_gd):
        target = EpigraphPoint([4.0, 2.0], 33.5)
        comb = decompose(ex1, ex1_gd, target)
        bad = ConvexCombination(
            points=comb.points, weights=comb.weights * np.array([1.0, -1.0]), trace=comb.trace
        )
        assert not verify_certificate(ex1, bad, target)

    def test_violating_point_fails(self, ex1, ex1_gd):
        target = EpigraphPoint([4.0, 2.0], 33.5)
        comb = decompose(ex1, ex1_gd, target)
        moved = (
            EpigraphPoint(comb.points[0].x + np.array([0.2, 0.0]), comb.points[0].t),
            comb.points[1],
        )
        bad = ConvexCombination(points=moved, weights=comb.weights, trace=comb.trace)
        assert not verify_certificate(ex1, bad, target)

    def test_wrong_reconstruction_fails(self, ex1, ex1_gd):
        target = EpigraphPoint([4.0, 2.0], 33.5)
        comb = decompose(ex1, ex1_gd, target)
        assert not verify_certificate(ex1, comb, EpigraphPoint([4.0, 2.1], 33.5))


def test_hull_oracle_example1(ex1, ex1_soc):
    rng = np.random.default_rng(42)
    agreement, n = oracle_agreement(
        ex1,
        ex1_soc,
        rng,
        probe_box=[(-3.0, 3.0), (-3.0, 3.0)],
        sample_box=[(-9.0, 9.0), (-9.0, 9.0)],
        resolution=401,
        count=300,
        spread=6.0,
    )
    assert n == 300
    assert agreement >= 0.995
