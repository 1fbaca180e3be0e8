import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from gtrs.errors import RoundingFailed
from gtrs.generate import fixture_e1n, random_instance
from gtrs.hull import (
    Regime,
    boundary_tolerance,
    classify_pencil,
    hull_decompose,
    hull_membership,
    polish_root,
    quadratic_roots,
)
from gtrs.quad_model import Pencil, Quadratic, SparseSymMatrix, evaluate, normalize

SQ2 = math.sqrt(2.0)


def diag_pencil(a0, a1):
    n = len(a0)
    return Pencil(Quadratic(SparseSymMatrix.from_diagonal(a0), np.zeros(n)),
                  Quadratic(SparseSymMatrix.from_diagonal(a1), np.zeros(n)))


def e1_closed_form(x, t):
    return (x[0] + x[1]) ** 2 <= t and (x[0] - x[1]) ** 2 <= t


class TestRoots:
    def test_simple(self):
        assert quadratic_roots(1.0, 0.0, -4.0) == pytest.approx((-2.0, 2.0))

    def test_linear(self):
        assert quadratic_roots(0.0, 1.0, -4.0) == (2.0,)

    def test_no_roots(self):
        assert quadratic_roots(1.0, 0.0, 1.0) == ()

    @given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(0.1, 10))
    def test_cancellation_free(self, r1, r2, a):
        # a (t - r1)(t - r2) = a t^2 + 2 b t + c; close roots are ill-conditioned
        scale = max(1.0, abs(r1), abs(r2))
        assume(abs(r1 - r2) >= 1e-3 * scale)
        b, c = -a * (r1 + r2) / 2, a * r1 * r2
        roots = quadratic_roots(a, b, c)
        assert len(roots) == 2
        assert roots[0] == pytest.approx(min(r1, r2), abs=1e-9 * scale)
        assert roots[1] == pytest.approx(max(r1, r2), abs=1e-9 * scale)

    def test_polish(self):
        f = lambda a: a * a - 2
        assert polish_root(f, lambda a: 2 * a, 1.4) == pytest.approx(SQ2, abs=1e-15)


class TestMembership:
    def test_examples(self, e1):
        assert hull_membership(e1, 1.0, 3.0, np.array([1.0, 0.0]), 1.0)
        assert not hull_membership(e1, 1.0, 3.0, np.array([1.0, -1.0]), 3.0)

    def test_closed_form_agreement(self, e1, rng):
        pts = rng.uniform(-3, 3, (10_000, 2))
        ts = rng.uniform(0, 12, 10_000)
        bad = sum(hull_membership(e1, 1.0, 3.0, x, t) != e1_closed_form(x, t) for x, t in zip(pts, ts))
        assert bad == 0

    @given(st.integers(0, 2**32 - 1))
    def test_feasible_epigraph_points_are_members(self, seed):
        rng = np.random.default_rng(seed)
        p = random_instance(6, 0.5, seed % 50)
        from gtrs.oracle import gamma_exact

        gm, gp = gamma_exact(p).value
        x = rng.standard_normal(6)
        if evaluate(p.q1, x) <= 0:
            assert hull_membership(p, gm, gp, x, evaluate(p.q0, x) + rng.uniform(0, 1))

    @given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0, 8), st.floats(0.1, 10))
    def test_rescaling_q1(self, x1, x2, t, s):
        from gtrs.generate import fixture_e1

        e1 = fixture_e1()
        x = np.array([x1, x2])
        a = hull_membership(e1, 1.0, 3.0, x, t)
        b = hull_membership(e1.scaled(1.0, s), 1.0 / s, 3.0 / s, x, t)
        if abs((x1 + x2) ** 2 - t) > 1e-6 and abs((x1 - x2) ** 2 - t) > 1e-6:
            assert a == b

    def test_unbounded_gamma_uses_constraint(self):
        # q1 = ||x||^2 - 1 is convex, so the second set is the unit ball
        base = diag_pencil([1.0, -1.0], [1.0, 1.0])
        p = Pencil(base.q0, Quadratic(base.q1.A, np.zeros(2), -1.0))
        assert hull_membership(p, 1.0, None, np.array([0.5, 0.5]), 10.0)
        assert not hull_membership(p, 1.0, None, np.array([2.0, 0.0]), 10.0)


class TestDecompose:
    def test_hand_example(self, e1):
        d = np.array([1.0, 1.0]) / SQ2
        dec = hull_decompose(e1, 1.0, 3.0, None, d, np.array([1.0, -1.0]), 4.0)
        assert dec.case == "q1-positive"
        pts = sorted([tuple(np.round(dec.x1, 12)), tuple(np.round(dec.x2, 12))])
        assert pts == [(0.0, -2.0), (2.0, 0.0)]
        assert dec.t1 == pytest.approx(4.0) and dec.t2 == pytest.approx(4.0)
        assert dec.theta == pytest.approx(0.5, abs=1e-15)

    def test_boundary_point(self, e1):
        dec = hull_decompose(e1, 1.0, 3.0, None, None, np.array([1.0, 0.0]), 1.0)
        assert dec.case == "on-boundary" and dec.theta == 1.0
        np.testing.assert_array_equal(dec.x1, [1.0, 0.0])

    def test_bad_direction(self, e1):
        # along (1, -1) q1 stays positive: no root of each sign
        with pytest.raises(RoundingFailed):
            hull_decompose(e1, 1.0, 3.0, None, np.array([1.0, -1.0]) / SQ2, np.array([1.0, -1.0]), 4.0)

    def test_rejection_sampled_members(self, e1, rng):
        d_plus = np.array([1.0, 1.0]) / SQ2   # kernel of A(3)
        d_minus = np.array([1.0, -1.0]) / SQ2  # kernel of A(1)
        done = 0
        while done < 200:
            x = rng.uniform(-2, 2, 2)
            t = rng.uniform(0, 8)
            if not e1_closed_form(x, t):
                continue
            dec = hull_decompose(e1, 1.0, 3.0, d_minus, d_plus, x, t)
            for xi, ti in ((dec.x1, dec.t1), (dec.x2, dec.t2)):
                assert abs(evaluate(e1.q1, xi)) <= 1e-8
                assert evaluate(e1.q0, xi) <= ti + 1e-8
            rec_x = dec.theta * dec.x1 + (1 - dec.theta) * dec.x2
            rec_t = dec.theta * dec.t1 + (1 - dec.theta) * dec.t2
            assert np.linalg.norm(rec_x - x) <= 1e-9 and abs(rec_t - t) <= 1e-9
            assert 0 <= dec.theta <= 1
            done += 1

    def test_tolerance_scales(self):
        assert boundary_tolerance(np.zeros(3)) == 1e-12
        assert boundary_tolerance(np.array([3.0, 4.0])) == pytest.approx(36e-12)


class TestClassify:
    def test_e1n(self):
        assert classify_pencil(fixture_e1n(), 0.01, 0).kind is Regime.DEFINITE_POINT

    def test_convex_constraint(self):
        r = classify_pencil(diag_pencil([1.0, -1.0], [1.0, 1.0]), 0.01, 0)
        assert r.kind is Regime.CONVEX_CONSTRAINT and not r.solvable

    def test_gamma_empty(self, gamma_empty):
        assert classify_pencil(gamma_empty, 0.01, 0).kind is Regime.GAMMA_EMPTY

    def test_psd_a0(self):
        p = diag_pencil([1.0, 0.5], [-1.0, 0.5])
        r = classify_pencil(p, 0.01, 0)
        assert r.kind is Regime.GAMMA_MINUS_ZERO and r.solvable

    def test_psd_only(self):
        # A(1) = diag(0, 0) is the best the pencil can do
        p = diag_pencil([1.0, -1.0], [-1.0, 1.0])
        assert classify_pencil(p, 0.01, 0).kind is Regime.PSD_ONLY

    @pytest.mark.parametrize("seed", range(5))
    def test_random_generated(self, seed):
        p = random_instance(15, 0.3, seed)
        r = classify_pencil(p, 0.01, seed)
        assert r.kind is Regime.DEFINITE_POINT
        assert r.xi > 0 and r.gamma_hat > 0
