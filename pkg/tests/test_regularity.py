import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gtrs.errors import ConvexConstraintRegime, InputError, NotCertifiablyDefinite, UnboundedBelow
from gtrs.generate import fixture_diagonal, random_instance
from gtrs.oracle import dense_eig_min, gamma_exact, lambda_min_curve
from gtrs.quad_model import Pencil, Quadratic, SparseSymMatrix
from gtrs.regularity import (
    RegularityCertificate,
    approx_xi,
    approx_zeta,
    diag_regularity,
    estimate_certificate,
    test_xi as run_test_xi,
    zeta_upper_bound,
)


def diag_pencil(a0, a1):
    n = len(a0)
    return Pencil(Quadratic(SparseSymMatrix.from_diagonal(a0), np.zeros(n)),
                  Quadratic(SparseSymMatrix.from_diagonal(a1), np.zeros(n)))


class TestCertificate:
    def test_kappa(self):
        c = RegularityCertificate(0.25, 2.0, 1.0)
        assert c.kappa == 8.0

    @pytest.mark.parametrize("xi, zeta, g", [(0.0, 1.0, 0.5), (1.5, 1.0, 0.5), (0.5, 0.9, 0.5), (0.5, 1.0, 2.0)])
    def test_rejects_invalid(self, xi, zeta, g):
        with pytest.raises(InputError):
            RegularityCertificate(xi, zeta, g)


class TestZetaUpperBound:
    def test_e1n_tight(self, e1n):
        z = zeta_upper_bound(e1n, 0.01, 0)
        assert 1.0 <= z <= 1.1

    def test_d_half(self, d_half):
        z = zeta_upper_bound(d_half, 0.01, 0)
        assert 1.5 <= z <= 1.7

    def test_psd_constraint(self):
        p = diag_pencil([1.0, -1.0], [1.0, 1.0])
        with pytest.raises(ConvexConstraintRegime):
            zeta_upper_bound(p, 0.01, 0)

    @pytest.mark.parametrize("seed", range(5))
    def test_random_upper_bound(self, seed):
        p = random_instance(12, 0.3, seed)
        gp = gamma_exact(p).value[1]
        assert zeta_upper_bound(p, 0.01, seed) >= max(1.0, gp) - 1e-9


class TestXiSearch:
    def test_e1n_success(self, e1n):
        for seed in range(5):
            g = run_test_xi(e1n, 0.25, 1.0, 0.01, seed)
            assert g is not None
            assert 5 / 12 <= g <= 11 / 12
            assert 1 / 3 - abs(2 / 3 - g) >= 1 / 8

    def test_e1n_fail(self, e1n):
        assert run_test_xi(e1n, 1.0, 1.0, 0.01, 0) is None

    def test_d_half(self, d_half):
        g = run_test_xi(d_half, 0.1, 1.6, 0.01, 0)
        assert g is not None
        assert min(1 + g, 1 - 2 * g / 3, g - 1) >= 0.05

    def test_approx_xi_windows(self, e1n, d_half):
        assert approx_xi(e1n, 1.0, 0.01, 0)[0] in (0.25, 0.125)
        assert approx_xi(d_half, 1.6, 0.01, 0)[0] in (0.125, 0.0625)

    def test_no_definite_point(self):
        p = diag_pencil([1.0, -1.0], [1.0, -1.0])
        with pytest.raises(NotCertifiablyDefinite):
            approx_xi(p, 1.0, 0.01, 0, max_rounds=12)

    @pytest.mark.parametrize("seed", range(5))
    def test_returned_point_has_margin(self, seed):
        p = random_instance(10, 0.3, 100 + seed)
        xi, g = approx_xi(p, zeta_upper_bound(p, 0.01, seed), 0.01, seed)
        assert dense_eig_min(p.dense(g))[0] >= xi - 1e-12


class TestZeta:
    def test_e1n(self, e1n):
        for seed in range(5):
            z = approx_zeta(e1n, 0.25, 1.0667, 2 / 3, 0.01, seed)
            assert 1.0 <= z <= 4.0

    def test_d_half(self, d_half):
        for seed in range(5):
            z = approx_zeta(d_half, 0.125, 1.6, 1.2, 0.01, seed)
            assert 1.5 <= z <= 6.0

    def test_exact_bound_returns_immediately(self, d_half):
        assert approx_zeta(d_half, 0.125, 1.5, 1.2, 0.01, 0) == 1.5

    def test_estimated_certificate_is_valid(self, e1n):
        c = estimate_certificate(e1n, 0.01, 0)
        assert dense_eig_min(e1n.dense(c.gamma_hat))[0] >= c.xi - 1e-12
        assert c.zeta >= 1.0


class TestDiagonal:
    @pytest.mark.parametrize("alpha", [0.25, 0.5, 1.0])
    def test_closed_form(self, alpha):
        p = fixture_diagonal(alpha)
        r = diag_regularity(p.q0.A.diagonal(), p.q1.A.diagonal())
        assert r.xi == pytest.approx(alpha / (2 + alpha), abs=1e-12)
        assert r.zeta == pytest.approx(1 + alpha, abs=1e-12)
        assert r.gamma_minus == pytest.approx(1.0, abs=1e-12)

    def test_d_half_details(self, d_half):
        r = diag_regularity(d_half.q0.A.diagonal(), d_half.q1.A.diagonal())
        assert r.gamma_plus == pytest.approx(1.5, abs=1e-12)
        assert r.gamma_star == pytest.approx(1.2, abs=1e-12)
        assert r.certificate().provenance == "exact-diagonal"

    def test_unbounded_gamma(self):
        with pytest.raises(ConvexConstraintRegime):
            diag_regularity(np.array([1.0, 1.0]), np.array([1.0, 1.0]))

    def test_empty_gamma(self):
        with pytest.raises(UnboundedBelow):
            diag_regularity(np.array([1.0, -1.0]), np.array([-1.0, -1.0]))

    @given(st.integers(2, 30), st.integers(0, 2**32 - 1))
    def test_matches_dense_oracle(self, n, seed):
        rng = np.random.default_rng(seed)
        gs = rng.uniform(0.2, 2.0)
        a1 = rng.uniform(-1, 1, n)
        a1[:2] = (-1.0, 1.0)
        a0 = rng.uniform(0.1, 1.0, n) - gs * a1
        r = diag_regularity(a0, a1)
        g = gamma_exact(diag_pencil(a0, a1))
        assert r.gamma_minus == pytest.approx(g.value[0], abs=1e-9)
        assert r.gamma_plus == pytest.approx(g.value[1], abs=1e-9)
        assert r.peak == pytest.approx(g.details["peak"], abs=1e-9)


@pytest.mark.parametrize("seed", range(4))
def test_lambda_min_is_concave(seed):
    p = random_instance(8, 0.4, seed)
    lam = lambda_min_curve(p)
    rng = np.random.default_rng(seed)
    for _ in range(10):
        g1, g2 = rng.uniform(0, 3, 2)
        assert lam((g1 + g2) / 2) >= (lam(g1) + lam(g2)) / 2 - 1e-9
