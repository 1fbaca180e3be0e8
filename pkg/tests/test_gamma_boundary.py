import numpy as np
import pytest

from gtrs.errors import CertificateError, InputError
from gtrs.gamma_boundary import (
    approx_gamma_minus,
    approx_gamma_plus,
    bisection_rounds,
    effective_delta,
    gamma_bracket,
    search_gamma_minus,
    search_gamma_plus,
)
from gtrs.generate import random_instance
from gtrs.oracle import dense_eig_min, gamma_exact
from gtrs.quad_model import Pencil, Quadratic, SparseSymMatrix
from gtrs.regularity import RegularityCertificate

E1N_CERT = RegularityCertificate(1 / 3, 1.0, 2 / 3)
D_CERT = RegularityCertificate(0.2, 1.5, 1.2)


def test_rounds_formula():
    assert bisection_rounds(1.0, 3.0, 1e-3) == 14


def test_e1n_endpoints(e1n):
    for seed in range(5):
        hi = approx_gamma_plus(e1n, E1N_CERT, 1e-3, 0.01, seed).value
        lo = approx_gamma_minus(e1n, E1N_CERT, 1e-3, 0.01, seed).value
        assert 1 - 1e-3 <= hi <= 1
        assert 1 / 3 <= lo <= 1 / 3 + 1e-3


def test_d_half_endpoints(d_half):
    br = gamma_bracket(d_half, D_CERT, 1e-3, 0.01, 0)
    assert 1.5 - 1e-3 <= br.gamma_plus <= 1.5
    assert 1.0 <= br.gamma_minus <= 1.001
    assert br.gamma_minus <= 1.2 <= br.gamma_plus
    assert br.width == br.gamma_plus - br.gamma_minus


def test_loose_delta_returns_quickly(e1n):
    # delta = zeta * kappa: the window [1/4, 1] contains the peak 1/3
    est = search_gamma_plus(e1n, 1 / 3, 1.0, 2 / 3, 3.0, 0.01, 0)
    assert est.rounds <= 3
    assert 2 / 3 <= est.value <= 1.0


def test_oversized_delta_is_clamped(e1n):
    est = search_gamma_plus(e1n, 1 / 3, 1.0, 2 / 3, 10.0, 0.01, 0)
    assert est.rounds <= bisection_rounds(1.0, 3.0, 1.0)
    assert 2 / 3 <= est.value <= 1.0
    assert effective_delta(10.0, 1.0) == 1.0
    assert effective_delta(1e-20, 2.0) == 2e-12


def test_minus_zero_when_a0_psd():
    # A(0) = diag(1, 1) is definite, so g_minus = 0
    p = Pencil(Quadratic(SparseSymMatrix.from_diagonal([1.0, 1.0]), np.zeros(2)),
               Quadratic(SparseSymMatrix.from_diagonal([-1.0, 0.5]), np.zeros(2)))
    est = search_gamma_minus(p, 0.5, 1.0, 0.5, 1e-3, 0.01, 0)
    assert est.value == 0.0 and est.rounds == 0


def test_zeta_below_gamma_plus_is_refuted(e1n):
    # zeta = 1/2 is below g_plus = 1, so A(zeta) is definite
    # halving q1 doubles Gamma to [2/3, 2]; zeta = 1 then sits inside it
    with pytest.raises(CertificateError):
        search_gamma_plus(e1n.scaled(1.0, 0.5), 1 / 3, 1.0, 2 / 3, 1e-3, 0.01, 0)


def test_bad_delta(e1n):
    with pytest.raises(InputError):
        approx_gamma_plus(e1n, E1N_CERT, 0.0, 0.01, 0)


def test_trace_is_nested_and_halving(e1n):
    est = search_gamma_plus(e1n, 1 / 3, 1.0, 2 / 3, 1e-6, 0.01, 1)
    steps = est.trace[1:]
    width0 = 1.0 - 2 / 3
    for k, (s, t, g, _) in enumerate(steps):
        assert t - s == pytest.approx(width0 / 2**k, rel=1e-12)
        assert g == pytest.approx((s + t) / 2, rel=1e-15)
    for (s0, t0, *_), (s1, t1, *_) in zip(steps, steps[1:]):
        assert s0 <= s1 <= t1 <= t0


@pytest.mark.parametrize("seed", range(6))
def test_random_instances_against_oracle(seed):
    p = random_instance(10 + seed, 0.3, 200 + seed)
    g = gamma_exact(p)
    gm, gp = g.value
    xi = min(1.0, g.details["peak"])
    zeta = max(1.0, gp)
    cert = RegularityCertificate(xi, zeta, g.details["gamma_star"])
    delta = 1e-4
    br = gamma_bracket(p, cert, delta, 0.01, seed)
    assert gp - delta <= br.gamma_plus <= gp + 1e-9
    assert gm - 1e-9 <= br.gamma_minus <= gm + delta
    for val in (br.gamma_minus, br.gamma_plus):
        lam = dense_eig_min(p.dense(val))[0]
        assert -1e-9 <= lam <= delta / cert.kappa
    # Lipschitz localization of the upper endpoint
    lam_p = dense_eig_min(p.dense(br.gamma_plus))[0]
    assert abs(br.gamma_plus - gp) <= cert.kappa * abs(lam_p) + 1e-9
