import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gtrs.errors import InputError, NumericalError
from gtrs.lanczos import (
    approx_eig,
    extreme_ritz_values,
    lanczos_steps,
    tridiag_eigvec,
    tridiag_max_eig,
)
from gtrs.oracle import dense_eig_min

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def sparse_sym(n, density, rng):
    M = rng.standard_normal((n, n)) * (rng.random((n, n)) < density)
    M = np.triu(M) + np.triu(M, 1).T
    return M / max(1.0, np.abs(M).sum(1).max())


def test_identity_is_exact():
    est = approx_eig(lambda v: v, 5, 1.0, 1e-3, 0.1, 0)
    assert est.rayleigh == pytest.approx(1.0, abs=1e-14)


def test_e1n_midpoint(e1n):
    est = approx_eig(e1n.operator(2 / 3), 2, 2.0, 1e-3, 0.01, 3)
    assert 1 / 3 - 1e-12 <= est.rayleigh <= 1 / 3 + 1e-3


@given(st.integers(2, 50), seeds)
def test_estimate_fields(n, seed):
    rng = np.random.default_rng(seed)
    M = sparse_sym(n, 0.3, rng)
    est = approx_eig(lambda v: M @ v, n, 1.0, 1e-3, 0.01, rng)
    assert abs(np.linalg.norm(est.x) - 1) <= 1e-10
    assert abs(est.rayleigh - est.x @ M @ est.x) <= 1e-10 * max(1.0, abs(est.rayleigh))
    # a Rayleigh quotient never undercuts the smallest eigenvalue
    assert est.rayleigh >= np.linalg.eigvalsh(M)[0] - 1e-12


@given(st.integers(2, 40), seeds)
def test_matches_dense_oracle(n, seed):
    rng = np.random.default_rng(seed)
    M = sparse_sym(n, 0.3, rng)
    lam = dense_eig_min(M)[0]
    est = approx_eig(lambda v: M @ v, n, 1.0, 1e-4, 1e-3, rng)
    assert est.rayleigh <= lam + 1e-4


def test_deterministic_given_seed(rng):
    M = sparse_sym(30, 0.3, rng)
    a = approx_eig(lambda v: M @ v, 30, 1.0, 1e-4, 0.01, 7)
    b = approx_eig(lambda v: M @ v, 30, 1.0, 1e-4, 0.01, 7)
    np.testing.assert_array_equal(a.x, b.x)
    assert a.rayleigh == b.rayleigh


@given(seeds, st.floats(-0.5, 0.5))
def test_shift_moves_rayleigh_by_sigma(seed, sigma):
    rng = np.random.default_rng(seed)
    M = sparse_sym(25, 0.4, rng)
    a = approx_eig(lambda v: M @ v, 25, 1.0, 1e-4, 0.01, seed)
    b = approx_eig(lambda v: M @ v + sigma * v, 25, 1.0 + sigma, 1e-4, 0.01, seed)
    assert abs((b.rayleigh - sigma) - a.rayleigh) <= 1e-10


def test_step_count_scaling():
    # doubling eta divides the dominant term by sqrt 2
    for eta in (1e-4, 1e-5, 1e-6):
        k1 = lanczos_steps(1000, 2.0, eta, 0.01)
        k2 = lanczos_steps(1000, 2.0, 2 * eta, 0.01)
        assert abs(k2 - math.ceil(k1 / math.sqrt(2))) <= 1


def test_step_count_floor():
    assert lanczos_steps(3, 1.0, 10.0, 0.9) == 8


def test_large_runs_use_regeneration(rng):
    n = 3000
    d = np.linspace(-1, 1, n)
    est = approx_eig(lambda v: d * v, n, 1.0, 1e-6, 0.01, rng)
    assert not est.reorthogonalized
    assert est.rayleigh <= -1 + 1e-6


@pytest.mark.parametrize("eta, p", [(0.0, 0.1), (-1.0, 0.1), (1e-3, 0.0), (1e-3, 1.0)])
def test_parameter_errors(eta, p):
    with pytest.raises(InputError):
        approx_eig(lambda v: v, 3, 1.0, eta, p, 0)


def test_nonfinite_matvec():
    with pytest.raises(NumericalError):
        approx_eig(lambda v: v * np.nan, 4, 1.0, 1e-3, 0.1, 0)


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=12), seeds)
def test_tridiagonal_solver(diag, seed):
    rng = np.random.default_rng(seed)
    d = np.array(diag)
    e = rng.uniform(0.05, 1.0, len(d) - 1)
    T = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    w = np.linalg.eigvalsh(T)
    theta = tridiag_max_eig(d, e)
    assert abs(theta - w[-1]) <= 1e-12 * max(1.0, abs(w[-1]))
    s = tridiag_eigvec(d, e, theta)
    assert np.linalg.norm(T @ s - theta * s) <= 1e-8 * max(1.0, np.abs(w).max())


def test_extreme_ritz_values(rng):
    M = sparse_sym(40, 0.3, rng)
    lo, hi = extreme_ritz_values(lambda v: M @ v, 40, 40)
    w = np.linalg.eigvalsh(M)
    assert lo == pytest.approx(w[0], abs=1e-10)
    assert hi == pytest.approx(w[-1], abs=1e-10)
