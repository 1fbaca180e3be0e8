"""Randomized Lanczos estimate of the smallest eigenvalue of a symmetric operator.

The operator is only ever seen through a ``matvec`` callable.  Lanczos runs on
the shifted operator ``rho*I - A`` whose top eigenvalue is ``rho - lambda_min``;
the top eigenvalue of the small tridiagonal matrix is found by Sturm-sequence
bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .errors import InputError, NumericalError

# Full reorthogonalization keeps the whole basis in memory; beyond these sizes
# the basis is regenerated in a second pass instead.
FULL_REORTH_MAX_WORK = 5e8  # steps**2 * n
FULL_REORTH_MAX_STORE = 2e7  # steps * n floats

STURM_TOL = 1e-14


@dataclass(frozen=True)
class EigEstimate:
    """Unit vector ``x`` with Rayleigh quotient ``rayleigh = x^T A x``."""

    x: np.ndarray
    rayleigh: float
    iterations: int
    planned_steps: int
    reorthogonalized: bool = True


def as_generator(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def lanczos_steps(n, rho, eta, p_eig):
    """Number of Lanczos steps that gives ``eta`` accuracy with probability ``1 - p_eig``."""
    if not eta > 0:
        raise InputError(f"eigen accuracy must be positive, got {eta}")
    if not 0 < p_eig < 1:
        raise InputError(f"failure probability must lie in (0, 1), got {p_eig}")
    if not rho > 0:
        raise InputError(f"norm bound must be positive, got {rho}")
    main = 0.5 * math.sqrt(rho / eta) * math.log(4 * n / p_eig**2)
    return max(math.ceil(main), math.ceil(math.log(n)) if n > 1 else 0, 8)


def _check_finite(w):
    if not np.all(np.isfinite(w)):
        raise NumericalError("matvec returned non-finite values")


def _lanczos(op, q, steps, keep_basis):
    """Run up to ``steps`` Lanczos steps from unit ``q``.

    Returns diagonal, off-diagonal and the basis (or None).  Stops early on
    breakdown, i.e. when the Krylov space becomes numerically invariant.
    """
    n = q.shape[0]
    alpha, beta = [], []
    Q = np.empty((steps, n)) if keep_basis else None
    q_prev = np.zeros(n)
    b_prev = 0.0
    scale = 0.0
    for j in range(steps):
        if keep_basis:
            Q[j] = q
        w = op(q)
        _check_finite(w)
        a = float(q @ w)
        w = w - a * q - b_prev * q_prev
        if keep_basis:
            B = Q[: j + 1]
            w -= B.T @ (B @ w)
            w -= B.T @ (B @ w)
        alpha.append(a)
        b = float(np.linalg.norm(w))
        scale = max(scale, abs(a), b)
        if j == steps - 1 or b <= 1e-12 * scale:
            break
        beta.append(b)
        q_prev, q = q, w / b
        b_prev = b
    m = len(alpha)
    return np.array(alpha), np.array(beta[: m - 1]), (Q[:m] if keep_basis else None)


def _sturm_count(d, e2, x):
    """Number of eigenvalues of the tridiagonal ``(d, e)`` strictly below ``x``."""
    count = 0
    q = d[0] - x
    if q < 0:
        count += 1
    for i in range(1, len(d)):
        if q == 0.0:
            q = -1e-300
        q = d[i] - x - e2[i - 1] / q
        if q < 0:
            count += 1
    return count


def tridiag_max_eig(d, e, tol=STURM_TOL):
    """Largest eigenvalue of a symmetric tridiagonal matrix by bisection."""
    d = [float(v) for v in d]
    e = [float(v) for v in e]
    m = len(d)
    if m == 1:
        return d[0]
    ae = [0.0] + [abs(v) for v in e] + [0.0]
    lo = min(d[i] - ae[i] - ae[i + 1] for i in range(m))
    hi = max(d[i] + ae[i] + ae[i + 1] for i in range(m))
    e2 = [v * v for v in e]
    # relative width keeps the result exactly equivariant under power-of-two scaling
    width = tol * max(abs(lo), abs(hi))
    if width == 0.0:
        return 0.0
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _sturm_count(d, e2, mid) == m:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def tridiag_eigvec(d, e, theta):
    """Unit eigenvector of the tridiagonal for eigenvalue ``theta`` by inverse iteration."""
    m = len(d)
    if m == 1:
        return np.ones(1)
    scale = max(float(np.max(np.abs(d))), float(np.max(np.abs(e), initial=0.0))) or 1.0
    shift = theta + 1e-10 * scale
    ab = np.zeros((3, m))
    ab[0, 1:] = e
    ab[1] = np.asarray(d) - shift
    ab[2, :-1] = e
    y = np.ones(m) / math.sqrt(m)
    for _ in range(3):
        y = solve_banded((1, 1), ab, y)
        nrm = np.linalg.norm(y)
        if not np.isfinite(nrm) or nrm == 0:
            raise NumericalError("inverse iteration failed on the tridiagonal")
        y = y / nrm
    return y


def _start_vector(n, rng):
    v = rng.standard_normal(n)
    nrm = np.linalg.norm(v)
    while nrm == 0:
        v = rng.standard_normal(n)
        nrm = np.linalg.norm(v)
    return v / nrm


def _regenerate_ritz(op, q, alpha, beta, s):
    """Second Lanczos pass rebuilding ``sum_j s_j q_j`` with O(n) memory."""
    x = s[0] * q
    q_prev = np.zeros_like(q)
    for j in range(len(s) - 1):
        w = op(q) - alpha[j] * q - (beta[j - 1] * q_prev if j > 0 else 0.0)
        q_prev, q = q, w / beta[j]
        x += s[j + 1] * q
    return x


def approx_eig(matvec, n, rho, eta, p_eig, rng=None, *, max_steps=None):
    """Unit ``x`` with ``x^T A x <= lambda_min(A) + eta`` with probability ``1 - p_eig``.

    ``rho`` must bound ``||A||``.  ``rng`` may be a Generator or a seed.
    """
    if n < 1:
        raise InputError("dimension must be positive")
    k = lanczos_steps(n, rho, eta, p_eig)
    steps = min(k, n)
    if max_steps is not None:
        steps = min(steps, max_steps)
    rng = as_generator(rng)
    q = _start_vector(n, rng)

    def shifted(v):
        return rho * v - matvec(v)

    keep = steps * steps * n <= FULL_REORTH_MAX_WORK and steps * n <= FULL_REORTH_MAX_STORE
    alpha, beta, Q = _lanczos(shifted, q, steps, keep)
    theta = tridiag_max_eig(alpha, beta)
    s = tridiag_eigvec(alpha, beta, theta)
    x = Q.T @ s if keep else _regenerate_ritz(shifted, q, alpha, beta, s)
    nrm = np.linalg.norm(x)
    if not np.isfinite(nrm) or nrm == 0:
        raise NumericalError("Ritz vector vanished")
    x = x / nrm
    Ax = matvec(x)
    _check_finite(Ax)
    return EigEstimate(x, float(x @ Ax), len(alpha), k, keep)


def extreme_ritz_values(matvec, n, steps, seed=0):
    """Smallest and largest Ritz values after ``steps`` reorthogonalized Lanczos steps on ``A``."""
    rng = as_generator(seed)
    q = _start_vector(n, rng)
    alpha, beta, _ = _lanczos(matvec, q, max(1, min(steps, n)), True)
    hi = tridiag_max_eig(alpha, beta)
    lo = -tridiag_max_eig(-alpha, beta)
    return lo, hi
