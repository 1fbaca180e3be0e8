"""Instance generators: fixtures with known answers and random certified instances."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from .errors import InputError
from .quad_model import Pencil, Quadratic, SparseSymMatrix, normalize

KINDS = ("random", "diagonal", "banded", "fixture:E1", "fixture:D")
MAX_RESAMPLES = 100


class GenerationError(InputError):
    """The rejection sampler ran out of attempts."""


def fixture_e1():
    """Two-variable pencil with ``Gamma = [1, 3]`` and ``A(2) = I``."""
    A0 = SparseSymMatrix.from_triplets(2, [(0, 0, 1.0), (0, 1, 2.0), (1, 1, 1.0)])
    A1 = SparseSymMatrix.from_triplets(2, [(0, 1, -1.0)])
    return Pencil(Quadratic(A0, np.zeros(2)), Quadratic(A1, np.zeros(2)))


def fixture_e1n():
    """``fixture_e1`` with ``q0`` divided by 3: ``Gamma = [1/3, 1]``, ``xi* = 1/3``."""
    return fixture_e1().scaled(1.0 / 3.0, 1.0)


def fixture_e2():
    """``fixture_e1n`` with linear term ``b0 = (0, -1/6)``; optimum ``-1/12`` at ``(0, 1/2)``."""
    return fixture_e1n().with_b0(np.array([0.0, -1.0 / 6.0]))


def fixture_diagonal(alpha):
    """Three-variable diagonal family with ``xi* = alpha/(2+alpha)``, ``zeta* = 1+alpha``."""
    if not alpha > 0:
        raise InputError("alpha must be positive")
    A0 = SparseSymMatrix.from_diagonal([1.0, 1.0, -1.0])
    A1 = SparseSymMatrix.from_diagonal([1.0, -1.0 / (1.0 + alpha), 1.0])
    return Pencil(Quadratic(A0, np.zeros(3)), Quadratic(A1, np.zeros(3)))


def fixture_gamma_empty():
    """``A(gamma)`` is indefinite for every ``gamma >= 0``."""
    A0 = SparseSymMatrix.from_diagonal([1.0, -1.0])
    A1 = SparseSymMatrix.from_diagonal([-1.0, -1.0])
    return Pencil(Quadratic(A0, np.zeros(2)), Quadratic(A1, np.zeros(2)))


def _random_sym(n, density, rng):
    """Sparse symmetric off-diagonal part, upper triangle in COO."""
    m = int(round(density * n * (n - 1) / 2))
    if m == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0)
    iu, ju = np.triu_indices(n, 1)
    pick = rng.choice(iu.size, size=min(m, iu.size), replace=False)
    return iu[pick], ju[pick], rng.standard_normal(pick.size)


def _dense_sym(n, rows, cols, vals, diag):
    M = np.zeros((n, n))
    M[rows, cols] = vals
    M = M + M.T
    M[np.diag_indices(n)] = diag
    return M


def _extreme_eigs(M):
    """Smallest eigenvalue and spectral norm."""
    n = M.shape[0]
    if n <= 200:
        w = np.linalg.eigvalsh(M)
        return float(w[0]), float(max(-w[0], w[-1]))
    S = sp.csr_matrix(M)
    lo = eigsh(S, k=1, which="SA", tol=1e-10, v0=np.ones(n))[0][0]
    big = eigsh(S, k=1, which="LM", tol=1e-10, v0=np.ones(n))[0][0]
    return float(lo), float(abs(big))


def _lambda_min(M):
    return _extreme_eigs(M)[0]


def random_instance(n, density=0.3, rng=None, *, margin=(0.6, 1.0), gamma_range=(0.2, 2.0)):
    """Random normalized pencil with a definite point and nonconvex ``q0`` and ``q1``.

    ``A1`` is sparse, symmetric and indefinite with unit norm; ``P`` is sparse
    and strictly diagonally dominant with diagonal margin drawn from ``margin``;
    ``A0 = P - gamma* A1`` for ``gamma*`` drawn from ``gamma_range``, resampled
    until ``A0`` has a negative eigenvalue.  The linear terms are small and
    ``c1 < 0``, so ``x = 0`` is strictly feasible.
    """
    if n < 2:
        raise InputError("n must be at least 2")
    if not 0 < density <= 1:
        raise InputError("density must lie in (0, 1]")
    rng = np.random.default_rng(rng)
    for _ in range(MAX_RESAMPLES):
        r1, c1_, v1 = _random_sym(n, density, rng)
        d1 = rng.uniform(-1.0, 1.0, n)
        d1[rng.permutation(n)[:2]] = (-1.0, 1.0)
        M1 = _dense_sym(n, r1, c1_, v1, d1)
        lo1, scale1 = _extreme_eigs(M1)
        if lo1 >= 0:
            continue
        M1 /= scale1
        rp, cp, vp = _random_sym(n, density, rng)
        # keep row sums O(1) so the margin, not n, sets lambda_min(P)
        vp *= 0.3 / max(1.0, density * (n - 1))
        off = np.zeros(n)
        np.add.at(off, rp, np.abs(vp))
        np.add.at(off, cp, np.abs(vp))
        dp = off + rng.uniform(*margin, n)
        P = _dense_sym(n, rp, cp, vp, dp)
        gamma_star = rng.uniform(*gamma_range)
        M0 = P - gamma_star * M1
        if _lambda_min(M0) >= 0:
            continue
        b0 = rng.standard_normal(n)
        b0 *= rng.uniform(0.05, 0.5) / np.linalg.norm(b0)
        b1 = rng.standard_normal(n)
        b1 *= rng.uniform(0.0, 0.3) / np.linalg.norm(b1)
        c1 = -rng.uniform(0.1, 0.5)
        c0 = float(rng.uniform(-1.0, 1.0))
        p = Pencil(Quadratic(SparseSymMatrix.from_dense(M0), b0, c0),
                   Quadratic(SparseSymMatrix.from_dense(M1), b1, c1))
        p_norm, _ = normalize(p)
        return p_norm
    raise GenerationError(f"no admissible instance after {MAX_RESAMPLES} attempts")


def banded_instance(n, rng=None, *, scales=(1.0, 0.5)):
    """Block-diagonal pencil of randomly rotated copies of the normalized two-variable fixture.

    Block ``k`` is ``s_k R_k (A0, A1) R_k^T`` with ``s_k`` cycling through
    ``scales``, so every block has ``Gamma = [1/3, 1]`` and the whole pencil has
    ``xi* = min(scales)/3``, ``zeta* = 1`` and ``gamma* = 2/3`` for every ``n``.
    A small linear term makes the optimum nontrivial.  Bandwidth is 1.
    """
    if n < 2 or n % 2:
        raise InputError("banded instances need an even n >= 2")
    rng = np.random.default_rng(rng)
    m = n // 2
    th = rng.uniform(0, np.pi, m)
    c, s = np.cos(th), np.sin(th)
    scl = np.resize(np.asarray(scales, dtype=float), m)
    # R diag(l1, l2) R^T entries for the eigen-decompositions of both blocks
    def rotated(l1, l2):
        a = scl * (c * c * l1 + s * s * l2)
        d = scl * (s * s * l1 + c * c * l2)
        o = scl * (c * s * (l1 - l2))
        return a, o, d

    # A0 block (1/3)[[1,2],[2,1]] has eigenpairs 1 on (1,1), -1/3 on (1,-1);
    # A1 block [[0,-1],[-1,0]] has -1 on (1,1), 1 on (1,-1).
    a0, o0, d0 = rotated(1.0, -1.0 / 3.0)
    a1, o1, d1 = rotated(-1.0, 1.0)
    # rotation maps e1 -> (1,1)/sqrt2 direction first
    idx = np.arange(m) * 2
    rows = np.concatenate([idx, idx, idx + 1])
    cols = np.concatenate([idx, idx + 1, idx + 1])
    A0 = SparseSymMatrix(n, rows, cols, np.concatenate([a0, o0, d0]))
    A1 = SparseSymMatrix(n, rows, cols, np.concatenate([a1, o1, d1]))
    b0 = rng.standard_normal(n)
    b0 *= 0.5 / np.linalg.norm(b0)
    return Pencil(Quadratic(A0, b0, 0.0), Quadratic(A1, np.zeros(n), -0.25))


def banded_certificate(scales=(1.0, 0.5)):
    """Exact regularity numbers for ``banded_instance``."""
    from .regularity import RegularityCertificate

    return RegularityCertificate(min(scales) / 3.0, 1.0, 2.0 / 3.0, "user-supplied")


def generate(kind, n=None, density=0.3, seed=0, alpha=0.5):
    if kind == "random":
        return random_instance(n or 10, density, seed)
    if kind == "diagonal":
        if n not in (None, 3):
            raise InputError("the diagonal family has n = 3")
        return fixture_diagonal(alpha)
    if kind == "banded":
        return banded_instance(n or 1024, seed)
    if kind == "fixture:E1":
        return fixture_e1()
    if kind == "fixture:D":
        return fixture_diagonal(alpha)
    raise InputError(f"unknown kind {kind!r}; choose from {KINDS}")
