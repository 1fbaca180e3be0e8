"""Dense reference computations used to check the fast solver.

Everything here is slow and capped to small dimensions.  The eigensolver is a
cyclic Jacobi method written out in full so that the checks do not share code
with the LAPACK paths used elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InputError, OracleInconsistency
from .hull import hull_decompose

JACOBI_MAX_N = 200
GOLDEN = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class OracleResult:
    quantity: str
    value: object
    method: str
    tolerance: float
    witness: Optional[np.ndarray] = None
    details: dict = field(default_factory=dict)


def _round_robin(n):
    """Rounds of disjoint index pairs covering every pair exactly once."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(a, b), max(a, b)) for a, b in pairs if a < n and b < n]
        if pairs:
            rounds.append((np.array([a for a, _ in pairs]), np.array([b for _, b in pairs])))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def jacobi_eigh(A, *, tol=1e-13, max_sweeps=60):
    """All eigenpairs of a dense symmetric matrix, ascending, by cyclic Jacobi."""
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError("matrix must be square")
    n = A.shape[0]
    if n > JACOBI_MAX_N:
        raise InputError(f"dense oracle is capped at n <= {JACOBI_MAX_N}, got {n}")
    A = 0.5 * (A + A.T)
    V = np.eye(n)
    norm = np.linalg.norm(A)
    if n == 1 or norm == 0:
        return np.diag(A).copy(), V
    rounds = _round_robin(n)
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= tol * norm:
            break
        for P, Q in rounds:
            apq = A[P, Q]
            active = np.abs(apq) > 1e-300
            if not np.any(active):
                continue
            app, aqq = A[P, P], A[Q, Q]
            with np.errstate(divide="ignore", invalid="ignore"):
                tau = np.where(active, (aqq - app) / (2 * np.where(active, apq, 1.0)), 0.0)
            t = np.where(active, np.sign(tau) + (tau == 0), 0.0) / (np.abs(tau) + np.sqrt(1 + tau * tau))
            t = np.where(active, t, 0.0)
            c = 1 / np.sqrt(1 + t * t)
            s = t * c
            # rows then columns: A <- J^T A J with J[p,p]=J[q,q]=c, J[p,q]=s, J[q,p]=-s
            rp, rq = A[P, :].copy(), A[Q, :].copy()
            A[P, :] = c[:, None] * rp - s[:, None] * rq
            A[Q, :] = s[:, None] * rp + c[:, None] * rq
            cp, cq = A[:, P].copy(), A[:, Q].copy()
            A[:, P] = cp * c - cq * s
            A[:, Q] = cp * s + cq * c
            A[P, Q] = 0.0
            A[Q, P] = 0.0
            vp, vq = V[:, P].copy(), V[:, Q].copy()
            V[:, P] = vp * c - vq * s
            V[:, Q] = vp * s + vq * c
    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def dense_eig_min(A):
    """``(lambda_min, unit eigenvector)`` of a dense symmetric matrix."""
    w, V = jacobi_eigh(A)
    return float(w[0]), V[:, 0]


def lambda_min_curve(p):
    """``gamma -> lambda_min(A0 + gamma A1)`` using dense copies of both matrices."""
    A0, A1 = p.q0.A.to_dense(), p.q1.A.to_dense()
    return lambda g: dense_eig_min(A0 + g * A1)[0]


def _golden_max(f, lo, hi, tol):
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    g = 0.5 * (a + b)
    return g, f(g)


def gamma_exact(p, *, tol=1e-13):
    """Exact ``(g_minus, g_plus)`` plus the maximizer and value of ``lambda_min(A(gamma))``.

    Golden section finds a definite point ``g_mid``; with ``A(g_mid) = L L^T``
    and ``mu`` the eigenvalues of ``L^-1 A1 L^-T``, ``A(g)`` is PSD exactly when
    ``1 + (g - g_mid) mu_i >= 0`` for all ``i``, which gives both endpoints.
    Requires a point where ``A(gamma)`` is positive definite.
    """
    A0, A1 = p.q0.A.to_dense(), p.q1.A.to_dense()
    lam = lambda_min_curve(p)
    l1 = dense_eig_min(A1)[0]
    if l1 >= 0:
        raise InputError("A1 has no negative eigenvalue; Gamma is unbounded above")
    a0_norm = float(np.max(np.abs(jacobi_eigh(A0)[0])))
    g_far = max(1.0, a0_norm / -l1) * (1 + 1e-9)
    g_star, peak = _golden_max(lam, 0.0, g_far, 1e-9 * g_far)
    if peak <= 0:
        raise InputError(f"no definite point: max lambda_min = {peak:.3g}")
    L = np.linalg.cholesky(A0 + g_star * A1)
    Linv = np.linalg.inv(L)
    mu = jacobi_eigh(Linv @ A1 @ Linv.T, tol=min(tol, 1e-13))[0]
    g_plus = float(g_star + 1.0 / -mu[0])
    g_minus = float(max(0.0, g_star - 1.0 / mu[-1])) if mu[-1] > 0 else 0.0
    return OracleResult("gamma", (g_minus, g_plus), "golden section + Cholesky-reduced Jacobi",
                        tol, details={"gamma_star": g_star, "peak": peak})


class _DualFunction:
    """``d(gamma) = min_x q(gamma, x)`` evaluated in O(n) per gamma.

    A Cholesky factor of ``A(g_mid)`` simultaneously diagonalizes ``A0`` and
    ``A1``: with ``W^T A(g) W = diag(1 + (g - g_mid) mu)`` the minimum is a sum
    of scalar terms.
    """

    def __init__(self, p, g_mid, cutoff=1e-10):
        self.p = p
        A0, A1 = p.q0.A.to_dense(), p.q1.A.to_dense()
        L = np.linalg.cholesky(A0 + g_mid * A1)
        Linv = np.linalg.inv(L)
        mu, U = jacobi_eigh(Linv @ A1 @ Linv.T)
        self.W = Linv.T @ U
        self.mu = mu
        self.g_mid = g_mid
        self.w0 = self.W.T @ p.q0.b
        self.w1 = self.W.T @ p.q1.b
        self.cutoff = cutoff

    def diag(self, g):
        return 1 + (g - self.g_mid) * self.mu

    def __call__(self, g):
        lam = self.diag(g)
        num = self.w0 + g * self.w1
        small = lam <= self.cutoff * np.max(np.abs(lam))
        if np.any(small & (np.abs(num) > 1e-8 * (1 + np.linalg.norm(num)))):
            return -math.inf
        keep = ~small
        return float(self.p.c(g) - np.sum(num[keep] ** 2 / lam[keep]))

    def minimizer(self, g):
        lam = self.diag(g)
        num = self.w0 + g * self.w1
        keep = lam > self.cutoff * np.max(np.abs(lam))
        coef = np.zeros_like(lam)
        coef[keep] = -num[keep] / lam[keep]
        return self.W @ coef

    def null_direction(self, g):
        """Unit vector spanning the (near) kernel of ``A(g)``."""
        i = int(np.argmin(np.abs(self.diag(g))))
        d = self.W[:, i]
        return d / np.linalg.norm(d)


def _grid_opt(p, radius, *, points=None, tol=1e-3, keep=8):
    """Coarse-to-fine grid minimization of ``q0`` over ``{q1 <= 0}`` in a box."""
    n = p.n
    if points is None:
        points = {1: 401, 2: 161}.get(n, 41)
    A0, A1 = p.q0.A.to_dense(), p.q1.A.to_dense()
    boxes = [(np.zeros(n), float(radius))]
    best = (math.inf, None)
    while True:
        cands = []
        h = None
        for center, r in boxes:
            axes = [np.linspace(c - r, c + r, points) for c in center]
            h = 2 * r / (points - 1)
            X = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, n)
            v0 = np.einsum("ij,jk,ik->i", X, A0, X) + 2 * X @ p.q0.b + p.q0.c
            v1 = np.einsum("ij,jk,ik->i", X, A1, X) + 2 * X @ p.q1.b + p.q1.c
            v0[v1 > 0] = math.inf
            idx = np.argsort(v0)[:keep]
            cands += [(v0[i], X[i]) for i in idx if np.isfinite(v0[i])]
        if not cands:
            break
        cands.sort(key=lambda c: c[0])
        if cands[0][0] < best[0]:
            best = cands[0]
        if h <= tol:
            break
        boxes = [(x, 4 * h) for _, x in cands[:keep]]
    return best


def brute_opt(p, *, grid=10_000, cross_check=True):
    """Ground-truth optimum of ``min q0 s.t. q1 <= 0`` via the concave dual over Gamma.

    The primal witness is obtained by splitting the dual minimizer along an exact
    null direction, so it satisfies ``q1 = 0`` up to roundoff.  For ``n <= 3`` a
    direct grid search over ``x`` cross-checks the value.
    """
    if p.n > 50:
        raise InputError("brute_opt is capped at n <= 50")
    gres = gamma_exact(p)
    g_minus, g_plus = gres.value
    dual = _DualFunction(p, gres.details["gamma_star"])
    gs = np.linspace(g_minus, g_plus, grid)
    vals = np.array([dual(g) for g in gs])
    i = int(np.argmax(vals))
    lo, hi = gs[max(i - 1, 0)], gs[min(i + 1, grid - 1)]
    g_bar, v_bar = _golden_max(dual, lo, hi, 1e-14 * max(1.0, g_plus))
    if vals[i] > v_bar:
        g_bar, v_bar = gs[i], vals[i]

    # primal witness
    x_hat = dual.minimizer(g_bar)
    t_hat = max(p(g_minus, x_hat), p(g_plus, x_hat))
    d_minus = dual.null_direction(g_minus)
    d_plus = dual.null_direction(g_plus)
    dec = hull_decompose(p, g_minus, g_plus, d_minus, d_plus, x_hat, t_hat, tau=1e-13)
    q0_1, q0_2 = p.q0(dec.x1), p.q0(dec.x2)
    witness = dec.x1 if q0_1 <= q0_2 else dec.x2
    details = {"gamma_bar": g_bar, "gamma": (g_minus, g_plus), "witness_q0": min(q0_1, q0_2),
               "witness_q1": p.q1(witness), "decomposition_case": dec.case}
    method = "dual gamma-scan + golden section"
    if cross_check and p.n <= 3:
        kappa = max(1.0, g_plus) / min(1.0, gres.details["peak"])
        radius = max(10 * kappa, 2 * float(np.linalg.norm(witness)))
        g_val, g_x = _grid_opt(p, radius)
        details["grid_value"] = g_val
        if not abs(g_val - v_bar) <= 1e-2 * max(1.0, abs(v_bar)):
            raise OracleInconsistency(f"dual value {v_bar:.8g} vs grid value {g_val:.8g}")
        method += "; cross-checked by grid search"
    return OracleResult("opt", v_bar, method, 1e-9, witness=witness, details=details)
