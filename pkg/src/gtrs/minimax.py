"""Accelerated first-order method for ``min_x max{f0(x), f1(x)}``.

Here ``f0 = q(g_minus, .)`` and ``f1 = q(g_plus, .)`` are convex quadratics
sharing the pencil's matrices.  Each step minimizes the max of two linear
models plus a common proximal term; that subproblem has a closed form on the
segment between the two model centers.  Every iteration costs one product with
``A0`` and one with ``A1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InputError, NumericalError

RATE_CONSTANT = 760.0
TIE_TOL = 1e-14


@dataclass(frozen=True)
class MinimaxProblem:
    pencil: object
    gamma_minus: float
    gamma_plus: float
    L: float

    def __post_init__(self):
        if not self.L > 0:
            raise InputError(f"smoothness parameter must be positive, got {self.L}")

    @classmethod
    def from_bracket(cls, pencil, bracket, zeta):
        """Problem for a bracket, with ``L = 2 zeta``."""
        return cls(pencil, bracket.gamma_minus, bracket.gamma_plus, 2.0 * zeta)

    def values(self, x):
        p = self.pencil
        A0x, A1x = p.q0.A.matvec(x), p.q1.A.matvec(x)
        return self._values_from(x, A0x, A1x)

    def _values_from(self, x, A0x, A1x):
        p = self.pencil
        q0 = float(x @ A0x + 2 * (p.q0.b @ x) + p.q0.c)
        q1 = float(x @ A1x + 2 * (p.q1.b @ x) + p.q1.c)
        return q0 + self.gamma_minus * q1, q0 + self.gamma_plus * q1

    def objective(self, x):
        return max(self.values(x))


@dataclass
class MinimaxTrace:
    alphas: list = field(default_factory=list)
    betas: list = field(default_factory=list)
    values: list = field(default_factory=list)  # objective at x_k, k = 0..K
    best_index: int = 0
    xs: Optional[list] = None
    ys: Optional[list] = None

    def best_so_far(self):
        return np.minimum.accumulate(np.asarray(self.values))


@dataclass(frozen=True)
class MinimaxResult:
    x: np.ndarray
    value: float
    iterations: int
    trace: MinimaxTrace


def iteration_budget(kappa, zeta, eps):
    """Iterations after which the rate bound ``760 kappa^2 zeta / (k+1)^2`` is ``<= eps/2``."""
    if not eps > 0:
        raise InputError(f"accuracy must be positive, got {eps}")
    return math.ceil(math.sqrt(2 * RATE_CONSTANT * kappa**2 * zeta / eps))


def rate_bound(kappa, zeta, k):
    return RATE_CONSTANT * kappa**2 * zeta / (k + 1) ** 2


def next_alpha(a):
    return 0.5 * (math.sqrt(a**4 + 4 * a**2) - a**2)


def prox_step(y, f0, g0, f1, g1, L):
    """Minimizer of ``max_i f_i + <g_i, x - y> + L ||x - y||^2``.

    The model is ``max_i L ||x - z_i||^2 + h_i`` and its minimizer lies on the
    segment ``[z0, z1]`` where the two terms balance.
    """
    z0 = y - g0 / (2 * L)
    z1 = y - g1 / (2 * L)
    h0 = f0 - float(g0 @ g0) / (4 * L)
    h1 = f1 - float(g1 @ g1) / (4 * L)
    diff = z1 - z0
    dd = float(diff @ diff)
    if math.sqrt(dd) <= 1e-14 * (1 + float(np.linalg.norm(y))):
        return z0
    a = 0.5 - (h0 - h1) / (2 * L * dd)
    a = min(1.0, max(0.0, a))
    return z0 + a * diff


def solve_minimax(mp, eps=None, *, iterations=None, kappa=None, zeta=None,
                  early_exit=False, stall_rounds=50, record_iterates=False):
    """Run the scheme from ``x0 = y0 = 0`` and return the best iterate.

    The iteration count is ``iteration_budget(kappa, zeta, eps)`` unless
    ``iterations`` is given.  ``zeta`` defaults to ``L / 2``.
    """
    p = mp.pencil
    if iterations is None:
        if eps is None or kappa is None:
            raise InputError("give either iterations or (eps, kappa)")
        zeta = mp.L / 2 if zeta is None else zeta
        iterations = iteration_budget(kappa, zeta, eps)
    gm, gp, L = mp.gamma_minus, mp.gamma_plus, mp.L
    dg = gp - gm
    n = p.n
    B = np.vstack([p.q0.b, p.q1.b])
    C = np.array([p.q0.c, p.q1.c])
    pair = _pair_matvec(p)

    # rows: point, A0 @ point, A1 @ point
    X = np.zeros((3, n))
    Y = X
    alpha = 0.5
    trace = MinimaxTrace(xs=[X[0].copy()] if record_iterates else None,
                         ys=[Y[0].copy()] if record_iterates else None)
    best = max(C[0] + gm * C[1], C[0] + gp * C[1])
    best_x, best_val = X[0], best
    trace.values.append(best)
    trace.alphas.append(alpha)
    stall = 0
    k_done = 0
    inv2L = 1.0 / (2 * L)
    for k in range(iterations):
        # Both model gradients are G0 + gamma_i G1; the prox point is the
        # gradient step for an effective multiplier between the two endpoints.
        y = Y[0]
        H = Y[1:] + B
        G = 2.0 * H
        qy0, qy1 = ((H + B) @ y + C).tolist()
        (s00, s01), (_, s11) = (G @ G.T).tolist()
        gamma_eff = gm
        dd = dg * dg * s11 * inv2L * inv2L  # ||z1 - z0||^2
        if math.sqrt(dd) > 1e-14 * (1 + math.sqrt(float(y @ y))):
            h0 = qy0 + gm * qy1 - (s00 + 2 * gm * s01 + gm * gm * s11) * inv2L * 0.5
            h1 = qy0 + gp * qy1 - (s00 + 2 * gp * s01 + gp * gp * s11) * inv2L * 0.5
            a = 0.5 - (h0 - h1) / (2 * L * dd)
            gamma_eff = gm + min(1.0, max(0.0, a)) * dg
        Xn = np.empty((3, n))
        Xn[0] = y - (G[0] + gamma_eff * G[1]) * inv2L
        Xn[1], Xn[2] = pair(Xn[0])
        alpha_new = next_alpha(alpha)
        beta = alpha * (1 - alpha) / (alpha**2 + alpha_new)
        Y = Xn + beta * (Xn - X)
        X, alpha = Xn, alpha_new
        x = X[0]

        qx0, qx1 = ((X[1:] + 2.0 * B) @ x + C).tolist()
        val = qx0 + (gp if qx1 > 0 else gm) * qx1
        if not math.isfinite(val):
            raise NumericalError(f"non-finite objective at iteration {k + 1}")
        trace.values.append(val)
        trace.alphas.append(alpha)
        trace.betas.append(beta)
        if record_iterates:
            trace.xs.append(x.copy())
            trace.ys.append(Y[0].copy())
        k_done = k + 1
        # Near the optimum the values differ only by rounding, so ties go to the
        # later iterate; the iterates themselves are far more reproducible than
        # an argmin over noise.
        if val <= best + TIE_TOL * (1 + abs(best)):
            best_x, best_val = x, val
            trace.best_index = k + 1
        if val < best:
            stall = 0 if best - val >= 1e-16 * (1 + abs(best)) else stall + 1
            best = val
        else:
            stall += 1
        if early_exit and stall >= stall_rounds:
            break
    return MinimaxResult(best_x.copy(), float(best_val), k_done, trace)


def _pair_matvec(p):
    """``x -> (A0 x, A1 x)``, one stacked product when both are stored densely."""
    op0, op1 = p.q0.A._op, p.q1.A._op
    if isinstance(op0, np.ndarray) and isinstance(op1, np.ndarray):
        stacked = np.vstack([op0, op1])
        n = p.n
        def pair(v):
            w = stacked @ v
            return w[:n], w[n:]
        return pair
    return lambda v: (op0 @ v, op1 @ v)
