"""Geometry of the convex hull of the epigraph set.

With ``Gamma = [g_minus, g_plus]`` the closed convex hull of
``S = {(x, t) : q0(x) <= t, q1(x) <= 0}`` is ``S(g_minus) & S(g_plus)``, where
``S(g) = {(x, t) : q0(x) + g q1(x) <= t}``.  This module classifies which regime
a pencil is in, tests hull membership, and splits a hull point into two points
on the tight part ``{q1 = 0}`` of the epigraph.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    ConvexConstraintRegime,
    IndefiniteClassification,
    NotCertifiablyDefinite,
    RoundingFailed,
)
from .lanczos import approx_eig
from .quad_model import evaluate, pencil_eval
from .regularity import approx_xi, zeta_upper_bound
from .seeding import split


class Regime(enum.Enum):
    DEFINITE_POINT = "both-nonconvex-definite-point"
    PSD_ONLY = "both-nonconvex-psd-only"
    CONVEX_CONSTRAINT = "convex-constraint-unbounded-gamma"
    GAMMA_EMPTY = "gamma-empty"
    GAMMA_MINUS_ZERO = "convex-objective-gamma-minus-zero"


@dataclass(frozen=True)
class PencilRegime:
    kind: Regime
    zeta_bar: Optional[float] = None
    xi: Optional[float] = None
    gamma_hat: Optional[float] = None
    margins: dict = field(default_factory=dict)

    @property
    def solvable(self):
        return self.kind in (Regime.DEFINITE_POINT, Regime.GAMMA_MINUS_ZERO)


@dataclass(frozen=True)
class HullDecomposition:
    """``theta * (x1, t1) + (1 - theta) * (x2, t2)`` equals the decomposed point."""

    x1: np.ndarray
    t1: float
    x2: np.ndarray
    t2: float
    theta: float
    case: str  # "on-boundary", "q1-positive" or "q1-negative"


def boundary_tolerance(x):
    """Threshold below which ``|q1(x)|`` counts as zero."""
    return 1e-12 * (1.0 + float(np.linalg.norm(x))) ** 2


def quadratic_roots(a, b, c, *, rel_tol=1e-12):
    """Real roots of ``a t^2 + 2 b t + c``, ascending, via the cancellation-free formula.

    Returns an empty tuple when there is no real root beyond tolerance.
    """
    scale = max(abs(a), abs(b), abs(c), 1e-300)
    if abs(a) <= 1e-14 * scale:
        if b == 0:
            return ()
        return (-c / (2 * b),)
    disc = b * b - a * c
    if disc < 0:
        if disc < -rel_tol * (b * b + abs(a * c)):
            return ()
        disc = 0.0
    q = -(b + math.copysign(math.sqrt(disc), b))
    if q == 0:
        return (0.0, 0.0)
    r1, r2 = q / a, c / q
    return (min(r1, r2), max(r1, r2))


def polish_root(f, slope, alpha, steps=3):
    """Newton steps on ``f(alpha) = 0`` with derivative ``slope(alpha)``."""
    for _ in range(steps):
        val = f(alpha)
        der = slope(alpha)
        if val == 0 or der == 0 or not math.isfinite(val):
            break
        step = val / der
        alpha -= step
        if abs(step) <= 1e-16 * (1 + abs(alpha)):
            break
    return alpha


def ray_coefficients(q1, x, d):
    """``q1(x + a d) = coef[0] a^2 + 2 coef[1] a + coef[2]``."""
    A1d = q1.A.matvec(d)
    return float(d @ A1d), float(A1d @ x + q1.b @ d), evaluate(q1, x)


def hull_membership(p, gamma_minus, gamma_plus, x, t):
    """Whether ``(x, t)`` lies in ``S(gamma_minus) & S(gamma_plus)``.

    ``gamma_plus=None`` means Gamma is unbounded, in which case the second set
    is replaced by ``{q1 <= 0}``.
    """
    tol = 1e-9 * (1.0 + abs(t))
    if pencil_eval(p, gamma_minus, x) > t + tol:
        return False
    if gamma_plus is None:
        return evaluate(p.q1, x) <= tol
    return pencil_eval(p, gamma_plus, x) <= t + tol


def hull_decompose(p, gamma_minus, gamma_plus, dir_minus, dir_plus, x, t, tau=None):
    """Two points of ``{q1 = 0, q0 <= t}`` whose convex combination is ``(x, t)``.

    ``dir_plus`` should be a null direction of ``A(gamma_plus)`` (used when
    ``q1(x) > 0``), ``dir_minus`` one of ``A(gamma_minus)`` (used when ``q1(x) < 0``).
    Along such a direction the active aggregated quadratic is affine, so the
    epigraph coordinate moves linearly with slope ``e``.
    """
    x = np.asarray(x, dtype=float)
    tau = boundary_tolerance(x) if tau is None else tau
    c1 = evaluate(p.q1, x)
    if abs(c1) <= tau:
        return HullDecomposition(x.copy(), float(t), x.copy(), float(t), 1.0, "on-boundary")
    if c1 > 0:
        gamma, d, case = gamma_plus, np.asarray(dir_plus, float), "q1-positive"
    else:
        gamma, d, case = gamma_minus, np.asarray(dir_minus, float), "q1-negative"
    e = 2.0 * float(x @ p.matvec(gamma, d) + p.b(gamma) @ d)
    a, bh, ch = ray_coefficients(p.q1, x, d)
    roots = quadratic_roots(a, bh, ch)
    if len(roots) != 2 or not roots[0] < 0 < roots[1]:
        raise RoundingFailed(f"no roots of both signs along the direction (roots {roots})")

    def f(al):
        return evaluate(p.q1, x + al * d)

    def slope(al):
        return 2.0 * (a * al + bh)

    a1 = polish_root(f, slope, roots[0])
    a2 = polish_root(f, slope, roots[1])
    theta = a2 / (a2 - a1)
    return HullDecomposition(x + a1 * d, float(t + a1 * e), x + a2 * d, float(t + a2 * e),
                             float(theta), case)


def _gamma_empty_certificate(p, lo, hi, rng, *, eta=1e-3, max_probes=64):
    """Try to prove ``A(gamma)`` is indefinite for every gamma in ``[lo, hi]``.

    A vector ``x`` with ``x^T A(g) x = r < 0`` rules out the half-line on which
    the affine function ``gamma -> x^T A(gamma) x`` stays negative.  Returns
    ``(proved, best_rayleigh)``.
    """
    rho = 1.0 + max(abs(lo), abs(hi))
    rngs = split(rng, max_probes)
    best = -math.inf
    for i in range(max_probes):
        if lo > hi:
            return True, best
        g = 0.5 * (lo + hi)
        est = approx_eig(p.operator(g), p.n, rho, eta, 0.5, rngs[i])
        r = est.rayleigh
        best = max(best, r)
        if r >= 0:
            return False, best
        s = float(est.x @ p.q1.A.matvec(est.x))
        if s == 0:
            return True, best
        reach = -r / abs(s)
        if s > 0:
            lo = g + reach * (1 - 1e-12)
        else:
            hi = g - reach * (1 - 1e-12)
    return lo > hi, best


def classify_pencil(p, p_fail, rng):
    """Regime of a normalized pencil.

    The randomized parts use half the failure budget for the ``zeta`` bound and
    half for the search for a definite point.
    """
    r_zeta, r_empty, r_xi, r_a0 = split(rng, 4)
    try:
        zeta_bar = zeta_upper_bound(p, p_fail / 2, r_zeta)
    except ConvexConstraintRegime:
        return PencilRegime(Regime.CONVEX_CONSTRAINT)
    empty, best = _gamma_empty_certificate(p, 0.0, zeta_bar, r_empty)
    margins = {"zeta_bar": zeta_bar, "best_rayleigh": best}
    if empty:
        return PencilRegime(Regime.GAMMA_EMPTY, zeta_bar=zeta_bar, margins=margins)
    try:
        xi, gamma_hat = approx_xi(p, zeta_bar, p_fail / 2, r_xi)
    except NotCertifiablyDefinite:
        if best >= -1e-9:
            return PencilRegime(Regime.PSD_ONLY, zeta_bar=zeta_bar, margins=margins)
        raise IndefiniteClassification(
            "neither a definite point nor an emptiness proof was found", margins)
    if gamma_hat == 0.0:
        kind = Regime.GAMMA_MINUS_ZERO
    else:
        est = approx_eig(p.q0.A.matvec, p.n, 1.0, 1e-3, 0.5, r_a0)
        margins["a0_rayleigh"] = est.rayleigh
        # a negative Rayleigh quotient proves A0 is indefinite
        kind = Regime.DEFINITE_POINT if est.rayleigh < 0 else Regime.GAMMA_MINUS_ZERO
    return PencilRegime(kind, zeta_bar=zeta_bar, xi=xi, gamma_hat=gamma_hat, margins=margins)
