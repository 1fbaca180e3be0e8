"""Regularity of the pencil: how definite it can be made, and how far out Gamma reaches.

A certificate ``(xi, zeta, gamma_hat)`` promises ``lambda_min(A(gamma_hat)) >= xi``
and ``max(1, g_plus) <= zeta``; ``kappa = zeta / xi`` then drives every
iteration count downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    ConvexConstraintRegime,
    InputError,
    NotCertifiablyDefinite,
    UnboundedBelow,
)
from .gamma_boundary import search_gamma_plus
from .lanczos import approx_eig
from .seeding import split

PROVENANCES = ("estimated", "exact-diagonal", "user-supplied")
XI_MAX_ROUNDS = 60
# margins this small are indistinguishable from rounding in the Rayleigh quotients
XI_NOISE_FLOOR = 1e-10


@dataclass(frozen=True)
class RegularityCertificate:
    xi: float
    zeta: float
    gamma_hat: float
    provenance: str = "estimated"
    kappa: float = field(init=False)

    def __post_init__(self):
        if not (0 < self.xi <= 1):
            raise InputError(f"xi must lie in (0, 1], got {self.xi}")
        if not self.zeta >= 1:
            raise InputError(f"zeta must be at least 1, got {self.zeta}")
        if not (0 <= self.gamma_hat <= self.zeta):
            raise InputError(f"gamma_hat must lie in [0, zeta], got {self.gamma_hat}")
        if self.provenance not in PROVENANCES:
            raise InputError(f"unknown provenance {self.provenance!r}")
        object.__setattr__(self, "kappa", self.zeta / self.xi)

    def to_dict(self):
        return {"xi": self.xi, "zeta": self.zeta, "gamma_hat": self.gamma_hat,
                "kappa": self.kappa, "provenance": self.provenance}


@dataclass(frozen=True)
class DiagonalRegularity:
    """Exact quantities for a pencil of diagonal matrices."""

    gamma_minus: float
    gamma_plus: float
    xi: float
    zeta: float
    gamma_star: float
    peak: float  # max_gamma lambda_min(A(gamma)) before the clamp at 1

    def certificate(self):
        return RegularityCertificate(self.xi, self.zeta, self.gamma_star, "exact-diagonal")


def zeta_upper_bound(p, p_fail, rng, *, max_refinements=6, eta_floor=1e-6):
    """Upper bound on ``max(1, g_plus)`` from ``g_plus <= 1 / (-lambda_min(A1))``.

    ``A1`` is assumed normalized (``||A1|| <= 1``).  The eigen accuracy starts at
    1/4 and is tightened until it is a sixteenth of the estimate.
    """
    A1 = p.q1.A
    calls = max_refinements + 1
    rngs = split(rng, calls)
    eta = 0.25
    lam = None
    for i in range(calls):
        lam = approx_eig(A1.matvec, p.n, 1.0, eta, p_fail / calls, rngs[i]).rayleigh
        if lam + eta < 0 and eta <= abs(lam) / 16:
            break
        if eta <= eta_floor or i == calls - 1:
            break
        target = abs(lam) / 16 if lam < 0 else eta / 8
        eta = max(eta_floor, min(eta / 2, target))
    if lam + eta >= 0:
        raise ConvexConstraintRegime(
            f"could not certify a negative eigenvalue of A1 (estimate {lam:.3g}, accuracy {eta:.1g})")
    return max(1.0, 1.0 / (-lam - eta))


def test_xi(p, xi_guess, zeta_bar, p_xi, rng) -> Optional[float]:
    """Bisection for a point ``gamma`` with ``lambda_min(A(gamma)) >= xi_guess/2``.

    Returns the point, or None ("Fail").  A None is guaranteed when
    ``xi_guess > 2 xi*`` and a point is guaranteed when ``xi_guess <= xi*``.
    """
    if not 0 < xi_guess <= 1:
        raise InputError(f"xi guess must lie in (0, 1], got {xi_guess}")
    T = max(0, math.ceil(math.log2(zeta_bar / xi_guess))) + 2
    budget = p_xi / (3 * T)
    rngs = iter(split(rng, 3 * T))
    eta = xi_guess / 4
    accept = 3 * xi_guess / 4
    rho = 2 * zeta_bar

    def probe(gamma):
        est = approx_eig(p.operator(gamma), p.n, rho, eta, budget, next(rngs))
        return est

    s, t = 0.0, float(zeta_bar)
    for _ in range(T):
        if probe(s).rayleigh >= accept:
            return s
        if probe(t).rayleigh >= accept:
            return t
        mid = 0.5 * (s + t)
        est = probe(mid)
        if est.rayleigh >= accept:
            return mid
        # A1 curvature along the near-null vector says which side Gamma is on.
        if est.x @ p.q1.A.matvec(est.x) >= 0:
            s = mid
        else:
            t = mid
    return None


def approx_xi(p, zeta_bar, p_fail, rng, *, max_rounds=XI_MAX_ROUNDS):
    """``(xi, gamma_hat)`` with ``xi*/4 <= xi <= xi*`` and ``lambda_min(A(gamma_hat)) >= xi``."""
    for k in range(1, max_rounds + 1):
        guess = 2.0 ** -(k - 1)
        if guess < XI_NOISE_FLOOR:
            break
        (child,) = split(rng, 1)
        gamma = test_xi(p, guess, zeta_bar, 2.0**-k * p_fail, child)
        if gamma is not None:
            return 2.0**-k, gamma
    raise NotCertifiablyDefinite(f"no definite point found with margin above {max(guess, 2.0**-max_rounds):.3g}")


def approx_zeta(p, xi, zeta_bar, gamma_hat, p_fail, rng):
    """``zeta`` with ``zeta* <= zeta <= 4 zeta*`` by shrinking the upper bound geometrically."""
    k = 1
    while True:
        (child,) = split(rng, 1)
        zeta_k = 2.0 ** -(k - 1) * zeta_bar
        delta_k = 2.0 ** -(k + 1) * zeta_bar
        est = search_gamma_plus(p, xi, zeta_k, gamma_hat, delta_k, 2.0**-k * p_fail, child)
        if est.value > delta_k:
            return zeta_k
        # g_plus <= 2 delta_k; since zeta* >= 1 the next bound must not drop below 1.
        if 2.0**-k * zeta_bar < 1.0:
            return 1.0
        k += 1


def estimate_certificate(p, p_fail, rng):
    """Full randomized certificate; the budget is split evenly across the three stages."""
    r1, r2, r3 = split(rng, 3)
    zeta_bar = zeta_upper_bound(p, p_fail / 3, r1)
    xi, gamma_hat = approx_xi(p, zeta_bar, p_fail / 3, r2)
    zeta = approx_zeta(p, xi, zeta_bar, gamma_hat, p_fail / 3, r3)
    return RegularityCertificate(xi, max(zeta, gamma_hat), gamma_hat, "estimated")


def _lower_envelope(a0, a1):
    """Lines ``a0_i + gamma a1_i`` forming ``min_i`` on the real line, left to right."""
    order = np.lexsort((a0, -a1))  # slope descending, then intercept ascending
    hull = []
    for i in order:
        b, a = a1[i], a0[i]
        if hull and a1[hull[-1]] == b:
            continue  # same slope, larger intercept: never below
        while len(hull) >= 2:
            j, k = hull[-2], hull[-1]
            # k is useless if line i undercuts j no later than k does
            x_jk = (a0[k] - a0[j]) / (a1[j] - a1[k])
            x_ji = (a - a0[j]) / (a1[j] - b)
            if x_ji <= x_jk:
                hull.pop()
            else:
                break
        hull.append(i)
    return hull


def diag_regularity(a0, a1):
    """Exact ``(g_minus, g_plus, xi*, zeta*, gamma*)`` for diagonal ``A0, A1``.

    ``lambda_min(A(gamma)) = min_i (a0_i + gamma a1_i)`` is a concave
    piecewise-linear function; its envelope is built by sorting slopes.
    """
    a0 = np.asarray(a0, dtype=float)
    a1 = np.asarray(a1, dtype=float)
    if a0.shape != a1.shape or a0.ndim != 1 or a0.size == 0:
        raise InputError("diagonals must be nonempty vectors of equal length")
    if np.any((a1 == 0) & (a0 < 0)):
        raise UnboundedBelow("a constant negative direction: Gamma is empty")
    pos, neg = a1 > 0, a1 < 0
    g_minus = max(0.0, float(np.max(-a0[pos] / a1[pos], initial=0.0)))
    if not np.any(neg):
        raise ConvexConstraintRegime("A1 has no negative eigenvalue: Gamma is unbounded above")
    g_plus = float(np.min(a0[neg] / -a1[neg]))
    if g_minus > g_plus:
        raise UnboundedBelow("Gamma is empty")

    hull = _lower_envelope(a0, a1)
    slopes = a1[hull]
    # first envelope piece that does not increase; the concave maximum sits at its left end
    m = int(np.argmax(slopes <= 0))
    best_g = 0.0
    if m > 0:
        j, k = hull[m - 1], hull[m]
        best_g = max(0.0, float((a0[k] - a0[j]) / (a1[j] - a1[k])))
    best_v = float(np.min(a0 + best_g * a1))
    if best_v <= 0:
        raise NotCertifiablyDefinite(f"max_gamma lambda_min(A(gamma)) = {best_v:.3g} is not positive")
    return DiagonalRegularity(g_minus, g_plus, min(1.0, best_v), max(1.0, g_plus), best_g, best_v)
