"""Bisection for the endpoints of the interval of convexifying multipliers.

``Gamma = {gamma >= 0 : A0 + gamma A1 is PSD}`` is an interval ``[g_minus, g_plus]``.
Each search keeps a bracket ``[s, t]`` and asks a randomized eigen-test at the
midpoint whether ``lambda_min(A(gamma))`` sits in the window
``[delta/(4 kappa), delta/kappa]``; Lipschitz localization turns that window
into ``delta`` accuracy on gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import BisectionFailed, CertificateError, InputError
from .lanczos import approx_eig
from .seeding import split

MIN_DELTA_REL = 1e-12


@dataclass(frozen=True)
class EndpointEstimate:
    """One endpoint estimate with the Rayleigh value that accepted it."""

    value: float
    residual: float
    rounds: int
    eig_iterations: int
    trace: tuple = ()


@dataclass(frozen=True)
class GammaBracket:
    """Approximate endpoints with ``lambda_min(A(g)) in [0, delta/kappa]`` at both."""

    gamma_minus: float
    gamma_plus: float
    delta: float
    residual_minus: float
    residual_plus: float
    eig_iterations: int = 0
    rounds: tuple = field(default=(0, 0))

    @property
    def width(self):
        return self.gamma_plus - self.gamma_minus


def effective_delta(delta, zeta):
    """Clamp ``delta`` to ``[1e-12 zeta, zeta]``.

    Above ``zeta = kappa xi`` the acceptance window would start above
    ``xi/4`` and might lie above every attainable ``lambda_min``; a smaller
    delta only strengthens the guarantee.
    """
    return min(max(delta, MIN_DELTA_REL * zeta), zeta)


def bisection_rounds(zeta, kappa, delta):
    return max(1, math.ceil(math.log2(zeta * kappa / delta))) + 2


def _window_search(p, xi, zeta, lo, hi, delta, p_fail, rng, upper):
    kappa = zeta / xi
    if not delta > 0:
        raise InputError(f"delta must be positive, got {delta}")
    delta = effective_delta(delta, zeta)
    eta = delta / (4 * kappa)
    top = delta / kappa
    T = bisection_rounds(zeta, kappa, delta)
    rngs = split(rng, T + 1)
    budget = p_fail / (T + 1)
    n = p.n
    iters = 0
    trace = []

    def test(gamma, r):
        nonlocal iters
        est = approx_eig(p.operator(gamma), n, 2 * zeta, eta, budget, r)
        iters += est.iterations
        return est.rayleigh

    # Pre-test at the outer end of the bracket.
    edge = hi if upper else lo
    r0 = test(edge, rngs[0])
    trace.append((lo, hi, edge, r0))
    if eta <= r0 <= top:
        return EndpointEstimate(edge, r0, 0, iters, tuple(trace))
    if upper and r0 > top:
        raise CertificateError(f"A({edge:.6g}) is certifiably definite, so zeta is below gamma_plus")
    if not upper and r0 > top:
        return EndpointEstimate(edge, r0, 0, iters, tuple(trace))

    s, t = lo, hi
    for k in range(T):
        gamma = 0.5 * (s + t)
        r = test(gamma, rngs[k + 1])
        trace.append((s, t, gamma, r))
        if r < eta:
            if upper:
                t = gamma
            else:
                s = gamma
        elif r > top:
            if upper:
                s = gamma
            else:
                t = gamma
        else:
            return EndpointEstimate(gamma, r, k + 1, iters, tuple(trace))
    side = "upper" if upper else "lower"
    raise BisectionFailed(f"{side} endpoint search exhausted {T} rounds in [{s:.6g}, {t:.6g}]")


def search_gamma_plus(p, xi, zeta, gamma_hat, delta, p_fail, rng):
    """Upper endpoint search on ``[gamma_hat, zeta]`` with explicit regularity numbers."""
    return _window_search(p, xi, zeta, gamma_hat, zeta, delta, p_fail, rng, upper=True)


def search_gamma_minus(p, xi, zeta, gamma_hat, delta, p_fail, rng):
    """Lower endpoint search on ``[0, gamma_hat]``; returns 0 when ``A(0)`` is PSD."""
    return _window_search(p, xi, zeta, 0.0, gamma_hat, delta, p_fail, rng, upper=False)


def approx_gamma_plus(p, cert, delta, p_fail, rng):
    """``g`` in ``[g_plus - delta, g_plus]`` with ``lambda_min(A(g)) <= delta/kappa``."""
    return search_gamma_plus(p, cert.xi, cert.zeta, cert.gamma_hat, delta, p_fail, rng)


def approx_gamma_minus(p, cert, delta, p_fail, rng):
    """``g`` in ``[g_minus, g_minus + delta]`` with ``lambda_min(A(g)) <= delta/kappa``."""
    return search_gamma_minus(p, cert.xi, cert.zeta, cert.gamma_hat, delta, p_fail, rng)


def gamma_bracket(p, cert, delta, p_fail, rng):
    """Both endpoints, each with half the failure budget."""
    r_minus, r_plus = split(rng, 2)
    lo = approx_gamma_minus(p, cert, delta, p_fail / 2, r_minus)
    hi = approx_gamma_plus(p, cert, delta, p_fail / 2, r_plus)
    return GammaBracket(
        gamma_minus=lo.value,
        gamma_plus=hi.value,
        delta=effective_delta(delta, cert.zeta),
        residual_minus=lo.residual,
        residual_plus=hi.residual,
        eig_iterations=lo.eig_iterations + hi.eig_iterations,
        rounds=(lo.rounds, hi.rounds),
    )
