"""End-to-end solver: certificate, endpoint bracket, minimax solve, rounding.

``approx_convex`` returns a point whose certified value
``max{q(g_minus, x), q(g_plus, x)}`` is within ``eps`` of the optimum.
``approx_gtrs`` moves that point along a near-null direction of the active
aggregated matrix onto ``{q1 = 0}``.  ``solve`` wraps both for raw input and
reports in the units the user supplied.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    CertificateError,
    ConvexConstraintRegime,
    InputError,
    NotCertifiablyDefinite,
    RoundingFailed,
    UnboundedBelow,
)
from .gamma_boundary import GammaBracket, gamma_bracket
from .hull import Regime, boundary_tolerance, classify_pencil, polish_root, quadratic_roots, ray_coefficients
from .lanczos import approx_eig
from .minimax import MinimaxProblem, MinimaxResult, solve_minimax
from .quad_model import NormalizationScales, evaluate, normalize, pencil_eval
from .regularity import RegularityCertificate, approx_zeta, diag_regularity
from .seeding import root_generator, split

MODES = ("value", "boundary", "inequality", "equality", "interval", "hollow")
BOUNDARY_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class SolverConfig:
    """Knobs of ``solve``; defaults follow the analysis."""

    eps: float = 1e-3
    p_fail: float = 0.01
    mode: str = "value"
    seed: int = 0
    exact_if_diagonal: bool = False
    early_exit: bool = False
    check_certificate: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise InputError(f"unknown mode {self.mode!r}; choose from {MODES}")
        if not self.eps > 0:
            raise InputError(f"eps must be positive, got {self.eps}")
        if not 0 < self.p_fail < 1:
            raise InputError(f"failure probability must lie in (0, 1), got {self.p_fail}")


@dataclass(frozen=True)
class ConvexSolution:
    """Output of the convex stage, in normalized units."""

    gamma_minus: float
    gamma_plus: float
    x: np.ndarray
    value: float
    delta: float
    eps_requested: float
    eps_effective: float
    bracket: GammaBracket
    minimax: MinimaxResult


@dataclass(frozen=True)
class RoundedSolution:
    """Output of the rounding stage, in normalized units."""

    x: np.ndarray
    objective: float
    residual: float
    alpha: float
    case: str
    eps_r_requested: float
    eps_r_effective: float
    eps_c: float
    convex: ConvexSolution
    rounding_iterations: int = 0


def check_certificate(p, cert, rng):
    """Refute the certificate if a Rayleigh quotient at ``gamma_hat`` falls below ``xi``.

    Any Rayleigh quotient bounds ``lambda_min`` from above, so this check never
    rejects a valid certificate.
    """
    est = approx_eig(p.operator(cert.gamma_hat), p.n, 2 * cert.zeta, cert.xi / 4, 0.5, rng)
    if est.rayleigh < cert.xi - 1e-12 * (1 + cert.zeta):
        raise CertificateError(
            f"x^T A(gamma_hat) x = {est.rayleigh:.6g} < xi = {cert.xi:.6g} at gamma_hat = {cert.gamma_hat:.6g}")
    return est


def approx_convex(p, cert, eps, p_fail, rng, *, early_exit=False, verify=True):
    """Endpoint bracket and a point with ``Opt <= value <= Opt + eps`` (w.p. ``1 - p_fail``)."""
    if not eps > 0:
        raise InputError(f"eps must be positive, got {eps}")
    kappa = cert.kappa
    eps_eff = min(eps, kappa**2 * cert.xi)
    delta = eps_eff / (72 * kappa**2)
    r_check, r_bracket = split(rng, 2)
    if verify:
        check_certificate(p, cert, r_check)
    bracket = gamma_bracket(p, cert, delta, p_fail, r_bracket)
    mp = MinimaxProblem.from_bracket(p, bracket, cert.zeta)
    res = solve_minimax(mp, eps_eff, kappa=kappa, zeta=cert.zeta, early_exit=early_exit)
    x = res.x
    value = max(pencil_eval(p, bracket.gamma_minus, x), pencil_eval(p, bracket.gamma_plus, x))
    return ConvexSolution(bracket.gamma_minus, bracket.gamma_plus, x, value, bracket.delta,
                          eps, eps_eff, bracket, res)


def boundary_step(p, x, d, gamma):
    """Move ``x`` along ``+-d`` to the nearest nonnegative root of ``q1``.

    ``d`` is oriented so that ``e = 2 (x^T A(gamma) d + b(gamma)^T d) <= 0``,
    i.e. the aggregated objective does not increase.  Returns ``(x_bar, alpha, e)``.
    """
    d = np.asarray(d, dtype=float)
    e = 2.0 * float(x @ p.matvec(gamma, d) + p.b(gamma) @ d)
    if e > 0:
        d, e = -d, -e
    a, bh, ch = ray_coefficients(p.q1, x, d)
    roots = quadratic_roots(a, bh, ch)
    slack = 1e-14 * (1 + float(np.linalg.norm(x)))
    candidates = [max(r, 0.0) for r in roots if r >= -slack]
    if not candidates:
        raise RoundingFailed(f"no nonnegative root along the rounding direction (roots {roots})")
    alpha0 = min(candidates)

    def f(al):
        return evaluate(p.q1, x + al * d)

    def slope(al):
        return 2.0 * (a * al + bh)

    alpha = polish_root(f, slope, alpha0)
    if alpha < 0 or abs(f(alpha)) > abs(f(alpha0)):
        alpha = alpha0
    return x + alpha * d, float(alpha), float(e)


def approx_gtrs(p, cert, eps_r, p_fail, rng, *, early_exit=False, verify=True):
    """Point with ``q1 = 0`` and ``q0 <= Opt + eps_r`` (w.p. ``1 - p_fail``)."""
    if not eps_r > 0:
        raise InputError(f"eps must be positive, got {eps_r}")
    kappa = cert.kappa
    eps_r_eff = min(eps_r, kappa**3 * cert.xi)
    eps_c = eps_r_eff / (28 * kappa)
    r_convex, r_dir = split(rng, 2)
    conv = approx_convex(p, cert, eps_c, p_fail / 2, r_convex, early_exit=early_exit, verify=verify)
    x = conv.x
    c1 = evaluate(p.q1, x)
    iters = 0
    if abs(c1) <= boundary_tolerance(x):
        x_bar, alpha, case = x.copy(), 0.0, "on-boundary"
    else:
        gamma, case = (conv.gamma_plus, "q1-positive") if c1 > 0 else (conv.gamma_minus, "q1-negative")
        est = approx_eig(p.operator(gamma), p.n, 2 * cert.zeta, conv.delta / kappa, p_fail / 2, r_dir)
        iters = est.iterations
        x_bar, alpha, _ = boundary_step(p, x, est.x, gamma)
    return RoundedSolution(x_bar, evaluate(p.q0, x_bar), evaluate(p.q1, x_bar), alpha, case,
                           eps_r, eps_r_eff, eps_c, conv, iters)


@dataclass
class SolveReport:
    """Result of ``solve`` in the caller's units (timings kept separately)."""

    mode: str
    status: str
    value: float
    objective: Optional[float]
    x: Optional[list]
    x_convex: list
    residual: Optional[float]
    gamma_minus: float
    gamma_plus: float
    gamma_minus_normalized: float
    gamma_plus_normalized: float
    delta: float
    eps_requested: float
    eps_effective: float
    eps_c: Optional[float]
    certificate: dict
    regime: str
    iterations: dict
    scales: dict
    checks: dict
    seed: Optional[int]
    p_fail: float
    timings: dict = field(default_factory=dict)

    def to_dict(self, include_timings=True):
        d = asdict(self)
        if not include_timings:
            d.pop("timings")
        return d


def map_certificate(cert, scales):
    """Certificate of the raw pencil expressed for the normalized one.

    ``A'(g') = s0 A(g' s1 / s0)``, so margins scale by ``s0`` and multipliers by
    ``s0 / s1``.
    """
    if isinstance(cert, dict):
        xi, zeta, gamma_hat = cert["xi"], cert["zeta"], cert["gamma_hat"]
    else:
        xi, zeta, gamma_hat = cert.xi, cert.zeta, cert.gamma_hat
    g = scales.gamma_to_normalized(gamma_hat)
    return RegularityCertificate(min(1.0, xi * scales.s0),
                                 max(1.0, scales.gamma_to_normalized(zeta), g), g, "user-supplied")


def _certificate_for(p, scales, cfg, certificate, rng, timings):
    """Certificate and regime label for a normalized pencil."""
    t0 = time.perf_counter()
    if certificate is not None:
        timings["certificate"] = time.perf_counter() - t0
        return map_certificate(certificate, scales), "user-supplied"
    if cfg.exact_if_diagonal and p.is_diagonal:
        info = diag_regularity(p.q0.A.diagonal(), p.q1.A.diagonal())
        timings["certificate"] = time.perf_counter() - t0
        kind = Regime.GAMMA_MINUS_ZERO if info.gamma_minus == 0 else Regime.DEFINITE_POINT
        return info.certificate(), kind.value
    r_cls, r_zeta = split(rng, 2)
    regime = classify_pencil(p, cfg.p_fail / 4, r_cls)
    timings["classify"] = time.perf_counter() - t0
    if regime.kind is Regime.GAMMA_EMPTY:
        raise UnboundedBelow("Gamma is empty: no multiplier convexifies the pencil, so the value is -inf")
    if regime.kind is Regime.CONVEX_CONSTRAINT:
        raise ConvexConstraintRegime("the constraint appears convex (Gamma unbounded); not solved here")
    if regime.kind is Regime.PSD_ONLY:
        raise NotCertifiablyDefinite("the pencil is at best positive semidefinite; no margin to work with")
    t1 = time.perf_counter()
    zeta = approx_zeta(p, regime.xi, regime.zeta_bar, regime.gamma_hat, cfg.p_fail / 4, r_zeta)
    timings["certificate"] = time.perf_counter() - t1
    cert = RegularityCertificate(regime.xi, max(zeta, regime.gamma_hat), regime.gamma_hat, "estimated")
    return cert, regime.kind.value


def solve(p_raw, config=None, *, certificate=None, rng=None, **overrides):
    """Normalize, certify, solve and map back to the caller's units.

    ``certificate`` (object or dict with xi, zeta, gamma_hat) describes the
    pencil as given; it is mapped through the normalization and replaces the
    randomized classification.
    """
    cfg = config or SolverConfig()
    if overrides:
        cfg = SolverConfig(**{**asdict(cfg), **overrides})
    rng = root_generator(cfg.seed if rng is None else rng)
    timings = {}
    t0 = time.perf_counter()
    p, scales = normalize(p_raw)
    timings["normalize"] = time.perf_counter() - t0
    r_cert, r_alg = split(rng, 2)
    cert, regime = _certificate_for(p, scales, cfg, certificate, r_cert, timings)

    budget = cfg.p_fail / 2 if certificate is None and not (cfg.exact_if_diagonal and p.is_diagonal) else cfg.p_fail
    t1 = time.perf_counter()
    eps_norm = cfg.eps * scales.s0  # accuracy in normalized units
    checks = {}
    if cfg.mode == "value":
        conv = approx_convex(p, cert, eps_norm, budget, r_alg, early_exit=cfg.early_exit,
                             verify=cfg.check_certificate)
        rounded = None
    else:
        rounded = approx_gtrs(p, cert, eps_norm, budget, r_alg, early_exit=cfg.early_exit,
                              verify=cfg.check_certificate)
        conv = rounded.convex
    timings["solve"] = time.perf_counter() - t1

    x_report = None
    objective = residual = eps_c = None
    if rounded is not None:
        x_sol = rounded.x
        if cfg.mode == "inequality":
            # the convex point itself may already be feasible and better
            c1 = evaluate(p.q1, conv.x)
            if c1 <= 0 and evaluate(p.q0, conv.x) < rounded.objective:
                x_sol = conv.x
        q0v, q1v = evaluate(p.q0, x_sol), evaluate(p.q1, x_sol)
        x_report = x_sol.tolist()
        objective = scales.value_to_original(q0v)
        residual = q1v / scales.s1
        eps_c = rounded.eps_c / scales.s0
        if cfg.mode == "inequality":
            checks["feasible"] = q1v <= BOUNDARY_RESIDUAL_TOL
        else:
            checks["boundary"] = abs(q1v) <= BOUNDARY_RESIDUAL_TOL
            if cfg.mode == "interval":
                checks["interval"] = q1v >= -1 - BOUNDARY_RESIDUAL_TOL
    eps_eff_norm = rounded.eps_r_effective if rounded is not None else conv.eps_effective
    iterations = {
        "minimax": conv.minimax.iterations,
        "minimax_best_index": conv.minimax.trace.best_index,
        "bracket_eig": conv.bracket.eig_iterations,
        "bracket_rounds": list(conv.bracket.rounds),
        "rounding_eig": rounded.rounding_iterations if rounded is not None else 0,
    }
    return SolveReport(
        mode=cfg.mode,
        status="ok",
        value=scales.value_to_original(conv.value),
        objective=objective,
        x=x_report,
        x_convex=conv.x.tolist(),
        residual=residual,
        gamma_minus=scales.gamma_to_original(conv.gamma_minus),
        gamma_plus=scales.gamma_to_original(conv.gamma_plus),
        gamma_minus_normalized=conv.gamma_minus,
        gamma_plus_normalized=conv.gamma_plus,
        delta=conv.delta,
        eps_requested=cfg.eps,
        eps_effective=eps_eff_norm / scales.s0,
        eps_c=eps_c,
        certificate=cert.to_dict(),
        regime=regime,
        iterations=iterations,
        scales={"s0": scales.s0, "s1": scales.s1, "norm_bound0": scales.norm_bound0,
                "norm_bound1": scales.norm_bound1},
        checks=checks,
        seed=cfg.seed if isinstance(cfg.seed, int) else None,
        p_fail=cfg.p_fail,
        timings=timings,
    )
