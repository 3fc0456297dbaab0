"""
Fundamental Solutions
The multiplier constant C(beta) of |x|^beta, its sign chart and zeros, and
the h/g splitting of the truncated operator applied to |x|^beta
"""

import logging
import math
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from models import CBetaResult, FracParams, QuadratureSpec, Sign
from utils.errors import ConvergenceError, DomainError, FracPlapError
from utils.kernel import get_evaluator, psi_p
from utils.parallel import ordered_map
from utils.quadrature import (integrate_adaptive, integrate_endpoint_singular,
                              integrate_near_singular)

logger = logging.getLogger(__name__)

BETA_ZERO_GUARD = 1e-10
SPLIT = 0.5
ZERO_GRID = 20
ZERO_GRID_MAX = 160
ROOT_XTOL = 1e-10

FAST = 'fast'
SLOW = 'slow'
BORDERLINE = 'borderline'


def _require_power_case(params: FracParams):
    if params.is_log_case:
        raise DomainError(
            f"ps = N = {params.N}: the fundamental solution is log|x|, "
            f"use the log case (verify log) instead of C(beta)",
            N=params.N, sp=params.sp
        )


def rhs_exponent(params: FracParams, beta: float) -> float:
    """Exponent of the image: (-Δ_p)^s |x|^beta = C(beta) |x|^(beta(p-1) - sp)."""
    return beta * (params.p - 1.0) - params.sp


def c_beta_sign(params: FracParams, beta: float) -> Sign:
    """
    Analytic sign chart of C(beta): zero at 0 and beta*, positive strictly
    between them, negative elsewhere in the admissible interval.
    """
    _require_power_case(params)
    params.require_admissible(beta)
    star = params.beta_star
    if beta == 0.0 or abs(beta - star) <= 1e-12 * max(1.0, abs(star)):
        return Sign.ZERO
    if min(star, 0.0) < beta < max(star, 0.0):
        return Sign.POSITIVE
    return Sign.NEGATIVE


def _power_factors(params: FracParams, beta: float, ell: float) -> Tuple[float, float]:
    """
    (1 - rho^beta, rho^(N-1) - rho^(ps - beta(p-1) - 1)) at rho = e^ell.

    The bracket is -rho^(N-1) expm1((p-1)(beta* - beta) ell), exactly zero
    at beta = beta*.
    """
    a = -math.expm1(beta * ell)
    bracket = -math.exp((params.N - 1) * ell) * math.expm1(
        (params.p - 1.0) * (params.beta_star - beta) * ell)
    return a, bracket


def _left_exponent(params: FracParams, beta: float) -> float:
    p1 = params.p - 1.0
    return min(0.0, beta * p1) + min(params.N - 1.0, params.sp - beta * p1 - 1.0)


def _integrate_left_panel(integrand, b: float, lam0: float, spec: QuadratureSpec) -> Tuple[float, float]:
    if lam0 < 0:
        return integrate_endpoint_singular(lambda rho: integrand(rho) / rho ** lam0,
                                           0.0, b, lam0, spec, endpoint='left')
    return integrate_adaptive(integrand, 0.0, b, spec)


@lru_cache(maxsize=4096)
def _c_beta_integral(params: FracParams, beta: float, spec: QuadratureSpec,
                     perturb_ps: bool = False) -> Tuple[float, float]:
    ke = get_evaluator(params, spec, perturb_ps)
    p = params.p

    def left(rho: float) -> float:
        a, bracket = _power_factors(params, beta, math.log(rho))
        return psi_p(a, p) * bracket * ke.G(rho * rho)

    def near_one(d: float) -> float:
        # psi(1 - rho^beta) * bracket * H(rho) / (1 - rho)^p
        a, bracket = _power_factors(params, beta, math.log1p(-d))
        return psi_p(a, p) * bracket * ke.H_from_gap(d) / d ** p

    value_l, err_l = _integrate_left_panel(left, SPLIT, _left_exponent(params, beta), spec)
    lam = p * (1.0 - params.s) - 1.0
    value_r, err_r = integrate_endpoint_singular(near_one, SPLIT, 1.0, lam, spec,
                                                 endpoint='right', from_endpoint=True)
    factor = ke.radial_factor
    return factor * (value_l + value_r), factor * (err_l + err_r)


def c_beta(params: FracParams, beta: float, spec: Optional[QuadratureSpec] = None,
           perturb_ps: bool = False) -> CBetaResult:
    """
    C(beta) = 4 pi alpha_N int_0^1 psi_p(1 - rho^beta)
              [rho^(N-1) - rho^(ps - beta(p-1) - 1)] G(rho^2) drho

    Split at rho = 1/2: the left panel is graded at 0 when the integrand is
    singular there, the right panel carries H(rho) (1 - rho)^(p(1-s)-1).

    Raises:
        DomainError: beta outside the admissible interval, or ps = N
    """
    spec = spec or QuadratureSpec()
    predicted = c_beta_sign(params, beta)
    exponent = rhs_exponent(params, beta)
    # integrand vanishes identically at 0 and at beta*
    if abs(beta) < BETA_ZERO_GUARD or predicted is Sign.ZERO:
        return CBetaResult(beta, 0.0, 0.0, predicted, exponent)
    value, err = _c_beta_integral(params, float(beta), spec, perturb_ps)
    logger.debug(f"C({beta}) = {value!r} ± {err:.2e} for {params}")
    return CBetaResult(beta, value, err, predicted, exponent)


def c_beta_sweep(params: FracParams, grid: Sequence[float], spec: Optional[QuadratureSpec] = None,
                 threads: Optional[int] = None, perturb_ps: bool = False) -> List[CBetaResult]:
    """
    C(beta) over a grid, input order kept. Failures are recorded in the
    entry's error field and the sweep goes on.
    """
    spec = spec or QuadratureSpec()

    def one(beta: float) -> CBetaResult:
        try:
            return c_beta(params, beta, spec, perturb_ps)
        except FracPlapError as e:
            logger.warning(f"c_beta failed at beta={beta}: {e.message}")
            try:
                predicted = c_beta_sign(params, beta)
            except FracPlapError:
                predicted = None
            return CBetaResult(beta, math.nan, math.nan, predicted,
                               rhs_exponent(params, beta), error=f"{e.KIND}: {e.message}")

    return ordered_map(one, list(grid), threads, label='c_beta sweep')


def _sign_table(params: FracParams, n: int, spec: QuadratureSpec, perturb_ps: bool) -> List[Tuple[float, float]]:
    low, high = params.beta_interval
    table = []
    for k in range(n):
        beta = low + (high - low) * (k + 0.5) / n
        try:
            table.append((beta, c_beta(params, beta, spec, perturb_ps).value))
        except FracPlapError as e:
            logger.debug(f"zero search skips beta={beta}: {e.message}")
    return table


def c_beta_zeros(params: FracParams, spec: Optional[QuadratureSpec] = None,
                 perturb_ps: bool = False) -> Tuple[float, float]:
    """
    Locate the two zeros of C(beta) by bracketing sign changes on a grid
    over the admissible interval and refining each bracket with brentq.

    Returns:
        (root_low, root_high)

    Raises:
        ConvergenceError: the grid does not show exactly two sign changes
            (carries the sampled table)
    """
    spec = spec or QuadratureSpec()
    _require_power_case(params)

    def f(beta: float) -> float:
        return c_beta(params, beta, spec, perturb_ps).value

    n = ZERO_GRID
    while True:
        table = _sign_table(params, n, spec, perturb_ps)
        brackets = []
        for (b0, v0), (b1, v1) in zip(table, table[1:]):
            if v0 == 0.0:
                brackets.append((b0, b0))
            elif v0 * v1 < 0:
                brackets.append((b0, b1))
        if table and table[-1][1] == 0.0:
            brackets.append((table[-1][0], table[-1][0]))
        if len(brackets) >= 2 or n >= ZERO_GRID_MAX:
            break
        n *= 2
        logger.info(f"c_beta_zeros: {len(brackets)} sign change(s), refining grid to {n} points")

    if len(brackets) != 2:
        raise ConvergenceError(
            f"expected two sign changes of C(beta) on the admissible interval, found {len(brackets)}",
            branch='c_beta_zeros', table=table
        )

    roots = []
    for lo, hi in brackets:
        roots.append(lo if lo == hi else brentq(f, lo, hi, xtol=ROOT_XTOL))
    roots.sort()
    logger.info(f"C(beta) zeros for {params}: {roots[0]!r}, {roots[1]!r} (beta* = {params.beta_star!r})")
    return roots[0], roots[1]


def h_beta_eps(params: FracParams, beta: float, r: float, eps: float,
               spec: Optional[QuadratureSpec] = None) -> Tuple[float, float]:
    """
    4 pi alpha_N int_0^(1-eps/r) psi_p(1 - rho^beta)
        [rho^(N-1) - rho^(ps - beta(p-1) - 1)] G(rho^2) drho,
    the part of J_eps |x|^beta that tends to C(beta).

    Returns:
        (value, err_est)
    """
    spec = spec or QuadratureSpec()
    _require_power_case(params)
    params.require_admissible(beta)
    if not (0.0 < eps < r):
        raise DomainError(f"h_beta_eps needs 0 < eps < r, got eps={eps}, r={r}")
    ke = get_evaluator(params, spec)
    p = params.p
    gap = eps / r
    upper = 1.0 - gap
    split = min(SPLIT, 0.5 * upper)

    def left(rho: float) -> float:
        a, bracket = _power_factors(params, beta, math.log(rho))
        return psi_p(a, p) * bracket * ke.G(rho * rho)

    def near_one(d: float) -> float:
        a, bracket = _power_factors(params, beta, math.log1p(-d))
        return psi_p(a, p) * bracket * ke.G_sq_from_gap(d)

    value_l, err_l = _integrate_left_panel(left, split, _left_exponent(params, beta), spec)
    value_r, err_r = integrate_near_singular(near_one, split, upper, 1.0, spec, from_endpoint=True)
    factor = ke.radial_factor
    return factor * (value_l + value_r), factor * (err_l + err_r)


def g_beta_eps(params: FracParams, beta: float, r: float, eps: float,
               spec: Optional[QuadratureSpec] = None) -> Tuple[float, float]:
    """
    4 pi alpha_N r^(beta(p-1)-sp) int_(1-eps/r)^(r/(r+eps))
        psi_p(1 - rho^beta) rho^(ps - beta(p-1) - 1) G(rho^2) drho,
    the remainder in J_eps |x|^beta (r) = h r^(beta(p-1)-sp) - g.

    Returns:
        (value, err_est)
    """
    spec = spec or QuadratureSpec()
    _require_power_case(params)
    params.require_admissible(beta)
    if not (0.0 < eps < r):
        raise DomainError(f"g_beta_eps needs 0 < eps < r, got eps={eps}, r={r}")
    ke = get_evaluator(params, spec)
    p = params.p
    weight = params.sp - beta * (p - 1.0) - 1.0

    def integrand(d: float) -> float:
        ell = math.log1p(-d)
        return psi_p(-math.expm1(beta * ell), p) * math.exp(weight * ell) * ke.G_sq_from_gap(d)

    # gap range of [1 - eps/r, r/(r+eps)]
    value, err = integrate_adaptive(integrand, eps / (r + eps), eps / r, spec)
    factor = ke.radial_factor * r ** rhs_exponent(params, beta)
    return factor * value, factor * err


def g_log_eps(params: FracParams, r: float, eps: float,
              spec: Optional[QuadratureSpec] = None) -> Tuple[float, float]:
    """
    4 pi alpha_N r^(-N) int_(1-eps/r)^(r/(r+eps)) psi_p(log rho) rho^(N-1) G(rho^2) drho,
    which equals J_eps log|x| at radius r when ps = N.

    Raises:
        DomainError: ps != N
    """
    spec = spec or QuadratureSpec()
    if not params.is_log_case:
        raise DomainError(f"g_log_eps needs ps = N, got ps={params.sp}, N={params.N}")
    if not (0.0 < eps < r):
        raise DomainError(f"g_log_eps needs 0 < eps < r, got eps={eps}, r={r}")
    ke = get_evaluator(params, spec)
    p, N = params.p, params.N

    def integrand(d: float) -> float:
        ell = math.log1p(-d)
        return psi_p(ell, p) * math.exp((N - 1) * ell) * ke.G_sq_from_gap(d)

    value, err = integrate_adaptive(integrand, eps / (r + eps), eps / r, spec)
    factor = ke.radial_factor * r ** (-N)
    return factor * value, factor * err


def remainder_regime(params: FracParams) -> str:
    """
    Decay regime of the truncation remainder: 'fast' for p > 1/(1-s),
    'slow' for p < 1/(1-s), 'borderline' at equality (eps log eps rates).
    """
    threshold = 1.0 / (1.0 - params.s)
    if abs(params.p - threshold) <= 1e-12 * threshold:
        return BORDERLINE
    return FAST if params.p > threshold else SLOW


def remainder_decay_order(params: FracParams, beta: float, r: float = 1.0,
                          spec: Optional[QuadratureSpec] = None) -> Dict:
    """
    Observed order of g_{beta,eps}(r) -> 0: least-squares slope of log|g|
    against log eps over the PV schedule (eps = e r).

    Returns:
        dict with order, predicted order p(1-s), regime and the table
    """
    spec = spec or QuadratureSpec()
    eps_values = [e * r for e in spec.pv_epsilons]
    table = [(eps, g_beta_eps(params, beta, r, eps, spec)[0]) for eps in eps_values]
    usable = [(eps, g) for eps, g in table if g != 0.0]
    if len(usable) < 2:
        raise ConvergenceError("remainder vanishes on the schedule; no order to fit",
                               branch='remainder_decay_order', table=table)
    x = np.log([eps for eps, _ in usable])
    y = np.log([abs(g) for _, g in usable])
    slope = float(np.polyfit(x, y, 1)[0])
    return {
        'order': slope,
        'predicted': params.p * (1.0 - params.s),
        'regime': remainder_regime(params),
        'table': table,
    }
