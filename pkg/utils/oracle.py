"""
Direct Oracle
Brute-force principal values at N = 2 in polar coordinates, with the angular
integral done by quadrature (K_theta) instead of the hypergeometric closed form
"""

import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple

from models import FracParams, QuadratureSpec
from utils.errors import DomainError
from utils.kernel import K_theta, psi_p
from utils.profiles import RadialProfile, check_profile, power_profile, profile_eval
from utils.quadrature import (integrate_adaptive, integrate_endpoint_singular,
                              integrate_near_singular, pv_limit)

logger = logging.getLogger(__name__)

ORACLE_DIMENSION = 2


def _edges(cuts: Sequence[float], upper: float) -> List[float]:
    inner = sorted(c for c in set(cuts) if 0.0 < c < upper)
    if not inner or inner[-1] < 0.5 * upper:
        inner.append(0.5 * upper)
    return [0.0] + sorted(set(inner)) + [upper]


def _side(func: Callable[[float], float], gap_func: Callable[[float], float], cuts: Sequence[float],
          upper: float, lam0: float, spec: QuadratureSpec) -> Tuple[float, float]:
    """Integral of func over (0, upper): graded at 0, log-gap map before upper."""
    edges = _edges(cuts, upper)
    if lam0 < 0:
        value, err = integrate_endpoint_singular(lambda x: func(x) / x ** lam0, 0.0, edges[1], lam0,
                                                 spec, endpoint='left')
    else:
        value, err = integrate_adaptive(func, 0.0, edges[1], spec)
    for a, b in zip(edges[1:-2], edges[2:-1]):
        v, e = integrate_adaptive(func, a, b, spec)
        value += v
        err += e
    v, e = integrate_near_singular(gap_func, edges[-2], upper, 1.0, spec, from_endpoint=True)
    return value + v, err + e


def operator_direct_2d(f: RadialProfile, r: float, s: float, p: float,
                       spec: Optional[QuadratureSpec] = None,
                       angular_spec: Optional[QuadratureSpec] = None) -> Tuple[float, float]:
    """
    2 PV int_{R^2} psi_p(f(r) - f(|y|)) / |r e_1 - y|^(2+sp) dy

        = 4 r^(-sp) PV int_0^inf psi_p(f(r) - f(r rho)) rho K(rho) drho,

    K by theta quadrature. The annulus |1 - rho| < e is removed, rho > 1 is
    mapped by sigma = 1/rho, and the limit e -> 0 is extrapolated with
    pv_limit over the pv_epsilons schedule.

    Returns:
        (value, err_est)

    Raises:
        DivergenceError: the extrapolation table does not settle
    """
    spec = spec or QuadratureSpec()
    angular_spec = angular_spec or spec
    params = FracParams(ORACLE_DIMENSION, s, p)
    check_profile(f, params)
    if not r > 0:
        raise DomainError(f"operator_direct_2d needs r > 0, got: {r}")
    sp, p1 = params.sp, p - 1.0
    f_r = profile_eval(f, r)
    cuts_in = [b / r for b in f.breakpoints]
    cuts_out = [r / b for b in f.breakpoints]
    lam_in = 1.0 + min(f.origin_exponent, 0.0) * p1
    lam_out = sp - 1.0 - max(f.growth_exponent, 0.0) * p1

    def inner(rho: float) -> float:
        return psi_p(f_r - profile_eval(f, r * rho), p) * rho * K_theta(rho, params, angular_spec)

    def outer(sigma: float) -> float:
        # rho = 1/sigma, drho = sigma^-2 dsigma
        return psi_p(f_r - profile_eval(f, r / sigma), p) * sigma ** -3 * K_theta(1.0 / sigma, params, angular_spec)

    def J(e: float) -> float:
        v_in, _ = _side(inner, lambda d: inner(1.0 - d), cuts_in, 1.0 - e, lam_in, spec)
        v_out, _ = _side(outer, lambda d: outer(1.0 - d), cuts_out, 1.0 / (1.0 + e), lam_out, spec)
        return 4.0 * r ** (-sp) * (v_in + v_out)

    value, err = pv_limit(J, spec)
    logger.debug(f"direct 2-D PV of '{f.name}' at r={r}: {value!r} ± {err:.2e}")
    return value, err


def c_beta_direct_2d(s: float, p: float, beta: float, spec: Optional[QuadratureSpec] = None,
                     angular_spec: Optional[QuadratureSpec] = None) -> Tuple[float, float]:
    """
    C(beta) at N = 2 straight from the defining integral at x = e_1.

    Raises:
        DomainError: beta not admissible for (2, s, p), or ps = 2
    """
    params = FracParams(ORACLE_DIMENSION, s, p)
    if params.is_log_case:
        raise DomainError(f"c_beta_direct_2d needs ps != 2, got ps={params.sp}")
    params.require_admissible(beta)
    if beta == 0.0:
        return 0.0, 0.0
    return operator_direct_2d(power_profile(beta), 1.0, s, p, spec, angular_spec)
