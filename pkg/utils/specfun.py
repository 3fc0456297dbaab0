"""
Special Functions
Gamma, Beta, digamma and the Gauss hypergeometric function 2F1, plus the
kernel composites G(t) and H(rho) = (1 - rho)^(1+ps) G(rho^2)
"""

import logging
import math
from functools import lru_cache
from typing import Optional, Tuple

from models import FracParams, HyperParams, QuadratureSpec
from utils.errors import ConvergenceError, DomainError, RangeError

logger = logging.getLogger(__name__)

# Lanczos approximation, g = 7, n = 9
LANCZOS_G = 7.0
LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
SQRT_2PI = math.sqrt(2.0 * math.pi)

GAMMA_OVERFLOW = 171.6243769563027
EULER_GAMMA = 0.5772156649015329

SERIES_RTOL = 1e-16
SERIES_MAX_TERMS = 100000
INTEGER_TOL = 1e-9
PERTURB_FACTOR = 1e-9


def _is_pole(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def _lanczos_sum(x: float) -> float:
    # x already shifted by -1
    total = LANCZOS_COEFFS[0]
    for i in range(1, len(LANCZOS_COEFFS)):
        total += LANCZOS_COEFFS[i] / (x + i)
    return total


def gamma_fn(x: float) -> float:
    """
    Euler gamma function.

    Args:
        x: Argument, not a non-positive integer

    Returns:
        Gamma(x)

    Raises:
        DomainError: x is a pole
        RangeError: Gamma(x) overflows double precision
    """
    if math.isnan(x):
        raise DomainError("gamma_fn argument is NaN")
    if _is_pole(x):
        raise DomainError(f"gamma_fn has a pole at x={x}", x=x)
    if x > GAMMA_OVERFLOW:
        raise RangeError(f"gamma_fn overflows for x={x}", threshold=GAMMA_OVERFLOW, x=x)
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))

    x -= 1.0
    t = x + LANCZOS_G + 0.5
    # split the power so t^(x+1/2) e^-t does not overflow near the threshold
    half = t ** ((x + 0.5) / 2.0)
    return SQRT_2PI * half * (half * math.exp(-t)) * _lanczos_sum(x)


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0, without overflow."""
    if not x > 0:
        raise DomainError(f"log_gamma needs x > 0, got: {x}", x=x)
    if x < 0.5:
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma(1.0 - x)
    x -= 1.0
    t = x + LANCZOS_G + 0.5
    return LOG_SQRT_2PI + (x + 0.5) * math.log(t) - t + math.log(_lanczos_sum(x))


def rgamma(x: float) -> float:
    """1/Gamma(x); exactly 0 at the poles."""
    if _is_pole(x):
        return 0.0
    if x > GAMMA_OVERFLOW:
        return math.exp(-log_gamma(x))
    return 1.0 / gamma_fn(x)


def beta_fn(a: float, b: float) -> float:
    """
    Beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b), in log space.

    Raises:
        DomainError: a or b not positive
    """
    if not (a > 0 and b > 0):
        raise DomainError(f"beta_fn needs a > 0 and b > 0, got: ({a}, {b})", a=a, b=b)
    return math.exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b))


def digamma(x: float) -> float:
    """Digamma psi(x) = Gamma'(x)/Gamma(x)."""
    if _is_pole(x):
        raise DomainError(f"digamma has a pole at x={x}", x=x)
    if x < 0.5:
        return digamma(1.0 - x) - math.pi / math.tan(math.pi * x)

    result = 0.0
    while x < 10.0:
        result -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (1.0 / 240 - inv2 / 132))))
    return result + math.log(x) - 0.5 / x - series


def _direct_series(a: float, b: float, c: float, t: float, branch: str = 'series') -> float:
    term = 1.0
    total = 1.0
    for n in range(SERIES_MAX_TERMS):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * t
        total += term
        if term == 0.0 or abs(term) < SERIES_RTOL * abs(total):
            return total
    raise ConvergenceError(
        f"2F1 {branch} did not converge after {SERIES_MAX_TERMS} terms (a={a}, b={b}, c={c}, t={t})",
        branch=branch
    )


def _pochhammer(x: float, k: int) -> float:
    value = 1.0
    for i in range(k):
        value *= x + i
    return value


def _finite_part(a: float, b: float, m: int, w: float) -> float:
    """sum_{k<m} (a)_k (b)_k (m-k-1)!/k! (-w)^k"""
    total = 0.0
    for k in range(m):
        total += _pochhammer(a, k) * _pochhammer(b, k) * math.factorial(m - k - 1) / math.factorial(k) * (-w) ** k
    return total


def _log_series(a: float, b: float, m: int, w: float) -> float:
    """
    sum_k (a)_k (b)_k / (k! (k+m)!) w^k [ln w - psi(k+1) - psi(k+m+1) + psi(a+k) + psi(b+k)]

    The digamma values are advanced by psi(x+1) = psi(x) + 1/x.
    """
    log_w = math.log(w)
    coeff = 1.0 / math.factorial(m)
    psi_k1 = -EULER_GAMMA
    psi_km1 = -EULER_GAMMA + sum(1.0 / j for j in range(1, m + 1))
    psi_a = digamma(a)
    psi_b = digamma(b)

    total = 0.0
    for k in range(SERIES_MAX_TERMS):
        term = coeff * (log_w - psi_k1 - psi_km1 + psi_a + psi_b)
        total += term
        if k > 0 and (term == 0.0 or abs(term) < SERIES_RTOL * abs(total)):
            return total
        coeff *= (a + k) * (b + k) * w / ((k + 1.0) * (k + m + 1.0))
        psi_k1 += 1.0 / (k + 1.0)
        psi_km1 += 1.0 / (k + m + 1.0)
        psi_a += 1.0 / (a + k)
        psi_b += 1.0 / (b + k)
    raise ConvergenceError(
        f"2F1 logarithmic connection did not converge after {SERIES_MAX_TERMS} terms",
        branch='connection-log'
    )


@lru_cache(maxsize=256)
def _connection_coefficients(a: float, b: float, c: float) -> Tuple[str, int, float, float]:
    d = c - a - b
    m = int(round(d))
    gamma_c = gamma_fn(c)
    if abs(d - m) < INTEGER_TOL:
        if m >= 0:
            branch = 'connection-log+'
            first = gamma_c * rgamma(a + m) * rgamma(b + m)
            second = gamma_c * rgamma(a) * rgamma(b)
        else:
            branch = 'connection-log-'
            first = gamma_c * rgamma(a) * rgamma(b)
            second = gamma_c * rgamma(c - a) * rgamma(c - b)
    else:
        branch = 'connection'
        first = gamma_c * gamma_fn(d) * rgamma(c - a) * rgamma(c - b)
        second = gamma_c * gamma_fn(-d) * rgamma(a) * rgamma(b)
    logger.debug(f"2F1 connection branch {branch} for a={a}, b={b}, c={c} (c-a-b={d})")
    return branch, m, first, second


def hyp2f1_connection(hp: HyperParams, w: float) -> Tuple[float, float, float]:
    """
    Split F(a, b; c; 1 - w) = regular(w) + w^exponent * singular(w).

    In the non-integer case exponent = c - a - b and both parts are analytic
    at w = 0. When c - a - b is within 1e-9 of an integer m the logarithmic
    form is used: for m < 0 the exponent is m, `singular` is a polynomial and
    `regular` carries the log terms; for m >= 0 everything sits in `regular`.

    Args:
        hp: Parameters (a, b, c)
        w: 1 - t, in (0, 1/2]

    Returns:
        (regular, singular, exponent)
    """
    if not (0.0 < w <= 0.5):
        raise DomainError(f"hyp2f1_connection needs 0 < w <= 1/2, got: {w}", w=w)
    a, b, c = hp.a, hp.b, hp.c
    branch, m, first, second = _connection_coefficients(a, b, c)

    if branch == 'connection':
        d = c - a - b
        regular = first * _direct_series(a, b, 1.0 - d, w, branch) if first != 0.0 else 0.0
        singular = second * _direct_series(c - a, c - b, 1.0 + d, w, branch) if second != 0.0 else 0.0
        return regular, singular, d

    if branch == 'connection-log+':
        regular = first * _finite_part(a, b, m, w)
        if second != 0.0:
            regular -= second * (-w) ** m * _log_series(a + m, b + m, m, w)
        return regular, 0.0, float(m)

    # m < 0: Euler's transformation onto F(c-a, c-b; c; z), whose c-a-b is -m
    big_m = -m
    singular = first * _finite_part(c - a, c - b, big_m, w)
    regular = 0.0
    if second != 0.0:
        regular = -second * (-1.0) ** big_m * _log_series(b, a, big_m, w)
    return regular, singular, float(m)


def hyp2f1(hp: HyperParams, t: float) -> float:
    """
    Gauss hypergeometric function F(a, b; c; t) for 0 <= t < 1.

    Uses the direct series for t <= 1/2 and the 1 - t connection formula
    above (logarithmic form when c - a - b is an integer).

    Raises:
        DomainError: t outside [0, 1)
        ConvergenceError: a series did not converge (names the branch)
    """
    if math.isnan(t) or not (0.0 <= t < 1.0):
        raise DomainError(f"hyp2f1 needs 0 <= t < 1, got: {t}", t=t)
    if t == 0.0:
        return 1.0
    if _is_pole(hp.a) or _is_pole(hp.b) or t <= 0.5:
        return _direct_series(hp.a, hp.b, hp.c, t)
    w = 1.0 - t
    regular, singular, exponent = hyp2f1_connection(hp, w)
    if singular == 0.0:
        return regular
    return regular + w ** exponent * singular


def kernel_ps(params: FracParams, perturb_ps: bool = False) -> float:
    """
    ps as seen by the kernel; with `perturb_ps` an integral c - a - b is moved
    off the integer by ps <- ps (1 + 1e-9), at least by 2e-9.
    """
    ps = params.sp
    d = -1.0 - ps
    if perturb_ps and abs(d - round(d)) < INTEGER_TOL:
        # the shift must clear the log-branch tolerance, also for ps <= 1
        ps = ps + max(ps * PERTURB_FACTOR, 2.0 * INTEGER_TOL)
        logger.debug(f"perturbing ps to {ps!r} to avoid the logarithmic connection branch")
    return ps


def kernel_hyper_params(params: FracParams, perturb_ps: bool = False) -> HyperParams:
    """HyperParams of G, at the perturbed ps when `perturb_ps` is set."""
    return HyperParams.from_params(params, ps=kernel_ps(params, perturb_ps))


def G_eval(t: float, params: FracParams, perturb_ps: bool = False) -> float:
    """G(t) = B((N-1)/2, 1/2) F((N+ps)/2, (ps+2)/2; N/2; t)."""
    if math.isnan(t) or not (0.0 <= t < 1.0):
        raise DomainError(f"G_eval needs 0 <= t < 1, got: {t}", t=t)
    hp = kernel_hyper_params(params, perturb_ps)
    return beta_fn((params.N - 1) / 2.0, 0.5) * hyp2f1(hp, t)


def H_limit(params: FracParams, perturb_ps: bool = False) -> float:
    """lim_{rho -> 1-} H(rho) = B((N-1)/2, 1/2) Gamma(c) Gamma(1+ps) / (Gamma(a) Gamma(b)) 2^(-1-ps)."""
    ps = kernel_ps(params, perturb_ps)
    hp = HyperParams.from_params(params, ps=ps)
    return (beta_fn((params.N - 1) / 2.0, 0.5) * gamma_fn(hp.c) * gamma_fn(1.0 + ps)
            * rgamma(hp.a) * rgamma(hp.b) * 2.0 ** (-1.0 - ps))


def H_from_gap(d: float, params: FracParams, perturb_ps: bool = False,
               hp: Optional[HyperParams] = None, beta_const: Optional[float] = None,
               limit: Optional[float] = None) -> float:
    """
    H at rho = 1 - d, computed from the gap d in [0, 1].

    Close to rho = 1 the connection formula is used so that
    (1 - rho)^(1+ps) (1 - rho^2)^(-1-ps) collapses to (1 + rho)^(-1-ps).
    """
    if math.isnan(d) or not (0.0 <= d <= 1.0):
        raise DomainError(f"H needs rho in [0, 1], got gap d={d}", d=d)
    if d == 0.0:
        return H_limit(params, perturb_ps) if limit is None else limit

    ps = kernel_ps(params, perturb_ps)
    rho = 1.0 - d
    hp = hp or kernel_hyper_params(params, perturb_ps)
    B = beta_fn((params.N - 1) / 2.0, 0.5) if beta_const is None else beta_const
    t = rho * rho
    if t <= 0.5:
        return d ** (1.0 + ps) * B * hyp2f1(hp, t)

    w = d * (2.0 - d)
    regular, singular, exponent = hyp2f1_connection(hp, w)
    # (1-rho)^(1+ps) w^exponent = (2-d)^exponent d^(1+ps+exponent), exponent = -1-ps
    value = d ** (1.0 + ps) * regular
    if singular != 0.0:
        value += (2.0 - d) ** exponent * d ** (1.0 + ps + exponent) * singular
    return B * value


def H_eval(rho: float, params: FracParams, perturb_ps: bool = False) -> float:
    """
    H(rho) = (1 - rho)^(1+ps) G(rho^2) on [0, 1].

    At rho = 1 the closed-form limit is returned.
    """
    if math.isnan(rho) or not (0.0 <= rho <= 1.0):
        raise DomainError(f"H_eval needs 0 <= rho <= 1, got: {rho}", rho=rho)
    return H_from_gap(1.0 - rho, params, perturb_ps)


def H_prime_limit(params: FracParams, spec: Optional[QuadratureSpec] = None,
                  perturb_ps: bool = False) -> Tuple[float, float]:
    """
    lim_{rho -> 1-} H'(rho), by extrapolating (H(1) - H(1 - h)) / h over the
    PV schedule.

    Returns:
        (value, err_est)
    """
    from utils.quadrature import pv_limit

    spec = spec or QuadratureSpec()
    h1 = H_limit(params, perturb_ps)

    def quotient(h: float) -> float:
        return (h1 - H_from_gap(h, params, perturb_ps)) / h

    return pv_limit(quotient, spec)
