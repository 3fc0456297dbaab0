"""
Angular Kernel
K(rho) through its closed form in G, the G-free theta quadrature used as
an oracle, and the ball integrals built on the radial reduction
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Tuple

import numpy as np

from models import FracParams, HyperParams, QuadratureSpec
from utils import specfun
from utils.errors import DomainError
from utils.quadrature import integrate_adaptive, integrate_near_singular

logger = logging.getLogger(__name__)

RHO_ONE_GUARD = 1e-12


def psi_p(t: float, p: float) -> float:
    """The odd power map |t|^(p-2) t, written so that t = 0 is safe for p < 2."""
    if t == 0.0:
        return 0.0
    return math.copysign(abs(t) ** (p - 1.0), t)


def alpha_N(N: int) -> float:
    """alpha_N = pi^((N-3)/2) / Gamma((N-1)/2); 2 pi alpha_N is the area of S^(N-2)."""
    if isinstance(N, bool) or not float(N).is_integer() or N < 2:
        raise DomainError(f"alpha_N needs an integer N >= 2, got: {N}", N=N)
    return math.pi ** ((N - 3) / 2.0) * specfun.rgamma((N - 1) / 2.0)


def sphere_area(n: int) -> float:
    """|S^(n-1)| = 2 pi^(n/2) / Gamma(n/2)."""
    if n < 1:
        raise DomainError(f"sphere_area needs n >= 1, got: {n}", n=n)
    return 2.0 * math.pi ** (n / 2.0) * specfun.rgamma(n / 2.0)


def K_theta(rho: float, params: FracParams, spec: Optional[QuadratureSpec] = None) -> float:
    """
    K(rho) = int_0^pi sin^(N-2)(theta) / (1 - 2 rho cos(theta) + rho^2)^((N+ps)/2) dtheta
    by adaptive quadrature; never touches 2F1.

    The denominator is written as (1 - rho)^2 + 4 rho sin^2(theta/2) and the
    initial mesh is geometric from theta ~ |1 - rho| / sqrt(rho), the width
    of the peak at theta = 0.

    Raises:
        DomainError: rho < 0 or rho == 1
    """
    if math.isnan(rho) or rho < 0:
        raise DomainError(f"K_theta needs rho >= 0, got: {rho}", rho=rho)
    if rho == 1.0:
        raise DomainError("K_theta is undefined at rho = 1 (non-integrable at theta = 0)", rho=rho)

    spec = spec or QuadratureSpec()
    power = (params.N + params.sp) / 2.0
    sin_power = params.N - 2
    gap2 = (1.0 - rho) ** 2

    def integrand(theta):
        half_sin = np.sin(0.5 * theta)
        return np.sin(theta) ** sin_power / (gap2 + 4.0 * rho * half_sin * half_sin) ** power

    points = []
    if rho > 0:
        width = abs(1.0 - rho) / math.sqrt(rho)
        while width < math.pi:
            points.append(width)
            width *= 2.0

    value, _ = integrate_adaptive(integrand, 0.0, math.pi, spec, points=points, vectorized=True)
    return value


@dataclass(frozen=True)
class KernelEvaluator:
    """
    Cached kernel machinery for one parameter set.

    Holds alpha_N, B((N-1)/2, 1/2), the 2F1 parameters of G and lim H, all at
    the perturbed ps when `perturb_ps` is set.
    Immutable and shareable across threads.
    """

    params: FracParams
    spec: QuadratureSpec = field(default_factory=QuadratureSpec)
    perturb_ps: bool = False
    alpha: float = field(init=False)
    beta_const: float = field(init=False)
    hyper: HyperParams = field(init=False)
    kernel_sp: float = field(init=False)
    h_limit: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, 'alpha', alpha_N(self.params.N))
        object.__setattr__(self, 'beta_const', specfun.beta_fn((self.params.N - 1) / 2.0, 0.5))
        object.__setattr__(self, 'hyper', specfun.kernel_hyper_params(self.params, self.perturb_ps))
        object.__setattr__(self, 'kernel_sp', specfun.kernel_ps(self.params, self.perturb_ps))
        object.__setattr__(self, 'h_limit', specfun.H_limit(self.params, self.perturb_ps))
        if self.kernel_sp != self.params.sp:
            logger.warning(f"kernel evaluated at perturbed ps={self.kernel_sp!r} (ps={self.params.sp!r}) "
                           f"to avoid the logarithmic connection branch")

    @property
    def radial_factor(self) -> float:
        """4 pi alpha_N, the prefactor of the radial reduction."""
        return 4.0 * math.pi * self.alpha

    @property
    def kernel_power(self) -> float:
        return self.params.N + self.params.sp

    def G(self, t: float) -> float:
        if math.isnan(t) or not (0.0 <= t < 1.0):
            raise DomainError(f"G needs 0 <= t < 1, got: {t}", t=t)
        return self.beta_const * specfun.hyp2f1(self.hyper, t)

    def H_from_gap(self, d: float) -> float:
        """H(1 - d), without forming rho."""
        return specfun.H_from_gap(d, self.params, self.perturb_ps, hp=self.hyper,
                                  beta_const=self.beta_const, limit=self.h_limit)

    def H(self, rho: float) -> float:
        if math.isnan(rho) or not (0.0 <= rho <= 1.0):
            raise DomainError(f"H needs 0 <= rho <= 1, got: {rho}", rho=rho)
        return self.H_from_gap(1.0 - rho)

    def G_sq_from_gap(self, d: float) -> float:
        """G((1 - d)^2) for 0 < d <= 1, accurate as d -> 0."""
        if d > 0.25:
            rho = 1.0 - d
            return self.G(rho * rho)
        return self.H_from_gap(d) / d ** (1.0 + self.kernel_sp)

    def K(self, rho: float) -> float:
        if math.isnan(rho) or rho < 0:
            raise DomainError(f"K needs rho >= 0, got: {rho}", rho=rho)
        if abs(rho - 1.0) < RHO_ONE_GUARD:
            raise DomainError(f"K is undefined at rho = 1 (got {rho}); use H near rho = 1", rho=rho)
        if rho < 1.0:
            return self.G(rho * rho)
        return self.G(1.0 / (rho * rho)) * rho ** (-self.kernel_power)

    def __repr__(self):
        return f'<KernelEvaluator N={self.params.N} ps={self.params.sp}>'


def K_eval(rho: float, ke: KernelEvaluator) -> float:
    """Closed-form K: G(rho^2) below 1, G(rho^-2) / rho^(N+ps) above."""
    return ke.K(rho)


def ball_integral(ke: KernelEvaluator, g: Callable[[float], float], x_norm: float,
                  a: float, b: float, spec: Optional[QuadratureSpec] = None) -> Tuple[float, float]:
    """
    int_{a <= |y| < b} g(|y|) / |x - y|^(N+sp) dy for a shell that does not
    contain |x| in its interior.

    Inner shells (b <= |x|) use u = t/|x|; outer shells (a >= |x|, b may be
    inf) use sigma = |x|/t, which turns the kernel into sigma^(ps-1) G(sigma^2).

    Returns:
        (value, err_est)
    """
    spec = spec or ke.spec
    if not (0.0 <= a < b) or x_norm <= 0:
        raise DomainError(f"ball_integral needs 0 <= a < b and |x| > 0, got a={a}, b={b}, |x|={x_norm}")
    N = ke.params.N
    ps = ke.params.sp
    prefactor = 2.0 * math.pi * ke.alpha * x_norm ** (-ps)

    if b <= x_norm:
        u_low, u_high = a / x_norm, b / x_norm
        if u_high >= 1.0:
            raise DomainError("ball_integral shell touches |x|", a=a, b=b, x_norm=x_norm)

        def inner(gap: float) -> float:
            u = 1.0 - gap
            return g(x_norm * u) * u ** (N - 1) * ke.G_sq_from_gap(gap)

        value, err = integrate_near_singular(inner, u_low, u_high, 1.0, spec, from_endpoint=True)
        return prefactor * value, prefactor * err

    if a >= x_norm:
        sigma_high = x_norm / a
        sigma_low = 0.0 if math.isinf(b) else x_norm / b
        if sigma_high >= 1.0:
            raise DomainError("ball_integral shell touches |x|", a=a, b=b, x_norm=x_norm)

        def outer(gap: float) -> float:
            sigma = 1.0 - gap
            return g(x_norm / sigma) * sigma ** (ps - 1.0) * ke.G_sq_from_gap(gap)

        value, err = integrate_near_singular(outer, sigma_low, sigma_high, 1.0, spec, from_endpoint=True)
        return prefactor * value, prefactor * err

    raise DomainError("ball_integral shell must not straddle |x|", a=a, b=b, x_norm=x_norm)


@lru_cache(maxsize=64)
def get_evaluator(params: FracParams, spec: Optional[QuadratureSpec] = None,
                  perturb_ps: bool = False) -> KernelEvaluator:
    """Shared KernelEvaluator per (params, spec, perturb_ps)."""
    return KernelEvaluator(params, spec or QuadratureSpec(), perturb_ps)
