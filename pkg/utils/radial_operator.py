"""
Radial Operator
The fractional p-Laplacian of a radial profile through the one-dimensional
reduction: truncated J_eps, the folded principal value, and the identity checks
"""

import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple

from models import (ERROR, FAIL, PASS, PRINCIPAL_VALUE, TRUNCATED, FracParams,
                    OperatorValue, QuadratureSpec, Report, aggregate_verdicts)
from utils.errors import DomainError, FracPlapError, NumericalError, PreconditionError
from utils.fundamental import c_beta, rhs_exponent
from utils.kernel import KernelEvaluator, get_evaluator, psi_p
from utils.parallel import ordered_map
from utils.profiles import (ProfilePiece, RadialProfile, check_profile, log_profile,
                            power_profile, profile_eval)
from utils.quadrature import (integrate_adaptive, integrate_endpoint_singular,
                              integrate_near_singular, pv_limit)

logger = logging.getLogger(__name__)

GUARD_BAND = 1e-6
FOLD_RATIO = 0.5
NEAR_ONE_SPLIT = 0.5
ZERO_FLOOR_FACTOR = 1e-3
LOG_TOLERANCE = 1e-5


class _Differences:
    """f(r) - f(r rho) and f(r) - f(r / rho) for a fixed evaluation radius"""

    def __init__(self, f: RadialProfile, r: float):
        self.f = f
        self.r = r
        self.base: ProfilePiece = f.piece_at(r)
        self.f_r = profile_eval(f, r)

    def increment(self, ell: float) -> float:
        """f(r) - f(r e^ell)"""
        y = self.r * math.exp(ell)
        if self.f.piece_at(y) is self.base:
            return self.base.increment(self.r, ell)
        return self.f_r - profile_eval(self.f, y)


def _kink_cuts(f: RadialProfile, r: float) -> List[float]:
    """Points of (0, 1) where r rho or r / rho crosses a breakpoint."""
    cuts = set()
    for b in f.breakpoints:
        for c in (b / r, r / b):
            if 0.0 < c < 1.0:
                cuts.add(c)
    return sorted(cuts)


def _panel_edges(cuts: Sequence[float], upper: float) -> List[float]:
    """[0, cuts below upper, upper], always with a cut separating 0 from upper."""
    inner = [c for c in cuts if c < upper]
    split = NEAR_ONE_SPLIT if NEAR_ONE_SPLIT < upper else 0.5 * upper
    if not inner or inner[-1] < split:
        inner.append(split)
    inner = sorted(set(inner))
    return [0.0] + inner + [upper]


def _exponents(f: RadialProfile, params: FracParams) -> Tuple[float, float]:
    """Endpoint exponents at rho = 0 of the inner and outer integrands."""
    p1 = params.p - 1.0
    inner = params.N - 1.0 + min(f.origin_exponent, 0.0) * p1
    outer = params.sp - 1.0 - max(f.growth_exponent, 0.0) * p1
    return inner, outer


def _first_panel(func: Callable[[float], float], b: float, lam0: float,
                 spec: QuadratureSpec) -> Tuple[float, float]:
    if lam0 < 0:
        return integrate_endpoint_singular(lambda rho: func(rho) / rho ** lam0,
                                           0.0, b, lam0, spec, endpoint='left')
    return integrate_adaptive(func, 0.0, b, spec)


def _integrate_panels(func: Callable[[float], float], edges: Sequence[float], lam0: float,
                      spec: QuadratureSpec) -> Tuple[float, float]:
    """Every panel but the last: graded first panel, adaptive middle panels."""
    value, err = _first_panel(func, edges[1], lam0, spec)
    for a, b in zip(edges[1:-2], edges[2:-1]):
        v, e = integrate_adaptive(func, a, b, spec)
        value += v
        err += e
    return value, err


def _prepare(f: RadialProfile, r: float, ke: KernelEvaluator):
    if not r > 0:
        raise DomainError(f"the operator needs r > 0, got: {r}", r=r)
    check_profile(f, ke.params)
    return _Differences(f, r)


def frac_plap_radial_Jeps(f: RadialProfile, r: float, eps: float, ke: KernelEvaluator,
                          spec: Optional[QuadratureSpec] = None) -> OperatorValue:
    """
    Truncated operator J_eps f(r): the defining integral without the annulus
    ||y| - r| < eps, with rho > 1 folded onto (0, 1):

        4 pi alpha_N r^(-sp) [ int_0^(1-eps/r) psi_p(f(r) - f(r rho)) rho^(N-1) G(rho^2) drho
                              + int_0^(r/(r+eps)) psi_p(f(r) - f(r/rho)) rho^(ps-1) G(rho^2) drho ]

    Raises:
        DomainError: eps <= 0 or eps >= r
    """
    spec = spec or ke.spec
    if not (0.0 < eps < r):
        raise DomainError(f"J_eps needs 0 < eps < r, got eps={eps}, r={r}", eps=eps, r=r)
    diff = _prepare(f, r, ke)
    params = ke.params
    p, N, ps = params.p, params.N, params.sp
    lam_in, lam_out = _exponents(f, params)
    cuts = _kink_cuts(f, r)

    def inner(rho: float) -> float:
        return psi_p(diff.increment(math.log(rho)), p) * rho ** (N - 1) * ke.G(rho * rho)

    def outer(rho: float) -> float:
        return psi_p(diff.increment(-math.log(rho)), p) * rho ** (ps - 1.0) * ke.G(rho * rho)

    def inner_gap(d: float) -> float:
        ell = math.log1p(-d)
        return psi_p(diff.increment(ell), p) * math.exp((N - 1) * ell) * ke.G_sq_from_gap(d)

    def outer_gap(d: float) -> float:
        ell = math.log1p(-d)
        return psi_p(diff.increment(-ell), p) * math.exp((ps - 1.0) * ell) * ke.G_sq_from_gap(d)

    total, total_err = 0.0, 0.0
    for func, func_gap, lam0, upper in ((inner, inner_gap, lam_in, 1.0 - eps / r),
                                        (outer, outer_gap, lam_out, r / (r + eps))):
        edges = _panel_edges(cuts, upper)
        value, err = _integrate_panels(func, edges, lam0, spec)
        v, e = integrate_near_singular(func_gap, edges[-2], upper, 1.0, spec, from_endpoint=True)
        total += value + v
        total_err += err + e

    factor = ke.radial_factor * r ** (-ps)
    return OperatorValue(factor * total, factor * total_err, r, mode=TRUNCATED, eps=eps)


def _near_one_combined(diff: _Differences, params: FracParams, d: float) -> float:
    """
    psi_p(A) rho^(N-1) + psi_p(B) rho^(ps-1) at rho = 1 - d, where
    A = f(r) - f(r rho), B = f(r) - f(r/rho). With S = A + B small against A
    this is psi_p(A) rho^(ps-1) [expm1((N-ps) ell) - expm1((p-1) log1p(-S/A))].
    """
    p, N, ps = params.p, params.N, params.sp
    ell = math.log1p(-d)
    a = diff.base.increment(diff.r, ell)
    s = diff.base.second_difference(diff.r, ell)
    if a != 0.0 and abs(s / a) < FOLD_RATIO:
        bracket = math.expm1((N - ps) * ell) - math.expm1((p - 1.0) * math.log1p(-s / a))
        return psi_p(a, p) * math.exp((ps - 1.0) * ell) * bracket
    b = diff.base.increment(diff.r, -ell)
    return psi_p(a, p) * math.exp((N - 1) * ell) + psi_p(b, p) * math.exp((ps - 1.0) * ell)


def _check_guard_band(f: RadialProfile, r: float):
    for b in f.breakpoints:
        if abs(r - b) < GUARD_BAND * r:
            raise PreconditionError(
                f"r={r} lies within {GUARD_BAND:g}*r of the breakpoint {b} of '{f.name}'",
                hint="use Jeps mode (frac_plap_radial_Jeps) at this radius",
                r=r, breakpoint=b
            )


def frac_plap_radial_pv(f: RadialProfile, r: float, ke: KernelEvaluator,
                        spec: Optional[QuadratureSpec] = None) -> OperatorValue:
    """
    Principal value of the operator at radius r by the folded form.

    Panels of (0, 1) are split at the kinks b/r and r/b of the profile. The
    inner and outer integrands are integrated separately on every panel but
    the last; on the last one they are combined, which cancels the leading
    (1 - rho)^(p-1) terms and leaves the endpoint exponent p(1-s) - 1.

    With spec.dual_path the value is cross-checked by pv_limit over J_eps.

    Raises:
        PreconditionError: r within the breakpoint guard band
    """
    spec = spec or ke.spec
    diff = _prepare(f, r, ke)
    _check_guard_band(f, r)
    params = ke.params
    p, N, ps = params.p, params.N, params.sp
    lam_in, lam_out = _exponents(f, params)
    edges = _panel_edges(_kink_cuts(f, r), 1.0)

    def inner(rho: float) -> float:
        return psi_p(diff.increment(math.log(rho)), p) * rho ** (N - 1) * ke.G(rho * rho)

    def outer(rho: float) -> float:
        return psi_p(diff.increment(-math.log(rho)), p) * rho ** (ps - 1.0) * ke.G(rho * rho)

    def near_one(d: float) -> float:
        return _near_one_combined(diff, params, d) * ke.H_from_gap(d) / d ** p

    value_in, err_in = _integrate_panels(inner, edges, lam_in, spec)
    value_out, err_out = _integrate_panels(outer, edges, lam_out, spec)
    lam = p * (1.0 - params.s) - 1.0
    value_near, err_near = integrate_endpoint_singular(near_one, edges[-2], 1.0, lam, spec,
                                                       endpoint='right', from_endpoint=True)

    factor = ke.radial_factor * r ** (-ps)
    result = OperatorValue(factor * (value_in + value_out + value_near),
                           factor * (err_in + err_out + err_near), r, mode=PRINCIPAL_VALUE)

    if spec.dual_path:
        try:
            dual, dual_err = pv_limit(lambda e: frac_plap_radial_Jeps(f, r, e * r, ke, spec).value, spec)
        except NumericalError as e:
            logger.warning(f"dual path failed at r={r}: {e.message}")
            return result
        result.dual_value = dual
        result.dual_err_est = dual_err
        if not result.dual_agrees:
            logger.warning(f"dual path disagrees at r={r}: folded {result.value!r} ± {result.err_est:.2e}, "
                           f"extrapolated {dual!r} ± {dual_err:.2e}")
    return result


def _admissible_neighbors(params: FracParams, beta: float) -> List[float]:
    low, high = params.beta_interval
    return [b for b in (beta - 0.1, beta + 0.1) if low < b < high]


def verify_fundamental_identity(params: FracParams, beta: float, radii: Sequence[float],
                                spec: Optional[QuadratureSpec] = None,
                                threads: Optional[int] = None,
                                perturb_ps: bool = False) -> Report:
    """
    Check (-Δ_p)^s |x|^beta = C(beta) |x|^(beta(p-1) - sp) at each radius.

    The residual is relative to the expected value unless that value is
    below the local floor r^e |C(beta +- 0.1)| 1e-3, in which case the
    residual is compared absolutely against the error budgets and the
    report is flagged.

    Raises:
        DomainError: ps = N or beta not admissible
    """
    spec = spec or QuadratureSpec()
    constant = c_beta(params, beta, spec, perturb_ps)
    ke = get_evaluator(params, spec, perturb_ps)
    profile = power_profile(beta)
    exponent = rhs_exponent(params, beta)
    neighbor_scale = max([abs(c_beta(params, b, spec, perturb_ps).value)
                          for b in _admissible_neighbors(params, beta)],
                         default=abs(constant.value))

    report = Report(
        kind='fundamental',
        params={**params.to_dict(), 'beta': beta},
        diagnostics={'c_beta': constant.to_dict(), 'neighbor_scale': neighbor_scale,
                     'quadrature': spec.to_dict(), 'perturb_ps': perturb_ps},
    )

    def one(r: float) -> dict:
        expected = constant.value * r ** exponent
        floor = r ** exponent * neighbor_scale * ZERO_FLOOR_FACTOR
        row = {'r': r, 'expected': expected, 'floor': floor}
        try:
            pv = frac_plap_radial_pv(profile, r, ke, spec)
        except FracPlapError as e:
            row.update(value=None, err_est=None, residual=None, mode=None,
                       verdict=ERROR, error=f"{e.KIND}: {e.message}")
            return row
        residual = abs(pv.value - expected)
        if abs(expected) > floor:
            relative = residual / abs(expected)
            row.update(mode='relative', residual=relative, verdict=PASS if relative < 1e-3 else FAIL)
        else:
            budget = max(10.0 * (pv.err_est + constant.err_est * r ** exponent), floor)
            row.update(mode='absolute', residual=residual, budget=budget,
                       verdict=PASS if residual <= budget else FAIL)
        row.update(value=pv.value, err_est=pv.err_est, error=None)
        if pv.dual_value is not None:
            row.update(dual_value=pv.dual_value, dual_err_est=pv.dual_err_est,
                       dual_agrees=pv.dual_agrees)
        return row

    report.rows = ordered_map(one, list(radii), threads, label='fundamental identity')
    report.verdict = aggregate_verdicts([row['verdict'] for row in report.rows])
    if any(row.get('mode') == 'absolute' for row in report.rows):
        report.add_flag('absolute_residual')
    if any(row.get('dual_agrees') is False for row in report.rows):
        report.add_flag('dual_path_disagreement')
    report.log_summary()
    return report


def verify_log_harmonic(params: FracParams, radii: Sequence[float],
                        spec: Optional[QuadratureSpec] = None, tol: float = LOG_TOLERANCE,
                        threads: Optional[int] = None,
                        perturb_ps: bool = False) -> Report:
    """
    Check that log|x| is annihilated when ps = N: |PV(r)| < tol r^(-sp).

    Raises:
        DomainError: ps != N
    """
    spec = spec or QuadratureSpec()
    if not params.is_log_case:
        raise DomainError(
            f"the log case needs ps = N, got ps={params.sp}, N={params.N}",
            N=params.N, sp=params.sp
        )
    ke = get_evaluator(params, spec, perturb_ps)
    profile = log_profile()
    report = Report(kind='log', params={**params.to_dict(), 'tol': tol},
                    diagnostics={'quadrature': spec.to_dict(), 'perturb_ps': perturb_ps})

    def one(r: float) -> dict:
        scale = r ** (-params.sp)
        row = {'r': r, 'scale': scale}
        try:
            pv = frac_plap_radial_pv(profile, r, ke, spec)
        except FracPlapError as e:
            row.update(value=None, err_est=None, verdict=ERROR, error=f"{e.KIND}: {e.message}")
            return row
        row.update(value=pv.value, err_est=pv.err_est, residual=abs(pv.value) / scale,
                   verdict=PASS if abs(pv.value) < tol * scale else FAIL, error=None)
        if pv.dual_value is not None:
            row.update(dual_value=pv.dual_value, dual_err_est=pv.dual_err_est,
                       dual_agrees=pv.dual_agrees)
        return row

    report.rows = ordered_map(one, list(radii), threads, label='log harmonic check')
    report.verdict = aggregate_verdicts([row['verdict'] for row in report.rows])
    if any(row.get('dual_agrees') is False for row in report.rows):
        report.add_flag('dual_path_disagreement')
    report.log_summary()
    return report
