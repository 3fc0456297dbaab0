"""
Barrier Constructions
Sub- and supersolution profiles used with the comparison principle, the
epsilon thresholds read off the ball estimates, and sampled sign checks
"""

import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from scipy.optimize import brentq

from models import (ERROR, FAIL, PASS, BarrierCheckReport, FracParams, OperatorValue,
                    QuadratureSpec)
from utils.errors import (ConvergenceError, DomainError, FracPlapError, NumericalError,
                          PreconditionError)
from utils.fundamental import c_beta
from utils.kernel import KernelEvaluator, alpha_N, ball_integral, get_evaluator, psi_p, sphere_area
from utils.parallel import ordered_map
from utils.profiles import (Constant, Log, Power, RadialProfile, ShiftedPower, SmoothCutoff,
                            smooth_step)
from utils.radial_operator import frac_plap_radial_pv

logger = logging.getLogger(__name__)

LE = '<='
GE = '>='
DIRECTIONS = (LE, GE)

THRESHOLD_MODES = ('ball', 'alpha')
ROOT_RTOL = 1e-10
BRACKET_EDGE = 1e-12
SAMPLE_NUDGE = 1e-3
KAPPA_START = 1.0
KAPPA_CAP = 2.0 ** 20
CUTOFF_SPREAD = 0.05
IDENTITY_TOL = 1e-14


def _require_subcritical(params: FracParams, beta: float):
    """N > ps and beta in (-N/(p-1), beta*)."""
    if not params.N > params.sp:
        raise DomainError(f"this barrier needs N > ps, got N={params.N}, ps={params.sp}")
    low = params.beta_interval[0]
    if not (low < beta < params.beta_star):
        raise DomainError(
            f"beta={beta} must lie in (-N/(p-1), beta*) = ({low:.12g}, {params.beta_star:.12g})",
            beta=beta
        )


def _solve_unit(fn: Callable[[float], float], upper: float, what: str) -> float:
    """Root of an increasing fn on (0, upper), negative at 0+ and positive at upper-."""
    lo, hi = BRACKET_EDGE * upper, upper * (1.0 - BRACKET_EDGE)
    f_lo, f_hi = fn(lo), fn(hi)
    if not (f_lo < 0 < f_hi):
        raise ConvergenceError(
            f"{what}: no sign change on ({lo:.3e}, {hi:.3e})",
            branch=what, table=[(lo, f_lo), (hi, f_hi)]
        )
    return brentq(fn, lo, hi, xtol=1e-300, rtol=ROOT_RTOL)


def make_phi_eps(params: FracParams, beta: float, eps: float) -> RadialProfile:
    """
    phi_eps = eps^beta on [0, eps), |x|^beta beyond.

    Raises:
        DomainError: N <= ps, beta outside (-N/(p-1), beta*), eps outside (0, 1)
    """
    _require_subcritical(params, beta)
    if not (0.0 < eps < 1.0):
        raise DomainError(f"phi_eps needs 0 < eps < 1, got: {eps}")
    return RadialProfile(
        ((0.0, Constant(eps ** beta)), (eps, Power(1.0, beta))),
        name=f'phi_eps(beta={beta:g}, eps={eps:g})'
    )


def phi_ball_constant(params: FracParams, beta: float, mode: str = 'ball') -> float:
    """K of the phi_eps threshold: 2 |S^(N-1)| / (beta(p-1)+N) ('ball') or 2 alpha_N ('alpha')."""
    if mode not in THRESHOLD_MODES:
        raise DomainError(f"threshold mode must be one of {THRESHOLD_MODES}, got: {mode!r}")
    if mode == 'ball':
        return 2.0 * sphere_area(params.N) / (beta * (params.p - 1.0) + params.N)
    return 2.0 * alpha_N(params.N)


def phi_eps_threshold(params: FracParams, beta: float, r: float,
                      spec: Optional[QuadratureSpec] = None, mode: str = 'ball',
                      perturb_ps: bool = False) -> float:
    """
    Largest eps for which the sufficient condition

        C(beta) + K (1 - eps/r)^(-(N+sp)) (eps/r)^(beta(p-1)+N) <= 0

    holds, where K = 2 |S^(N-1)| / (beta(p-1)+N) bounds the ball perturbation
    (mode 'ball') or K = 2 alpha_N (mode 'alpha').
    The left side increases in eps, so eps0 is linear in r.

    Raises:
        DomainError: C(beta) >= 0, or an unknown mode
    """
    spec = spec or QuadratureSpec()
    _require_subcritical(params, beta)
    if mode not in THRESHOLD_MODES:
        raise DomainError(f"threshold mode must be one of {THRESHOLD_MODES}, got: {mode!r}")
    if not r > 0:
        raise DomainError(f"phi_eps_threshold needs r > 0, got: {r}")
    constant = c_beta(params, beta, spec, perturb_ps).value
    if constant >= 0:
        raise DomainError(f"phi_eps_threshold needs C(beta) < 0, got C({beta}) = {constant!r}")
    N, power = params.N, params.N + params.sp
    gamma = beta * (params.p - 1.0) + N
    k = phi_ball_constant(params, beta, mode)

    def condition(u: float) -> float:
        return constant + k * (1.0 - u) ** (-power) * u ** gamma

    u0 = _solve_unit(condition, 1.0, 'phi_eps_threshold')
    logger.debug(f"phi_eps threshold: u0={u0!r}, C={constant!r}, mode={mode}")
    return u0 * r


def psi_eps_radius(beta: float, eps: float, r: float) -> float:
    """r_eps = r (eps / (1 + eps 2^beta))^(-1/beta)."""
    return r * (eps / (1.0 + eps * 2.0 ** beta)) ** (-1.0 / beta)


def psi_eps_max(beta: float) -> float:
    """Supremum of the eps keeping r_eps < r/2: 2^beta / (1 - 4^beta)."""
    return 2.0 ** beta / (1.0 - 4.0 ** beta)


def make_psi_eps(params: FracParams, beta: float, eps: float, r: float) -> RadialProfile:
    """
    psi_eps = r_eps^beta on [0, r_eps], |x|^beta on (r_eps, 2r], (2r)^beta beyond.

    Raises:
        DomainError: N <= ps or beta outside (-N/(p-1), beta*)
        PreconditionError: r_eps >= r/2 (hint carries the largest admissible eps)
    """
    _require_subcritical(params, beta)
    if not (eps > 0 and r > 0):
        raise DomainError(f"psi_eps needs eps > 0 and r > 0, got eps={eps}, r={r}")
    r_eps = psi_eps_radius(beta, eps, r)
    if not r_eps < 0.5 * r:
        eps_max = psi_eps_max(beta)
        raise PreconditionError(
            f"r_eps={r_eps!r} is not below r/2={0.5 * r!r}",
            hint=f"take eps < {eps_max:.12g}",
            eps=eps, eps_max=eps_max
        )
    return RadialProfile(
        ((0.0, Constant(r_eps ** beta)), (r_eps, Power(1.0, beta)), (2.0 * r, Constant((2.0 * r) ** beta))),
        name=f'psi_eps(beta={beta:g}, eps={eps:g}, r={r:g})'
    )


def D_constant(params: FracParams, beta: float,
               spec: Optional[QuadratureSpec] = None, perturb_ps: bool = False) -> Tuple[float, float]:
    """
    D = int_{|z| > 4} (|1 - 4^beta|^(p-1) - |1 - |z|^beta|^(p-1)) / |e_1 - z|^(N+sp) dz,
    negative for beta < 0. Depends on beta, p and s as well as N.

    Returns:
        (value, err_est)
    """
    spec = spec or QuadratureSpec()
    _require_subcritical(params, beta)
    ke = get_evaluator(params, spec, perturb_ps)
    p1 = params.p - 1.0
    level = abs(1.0 - 4.0 ** beta) ** p1

    def g(t: float) -> float:
        return level - abs(1.0 - t ** beta) ** p1

    return ball_integral(ke, g, 1.0, 4.0, math.inf, spec)


def psi_eps_threshold(params: FracParams, beta: float,
                      spec: Optional[QuadratureSpec] = None, perturb_ps: bool = False) -> float:
    """
    eps0, independent of r, from the sufficient condition

        C(beta) + 2D + (2 |S^(N-1)| / gamma) 2^(N + 2sp - beta(p-1))
                       (1 - 2w)^(-(N+sp)) w^gamma <= 0,   w = r_eps / r < 1/2,

    gamma = beta(p-1) + N, converted back through r_eps.
    """
    spec = spec or QuadratureSpec()
    _require_subcritical(params, beta)
    constant = c_beta(params, beta, spec, perturb_ps).value
    d_value, _ = D_constant(params, beta, spec, perturb_ps)
    N, sp, p1 = params.N, params.sp, params.p - 1.0
    gamma = beta * p1 + N
    k = 2.0 * sphere_area(N) / gamma * 2.0 ** (N + 2.0 * sp - beta * p1)
    base = constant + 2.0 * d_value
    if base >= 0:
        raise DomainError(f"psi_eps_threshold needs C(beta) + 2D < 0, got {base!r}")

    def condition(w: float) -> float:
        return base + k * (1.0 - 2.0 * w) ** (-(N + sp)) * w ** gamma

    w0 = _solve_unit(condition, 0.5, 'psi_eps_threshold')
    lift = w0 ** (-beta)
    eps0 = lift / (1.0 - 2.0 ** beta * lift)
    logger.debug(f"psi_eps threshold: w0={w0!r}, eps0={eps0!r}, D={d_value!r}")
    return eps0


def make_theta_eps(params: FracParams, beta: float, eps: float, R: float, m: float = 1.0) -> RadialProfile:
    """
    theta_eps = m on [0, eps), m (R^beta - |x|^beta) / (R^beta - eps^beta) on
    [eps, R), 0 beyond. Nonincreasing, supported in B_R.

    Raises:
        DomainError: N >= ps, beta outside (0, beta*), or not 0 < eps < 1 < R, m > 0
    """
    if not params.N < params.sp:
        raise DomainError(f"theta_eps needs N < ps, got N={params.N}, ps={params.sp}")
    if not (0.0 < beta < params.beta_star):
        raise DomainError(f"theta_eps needs 0 < beta < beta* = {params.beta_star:.12g}, got: {beta}")
    if not (0.0 < eps < 1.0 < R):
        raise DomainError(f"theta_eps needs 0 < eps < 1 < R, got eps={eps}, R={R}")
    if not m > 0:
        raise DomainError(f"theta_eps needs m > 0, got: {m}")
    span = R ** beta - eps ** beta
    middle = Power(-m / span, beta, m * R ** beta / span)
    return RadialProfile(
        ((0.0, Constant(m)), (eps, middle), (R, Constant(0.0))),
        name=f'theta_eps(beta={beta:g}, eps={eps:g}, R={R:g})'
    )


def theta_eps_threshold(params: FracParams, beta: float, r: float,
                        spec: Optional[QuadratureSpec] = None, perturb_ps: bool = False) -> float:
    """
    eps0 from -C(beta) + (2 |S^(N-1)| / N) (1 - eps/r)^(-(N+sp)) (eps/r)^N = 0.
    """
    spec = spec or QuadratureSpec()
    if not (params.N < params.sp and 0.0 < beta < params.beta_star):
        raise DomainError(f"theta_eps_threshold needs N < ps and 0 < beta < beta*, got {params}, beta={beta}")
    constant = c_beta(params, beta, spec, perturb_ps).value
    N, power = params.N, params.N + params.sp
    k = 2.0 * sphere_area(N) / N

    def condition(u: float) -> float:
        return -constant + k * (1.0 - u) ** (-power) * u ** N

    return _solve_unit(condition, 1.0, 'theta_eps_threshold') * r


def _require_log_case(params: FracParams):
    if not params.is_log_case:
        raise DomainError(f"the log barrier needs ps = N, got ps={params.sp}, N={params.N}")


def make_log_barrier(params: FracParams, eps: float, kappa: float, R: float) -> RadialProfile:
    """
    log R - log eps + kappa mu(|x|/eps) on [0, eps), log R - log|x| beyond.

    Raises:
        DomainError: ps != N, or not 0 < eps < 1 < R, kappa > 0
    """
    _require_log_case(params)
    if not (0.0 < eps < 1.0 < R):
        raise DomainError(f"log barrier needs 0 < eps < 1 < R, got eps={eps}, R={R}")
    if not kappa > 0:
        raise DomainError(f"log barrier needs kappa > 0, got: {kappa}")
    offset = math.log(R) - math.log(eps)
    return RadialProfile(
        ((0.0, SmoothCutoff(kappa, eps, offset)), (eps, Log(-1.0, math.log(R)))),
        name=f'log_barrier(eps={eps:g}, kappa={kappa:g}, R={R:g})'
    )


def log_barrier_h(params: FracParams, eps: float, kappa: float, x_norm: float,
                  spec: Optional[QuadratureSpec] = None, perturb_ps: bool = False) -> Tuple[float, float]:
    """
    h(x) = 2 int_{B_eps} [psi_p(log|x| - log|y|) - psi_p(log|x| - log eps + kappa mu(|y|/eps))]
           / |x - y|^(N+sp) dy,

    which equals the operator applied to the log barrier at |x| > eps.
    """
    spec = spec or QuadratureSpec()
    _require_log_case(params)
    if not x_norm > eps:
        raise DomainError(f"log_barrier_h needs |x| > eps, got |x|={x_norm}, eps={eps}")
    ke = get_evaluator(params, spec, perturb_ps)
    p = params.p
    log_x = math.log(x_norm)
    lift = log_x - math.log(eps)

    def g(t: float) -> float:
        return psi_p(log_x - math.log(t), p) - psi_p(lift + kappa * smooth_step(t / eps), p)

    value, err = ball_integral(ke, g, x_norm, 0.0, eps, spec)
    return 2.0 * value, 2.0 * err


def choose_log_kappa(params: FracParams, eps: float, radii: Sequence[float],
                     spec: Optional[QuadratureSpec] = None,
                     perturb_ps: bool = False) -> Tuple[float, List[Tuple[float, float]]]:
    """
    Smallest kappa = 2^k (k >= 0) with h <= 0 at every radius.

    Returns:
        (kappa, [(kappa, max h) per attempt])

    Raises:
        ConvergenceError: kappa passed 2^20
    """
    spec = spec or QuadratureSpec()
    kappa = KAPPA_START
    history = []
    while kappa <= KAPPA_CAP:
        worst = max(log_barrier_h(params, eps, kappa, r, spec, perturb_ps)[0] for r in radii)
        history.append((kappa, worst))
        logger.info(f"log barrier: kappa={kappa:g}, max h={worst:.6e}")
        if worst <= 0:
            return kappa, history
        kappa *= 2.0
    raise ConvergenceError(f"no kappa up to {KAPPA_CAP:g} makes h <= 0",
                           branch='choose_log_kappa', table=history)


def make_cutoff(m: float, R: float) -> RadialProfile:
    """m mu(|x|/R): m on [0, R/2], smooth decay to 0 at R, 0 beyond."""
    if not (m > 0 and R > 0):
        raise DomainError(f"cutoff needs m > 0 and R > 0, got m={m}, R={R}")
    return RadialProfile(
        ((0.0, Constant(m)), (0.5 * R, SmoothCutoff(m, R)), (R, Constant(0.0))),
        name=f'cutoff(m={m:g}, R={R:g})'
    )


def make_supersolution(params: FracParams, q: float, spec: Optional[QuadratureSpec] = None,
                       perturb_ps: bool = False) -> Tuple[float, float, RadialProfile]:
    """
    kappa = sp / (q - p + 1) and w = (1 + |x|)^(-kappa); scale * w with
    scale = C(-kappa)^(1/(q-p+1)) solves the Lane-Emden inequality.

    Returns:
        (kappa, scale, profile of w)

    Raises:
        DomainError: N <= ps, or q <= N(p-1)/(N-ps)
    """
    spec = spec or QuadratureSpec()
    critical = params.critical_q
    if not q > critical:
        raise DomainError(
            f"q={q} is not supercritical: needs q > N(p-1)/(N-ps) = {critical:.12g}",
            q=q, critical=critical
        )
    kappa = params.sp / (q - params.p + 1.0)
    constant = c_beta(params, -kappa, spec, perturb_ps).value
    if not constant > 0:
        raise NumericalError(f"C(-kappa) = {constant!r} should be positive for kappa={kappa!r}")
    scale = constant ** (1.0 / (q - params.p + 1.0))
    profile = RadialProfile(((0.0, ShiftedPower(1.0, -kappa, 1.0)),), name=f'supersolution(q={q:g})')
    return kappa, scale, profile


def sample_radii(annulus: Tuple[float, float], n_samples: int,
                 breakpoints: Sequence[float] = ()) -> List[float]:
    """
    Log-uniform radii r_in (r_out/r_in)^((i + 1/2)/n), moved off breakpoints
    by a relative 1e-3.
    """
    r_in, r_out = annulus
    if not (0.0 < r_in < r_out):
        raise DomainError(f"annulus needs 0 < r_in < r_out, got: {annulus}")
    if n_samples < 1:
        raise DomainError(f"n_samples must be >= 1, got: {n_samples}")
    radii = []
    for i in range(n_samples):
        r = r_in * (r_out / r_in) ** ((i + 0.5) / n_samples)
        for b in breakpoints:
            if abs(r - b) <= SAMPLE_NUDGE * b:
                r = b * (1.0 + SAMPLE_NUDGE) if r >= b else b * (1.0 - SAMPLE_NUDGE)
        radii.append(r)
    return radii


def _check_radii(profile: RadialProfile, radii: Sequence[float], bound: Callable[[float], float],
                 direction: str, ke: KernelEvaluator, spec: QuadratureSpec, barrier_kind: str,
                 parameters: Optional[Dict], threads: Optional[int]) -> BarrierCheckReport:
    if direction not in DIRECTIONS:
        raise DomainError(f"direction must be one of {DIRECTIONS}, got: {direction!r}")

    def one(r: float) -> Tuple[Optional[OperatorValue], float, str, Optional[str]]:
        target = bound(r)
        try:
            ov = frac_plap_radial_pv(profile, r, ke, spec)
        except FracPlapError as e:
            logger.warning(f"{barrier_kind} sample r={r} failed: {e.message}")
            return None, target, ERROR, f"{e.KIND}: {e.message}"
        slack = ov.err_est
        ok = ov.value <= target + slack if direction == LE else ov.value >= target - slack
        return ov, target, PASS if ok else FAIL, None

    results = ordered_map(one, list(radii), threads, label=f'{barrier_kind} check')
    report = BarrierCheckReport(
        barrier_kind=barrier_kind,
        parameters={**ke.params.to_dict(), 'direction': direction, **(parameters or {})},
        sample_radii=list(radii),
        operator_values=[item[0] for item in results],
        bound_values=[item[1] for item in results],
        verdicts=[item[2] for item in results],
        errors=[item[3] for item in results],
    )
    return report


def barrier_sign_check(profile: RadialProfile, annulus: Tuple[float, float], n_samples: int,
                       bound: Callable[[float], float], direction: str, ke: KernelEvaluator,
                       spec: Optional[QuadratureSpec] = None, barrier_kind: str = 'PhiEps',
                       parameters: Optional[Dict] = None, thresholds: Optional[Dict] = None,
                       threads: Optional[int] = None) -> BarrierCheckReport:
    """
    Sample the operator on the annulus and compare with bound(r).

    A sample passes when PV <= bound + err_est (direction '<=') or
    PV >= bound - err_est ('>='). Per-sample failures are recorded.

    Args:
        profile: Barrier profile
        annulus: (r_in, r_out), samples strictly inside
        n_samples: Number of log-uniform radii
        bound: Right-hand side as a function of r
        direction: '<=' or '>='
        ke: Kernel evaluator for the parameter set
        spec: Quadrature policy
        barrier_kind: One of BARRIER_KINDS
        parameters: Barrier parameters for the report
        thresholds: Threshold values for the report
        threads: Worker cap

    Returns:
        BarrierCheckReport
    """
    spec = spec or ke.spec
    radii = sample_radii(annulus, n_samples, profile.breakpoints)
    report = _check_radii(profile, radii, bound, direction, ke, spec, barrier_kind,
                          {**(parameters or {}), 'r_in': annulus[0], 'r_out': annulus[1]}, threads)
    report.thresholds.update(thresholds or {})
    logger.info(f"{barrier_kind} check on {annulus}: {report.aggregate_verdict}")
    return report


def cutoff_scaling_check(params: FracParams, m: float = 1.0, radii_R: Sequence[float] = (1.0, 2.0, 4.0),
                         n_samples: int = 16, ke: Optional[KernelEvaluator] = None,
                         spec: Optional[QuadratureSpec] = None,
                         threads: Optional[int] = None) -> BarrierCheckReport:
    """
    For each R sample PV of m mu(|x|/R) at the same relative radii t in B_R,
    take sup PV R^ps / m^(p-1), and compare every sample with the bound
    m^(p-1) C / R^ps (5% allowance), C calibrated at the first R. An R whose sup differs
    from C by more than 5% fails all its samples.
    """
    spec = spec or QuadratureSpec()
    ke = ke or get_evaluator(params, spec)
    ps, p1 = params.sp, params.p - 1.0
    t_samples = sample_radii((0.05, 0.98), n_samples, (0.5,))

    sups = {}
    reports = []
    for R in radii_R:
        profile = make_cutoff(m, R)
        report = _check_radii(profile, [R * t for t in t_samples], lambda r: math.inf, LE,
                              ke, spec, 'Cutoff', None, threads)
        values = [ov.value * R ** ps / m ** p1 for ov in report.operator_values if ov is not None]
        sups[R] = max(values) if values else math.nan
        reports.append((R, report))

    calibrated = sups[radii_R[0]]
    combined = BarrierCheckReport(
        barrier_kind='Cutoff',
        parameters={**params.to_dict(), 'direction': LE, 'm': m, 'radii_R': list(radii_R)},
        thresholds={'C': calibrated, 'sup_by_R': {str(R): v for R, v in sups.items()}},
    )
    for R, report in reports:
        spread = abs(sups[R] - calibrated) / abs(calibrated) if calibrated else math.inf
        if spread > CUTOFF_SPREAD:
            combined.notes.append(f"R={R:g}: sup {sups[R]!r} differs from C by {spread:.2%}")
        bound_value = m ** p1 * calibrated / R ** ps
        for r, ov, verdict, error in zip(report.sample_radii, report.operator_values,
                                         report.verdicts, report.errors):
            if verdict != ERROR:
                slack = ov.err_est + CUTOFF_SPREAD * abs(bound_value)
                ok = ov.value <= bound_value + slack and spread <= CUTOFF_SPREAD
                verdict = PASS if ok else FAIL
            combined.sample_radii.append(r)
            combined.operator_values.append(ov)
            combined.bound_values.append(bound_value)
            combined.verdicts.append(verdict)
            combined.errors.append(error)
    logger.info(f"cutoff scaling: sup by R = {sups}, verdict {combined.aggregate_verdict}")
    return combined


def supercritical_check(params: FracParams, q: float, radii: Sequence[float],
                        ke: Optional[KernelEvaluator] = None, spec: Optional[QuadratureSpec] = None,
                        threads: Optional[int] = None) -> BarrierCheckReport:
    """
    Check PV(w)(r) >= C(-kappa) (1 + r)^(-kappa q) at each radius, then the
    scaled solution u = scale w at r = 1 through PV(c w) = c^(p-1) PV(w).

    Raises:
        DomainError: q not supercritical
        NumericalError: kappa(p-1) + sp != kappa q beyond rounding
    """
    spec = spec or QuadratureSpec()
    ke = ke or get_evaluator(params, spec)
    kappa, scale, profile = make_supersolution(params, q, spec, ke.perturb_ps)
    p1 = params.p - 1.0
    lhs, rhs = kappa * p1 + params.sp, kappa * q
    if abs(lhs - rhs) > IDENTITY_TOL * max(1.0, abs(rhs)):
        raise NumericalError(f"exponent identity kappa(p-1) + sp = kappa q fails: {lhs!r} vs {rhs!r}")
    constant = c_beta(params, -kappa, spec, ke.perturb_ps).value

    def bound(r: float) -> float:
        return constant * (1.0 + r) ** (-kappa * q)

    report = _check_radii(profile, list(radii), bound, GE, ke, spec, 'Supersolution',
                          {'q': q, 'kappa': kappa, 'scale': scale}, threads)
    report.thresholds.update({'critical_q': params.critical_q, 'c_minus_kappa': constant,
                              'identity_residual': abs(lhs - rhs)})

    # scaled solution at r = 1
    try:
        at_one = frac_plap_radial_pv(profile, 1.0, ke, spec)
        scaled = OperatorValue(scale ** p1 * at_one.value, scale ** p1 * at_one.err_est, 1.0)
        target = (scale * 2.0 ** (-kappa)) ** q
        verdict = PASS if scaled.value >= target - scaled.err_est else FAIL
        report.notes.append(f"scaled solution at r=1: PV={scaled.value!r} vs u^q={target!r} ({verdict})")
        report.sample_radii.append(1.0)
        report.operator_values.append(scaled)
        report.bound_values.append(target)
        report.verdicts.append(verdict)
        report.errors.append(None)
    except FracPlapError as e:
        report.notes.append(f"scaled solution check failed: {e.message}")
    logger.info(f"supercritical check q={q}: {report.aggregate_verdict}")
    return report
