#!/usr/bin/env python3
"""
fracplap command-line tool
Fundamental solutions and barrier checks for the fractional p-Laplacian of
radial functions, written out as CSV or JSON reports
"""

import argparse
import logging
import math
import sys
from typing import Dict, List, Optional, Sequence

import numpy as np
from dotenv import load_dotenv

from models import (ERROR, FAIL, PASS, SCHEMA_VERSION, Report, RunConfig,
                    aggregate_verdicts, parse_float_list)
from utils.barriers import (LE, THRESHOLD_MODES, barrier_sign_check, choose_log_kappa,
                            cutoff_scaling_check, make_log_barrier, make_phi_eps, make_psi_eps,
                            make_theta_eps, phi_ball_constant, phi_eps_threshold, psi_eps_threshold,
                            sample_radii, supercritical_check, theta_eps_threshold)
from utils.errors import DomainError, FracPlapError
from utils.fundamental import c_beta, c_beta_sweep, c_beta_zeros
from utils.kernel import K_eval, K_theta, get_evaluator
from utils.radial_operator import verify_fundamental_identity, verify_log_harmonic
from utils.report_writer import ReportWriter
from utils.specfun import H_prime_limit

# Load environment variables
load_dotenv()

logger = logging.getLogger('fracplap')

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_DOMAIN = 2
EXIT_NUMERICAL = 3
EXIT_USAGE = 64

VERIFY_TARGETS = ('fundamental', 'log', 'phi', 'psi', 'theta', 'logbarrier', 'cutoff', 'supercritical')

CBETA_COLUMNS = ['beta', 'value', 'err_est', 'predicted_sign', 'computed_sign', 'rhs_exponent', 'error']
ZERO_COLUMNS = ['zero', 'beta', 'expected', 'difference']
KERNEL_COLUMNS = ['rho', 'K', 'K_theta', 'rel_diff', 'G', 'H']
HLIMIT_COLUMNS = ['h_limit', 'h_prime_limit', 'h_prime_err_est']
FUNDAMENTAL_COLUMNS = ['r', 'expected', 'value', 'err_est', 'mode', 'residual', 'budget', 'floor',
                       'verdict', 'error']
LOG_COLUMNS = ['r', 'value', 'err_est', 'scale', 'residual', 'verdict', 'error']
BARRIER_COLUMNS = ['r', 'value', 'err_est', 'bound', 'verdict', 'error']
DUAL_COLUMNS = ['dual_value', 'dual_err_est', 'dual_agrees']

EPS_FRACTION = 0.5
EPS_CAP = 0.5
KERNEL_AGREEMENT = 1e-8
ZERO_TOLERANCE = 1e-6

PHI_MODE_NOTES = {
    'ball': "eps0 from K = 2|S^(N-1)|/(beta(p-1)+N) = {value!r}, which bounds the ball perturbation; "
            "--threshold-mode alpha uses K = 2 alpha_N",
    'alpha': "eps0 from K = 2 alpha_N = {value!r}; --threshold-mode ball uses "
             "K = 2|S^(N-1)|/(beta(p-1)+N), which bounds the ball perturbation",
}


class UsageError(Exception):
    """Malformed command line (exit 64)."""


class FracPlapParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 64 instead of 2."""

    def error(self, message):
        raise UsageError(message)


def _float_list(text: str) -> List[float]:
    try:
        return parse_float_list(text)
    except DomainError as e:
        raise argparse.ArgumentTypeError(e.message)


def parse_beta_grid(text: str) -> List[float]:
    """
    Parse 'from:to:steps' into `steps` equally spaced values, both ends included.

    Raises:
        UsageError: malformed grid
    """
    parts = text.split(':')
    if len(parts) != 3:
        raise UsageError(f"--beta-grid must be from:to:steps, got: {text!r}")
    try:
        start, stop = float(parts[0]), float(parts[1])
        steps = int(parts[2])
    except ValueError:
        raise UsageError(f"--beta-grid must be from:to:steps, got: {text!r}")
    if steps < 1 or not (math.isfinite(start) and math.isfinite(stop)):
        raise UsageError(f"--beta-grid needs finite ends and steps >= 1, got: {text!r}")
    if steps == 1:
        return [start]
    return [float(b) for b in np.linspace(start, stop, steps)]


def build_parser() -> FracPlapParser:
    """Create the argument parser with the cbeta, verify and kernel commands."""
    common = FracPlapParser(add_help=False)
    common.add_argument('--N', type=int, help='Dimension (integer >= 2)')
    common.add_argument('--s', type=float, help='Fractional order in (0, 1)')
    common.add_argument('--p', type=float, help='Growth exponent > 1')
    common.add_argument('--format', choices=('csv', 'json'), help='Output format')
    common.add_argument('--output', help='Output path (default: stdout)')
    common.add_argument('--rel-tol', type=float, help='Relative quadrature tolerance')
    common.add_argument('--abs-tol', type=float, help='Absolute quadrature tolerance')
    common.add_argument('--max-subdivisions', type=int, help='Adaptive subdivision budget')
    common.add_argument('--pv-epsilons', help='Principal-value schedule, comma separated, decreasing')
    common.add_argument('--threads', type=int, help='Worker threads (0 = all cores, 1 = serial)')
    common.add_argument('--log-level', help='Logging level (DEBUG, INFO, WARNING, ...)')

    parser = FracPlapParser(prog='fracplap', description=__doc__.strip().splitlines()[1])
    commands = parser.add_subparsers(dest='command', parser_class=FracPlapParser)
    commands.required = True

    cbeta = commands.add_parser('cbeta', parents=[common], help='Multiplier constant C(beta)')
    group = cbeta.add_mutually_exclusive_group(required=True)
    group.add_argument('--beta', type=float, help='Single exponent')
    group.add_argument('--beta-grid', help='Sweep from:to:steps')
    group.add_argument('--zeros', action='store_true', help='Locate both zeros of C(beta)')

    verify = commands.add_parser('verify', parents=[common], help='Identity and barrier checks')
    verify.add_argument('target', choices=VERIFY_TARGETS)
    verify.add_argument('--beta', type=float, help='Exponent of the power profile or barrier')
    verify.add_argument('--eps', type=float, help='Barrier epsilon (default: half the threshold)')
    verify.add_argument('--r', type=float, default=2.0, help='Inner radius of the annulus')
    verify.add_argument('--R', type=float, default=8.0, help='Outer radius / cutoff radius')
    verify.add_argument('--q', type=float, help='Lane-Emden exponent')
    verify.add_argument('--radii', type=_float_list, help='Comma separated radii')
    verify.add_argument('--samples', type=int, default=16, help='Samples per annulus')
    verify.add_argument('--m', type=float, default=1.0, help='Cutoff / barrier height')
    verify.add_argument('--kappa', type=float, help='Log barrier kappa (default: doubled until h <= 0)')
    verify.add_argument('--threshold-mode', choices=THRESHOLD_MODES, default='ball',
                        help='Perturbation constant used by the phi threshold')
    verify.add_argument('--dual-path', action='store_true',
                        help='Cross-check principal values by extrapolating J_eps')

    kernel = commands.add_parser('kernel', parents=[common], help='Angular kernel K, G and H')
    kernel.add_argument('--rho', type=_float_list, help='Comma separated rho values')
    kernel.add_argument('--compare', action='store_true', help='Also evaluate K by theta quadrature')
    kernel.add_argument('--hlimit', action='store_true', help='Report H(1) and lim H\'(rho) at 1')
    kernel.set_defaults(N=2, s=0.5, p=2.0)

    return parser


def _require(args, *names: str):
    missing = [f"--{name.replace('_', '-')}" for name in names if getattr(args, name, None) is None]
    if missing:
        what = ' '.join(part for part in (args.command, getattr(args, 'target', None)) if part)
        raise UsageError(f"{what} needs {', '.join(missing)}")


def _columns(base: List[str], rows: Sequence[Dict], extra: Sequence[str] = ()) -> List[str]:
    columns = list(base)
    for name in extra:
        if any(name in row for row in rows):
            columns.append(name)
    return columns


def _sign_text(sign) -> Optional[str]:
    return None if sign is None else sign.value


def _error_exit(rows: Sequence[Dict]) -> int:
    """Exit code for rows carrying per-entry error text ('kind: message')."""
    kinds = [row['error'].split(':', 1)[0] for row in rows if row.get('error')]
    if not kinds:
        return EXIT_OK
    if all(kind in ('domain', 'precondition') for kind in kinds):
        return EXIT_DOMAIN
    return EXIT_NUMERICAL


def _verdict_exit(verdict: str) -> int:
    return {PASS: EXIT_OK, FAIL: EXIT_FAIL}.get(verdict, EXIT_NUMERICAL)


def cmd_cbeta(args, config: RunConfig) -> int:
    """
    Evaluate C(beta) at one exponent, over a grid, or locate its zeros.

    Returns:
        Exit code (0 success, 1 zero off target, 2 domain error, 3 numerical failure)
    """
    _require(args, 'N', 's', 'p')
    params = config.params

    if args.zeros:
        low, high = c_beta_zeros(params, config.spec, config.perturb_ps)
        expected = sorted((0.0, params.beta_star))
        rows = [{'zero': name, 'beta': root, 'expected': target, 'difference': root - target}
                for name, root, target in zip(('low', 'high'), (low, high), expected)]
        verdict = PASS if all(abs(row['difference']) < ZERO_TOLERANCE for row in rows) else FAIL
        report = Report(kind='cbeta_zeros', params=params.to_dict(), rows=rows, verdict=verdict,
                        diagnostics={'quadrature': config.spec.to_dict(), 'tolerance': ZERO_TOLERANCE,
                                     'perturb_ps': config.perturb_ps})
        if verdict == FAIL:
            report.add_flag('zero_off_target')
        report.log_summary()
        ReportWriter(config.output_format, config.output_path).write(report.to_dict(), ZERO_COLUMNS)
        return _verdict_exit(verdict)

    if args.beta_grid is not None:
        results = c_beta_sweep(params, parse_beta_grid(args.beta_grid), config.spec, config.threads,
                               config.perturb_ps)
    else:
        results = [c_beta(params, args.beta, config.spec, config.perturb_ps)]

    rows = []
    verdicts = []
    for result in results:
        row = result.to_dict()
        row['computed_sign'] = _sign_text(result.computed_sign)
        rows.append(row)
        if result.error is not None:
            verdicts.append(ERROR)
        else:
            verdicts.append(FAIL if result.sign_matches is False else PASS)

    report = Report(kind='cbeta', params=params.to_dict(), rows=rows,
                    verdict=aggregate_verdicts(verdicts),
                    diagnostics={'quadrature': config.spec.to_dict(), 'perturb_ps': config.perturb_ps})
    if any(result.sign_matches is False for result in results):
        report.add_flag('sign_mismatch')
    report.log_summary()
    ReportWriter(config.output_format, config.output_path).write(report.to_dict(), CBETA_COLUMNS)
    return _error_exit(rows)


def _barrier_eps(args, threshold: float) -> float:
    if args.eps is not None:
        return args.eps
    return min(EPS_FRACTION * threshold, EPS_CAP)


def _verify_phi(args, config: RunConfig) -> Report:
    _require(args, 'beta')
    params, spec = config.params, config.spec
    threshold = phi_eps_threshold(params, args.beta, args.r, spec, args.threshold_mode, config.perturb_ps)
    eps = _barrier_eps(args, threshold)
    profile = make_phi_eps(params, args.beta, eps)
    ke = get_evaluator(params, spec, config.perturb_ps)
    ball_constant = phi_ball_constant(params, args.beta, args.threshold_mode)
    check = barrier_sign_check(profile, (args.r, 4.0 * args.r), args.samples, lambda r: 0.0, LE, ke, spec,
                               barrier_kind='PhiEps', parameters={'beta': args.beta, 'eps': eps, 'r': args.r},
                               thresholds={'eps0': threshold, 'mode': args.threshold_mode,
                                           'ball_constant': ball_constant},
                               threads=config.threads)
    check.notes.append(PHI_MODE_NOTES[args.threshold_mode].format(value=ball_constant))
    return check.to_report()


def _verify_psi(args, config: RunConfig) -> Report:
    _require(args, 'beta')
    params, spec = config.params, config.spec
    threshold = psi_eps_threshold(params, args.beta, spec, config.perturb_ps)
    eps = _barrier_eps(args, threshold)
    profile = make_psi_eps(params, args.beta, eps, args.r)
    ke = get_evaluator(params, spec, config.perturb_ps)
    annulus = (0.5 * args.r, 2.0 * args.r)
    check = barrier_sign_check(profile, annulus, args.samples, lambda r: 0.0, LE, ke, spec,
                               barrier_kind='PsiEps', parameters={'beta': args.beta, 'eps': eps, 'r': args.r},
                               thresholds={'eps0': threshold}, threads=config.threads)
    return check.to_report()


def _verify_theta(args, config: RunConfig) -> Report:
    _require(args, 'beta')
    params, spec = config.params, config.spec
    if not args.R > args.r:
        raise DomainError(f"theta check needs R > r, got r={args.r}, R={args.R}")
    threshold = theta_eps_threshold(params, args.beta, args.r, spec, config.perturb_ps)
    eps = _barrier_eps(args, threshold)
    profile = make_theta_eps(params, args.beta, eps, args.R, args.m)
    ke = get_evaluator(params, spec, config.perturb_ps)
    check = barrier_sign_check(profile, (args.r, args.R), args.samples, lambda r: 0.0, LE, ke, spec,
                               barrier_kind='ThetaEps',
                               parameters={'beta': args.beta, 'eps': eps, 'R': args.R, 'm': args.m},
                               thresholds={'eps0': threshold}, threads=config.threads)
    return check.to_report()


def _verify_logbarrier(args, config: RunConfig) -> Report:
    params, spec = config.params, config.spec
    eps = 0.1 if args.eps is None else args.eps
    annulus = (args.r, args.R)
    if not (eps < args.r < args.R):
        raise DomainError(f"log barrier check needs eps < r < R, got eps={eps}, r={args.r}, R={args.R}")
    history = []
    kappa = args.kappa
    if kappa is None:
        kappa, history = choose_log_kappa(params, eps, sample_radii(annulus, args.samples), spec,
                                          config.perturb_ps)
    profile = make_log_barrier(params, eps, kappa, args.R)
    ke = get_evaluator(params, spec, config.perturb_ps)
    check = barrier_sign_check(profile, annulus, args.samples, lambda r: 0.0, LE, ke, spec,
                               barrier_kind='LogBarrier',
                               parameters={'eps': eps, 'kappa': kappa, 'R': args.R},
                               thresholds={'kappa_history': [[k, h] for k, h in history]},
                               threads=config.threads)
    return check.to_report()


def _verify_cutoff(args, config: RunConfig) -> Report:
    radii_R = args.radii or [1.0, 2.0, 4.0]
    ke = get_evaluator(config.params, config.spec, config.perturb_ps)
    check = cutoff_scaling_check(config.params, args.m, radii_R, args.samples, ke, config.spec,
                                 config.threads)
    return check.to_report()


def _verify_supercritical(args, config: RunConfig) -> Report:
    _require(args, 'q', 'radii')
    ke = get_evaluator(config.params, config.spec, config.perturb_ps)
    check = supercritical_check(config.params, args.q, args.radii, ke, config.spec, config.threads)
    return check.to_report()


def cmd_verify(args, config: RunConfig) -> int:
    """
    Run one identity or barrier check and emit its Report.

    Returns:
        Exit code (0 pass, 1 fail, 2 domain error, 3 numerical failure)
    """
    _require(args, 'N', 's', 'p')
    params, spec = config.params, config.spec
    target = args.target

    if target == 'fundamental':
        _require(args, 'beta', 'radii')
        report = verify_fundamental_identity(params, args.beta, args.radii, spec, config.threads,
                                             config.perturb_ps)
        columns = _columns(FUNDAMENTAL_COLUMNS, report.rows, DUAL_COLUMNS)
    elif target == 'log':
        _require(args, 'radii')
        report = verify_log_harmonic(params, args.radii, spec, threads=config.threads,
                                     perturb_ps=config.perturb_ps)
        columns = _columns(LOG_COLUMNS, report.rows, DUAL_COLUMNS)
    else:
        handlers = {
            'phi': _verify_phi,
            'psi': _verify_psi,
            'theta': _verify_theta,
            'logbarrier': _verify_logbarrier,
            'cutoff': _verify_cutoff,
            'supercritical': _verify_supercritical,
        }
        report = handlers[target](args, config)
        report.log_summary()
        columns = BARRIER_COLUMNS

    ReportWriter(config.output_format, config.output_path).write(report.to_dict(), columns)
    return _verdict_exit(report.verdict)


def cmd_kernel(args, config: RunConfig) -> int:
    """
    Evaluate K (closed form, optionally by theta quadrature), G and H at each rho,
    or report H(1) and the limit of H' at 1.

    Returns:
        Exit code (0 success, 2 domain error)
    """
    if args.rho is None and not args.hlimit:
        raise UsageError("kernel needs --rho or --hlimit")
    params, spec = config.params, config.spec
    ke = get_evaluator(params, spec, config.perturb_ps)

    rows = []
    verdicts = []
    for rho in args.rho or []:
        row = {'rho': rho, 'K': K_eval(rho, ke)}
        if args.compare:
            direct = K_theta(rho, params, spec)
            row['K_theta'] = direct
            row['rel_diff'] = abs(direct - row['K']) / abs(row['K'])
            verdicts.append(PASS if row['rel_diff'] < KERNEL_AGREEMENT else FAIL)
        if rho < 1.0:
            row['G'] = ke.G(rho * rho)
            row['H'] = ke.H(rho)
        rows.append(row)

    columns = list(KERNEL_COLUMNS)
    diagnostics = {'quadrature': spec.to_dict(), 'perturb_ps': config.perturb_ps}
    if args.hlimit:
        slope, slope_err = H_prime_limit(params, spec, config.perturb_ps)
        rows.append({'rho': 1.0, 'H': ke.h_limit, 'h_limit': ke.h_limit,
                     'h_prime_limit': slope, 'h_prime_err_est': slope_err})
        columns += HLIMIT_COLUMNS

    report = Report(kind='kernel', params=params.to_dict(), rows=rows,
                    verdict=aggregate_verdicts(verdicts) if verdicts else PASS,
                    diagnostics=diagnostics)
    if any(v == FAIL for v in verdicts):
        report.add_flag('kernel_paths_disagree')
    ReportWriter(config.output_format, config.output_path).write(report.to_dict(), columns)
    return EXIT_OK


COMMANDS = {
    'cbeta': (cmd_cbeta, 'csv'),
    'verify': (cmd_verify, 'json'),
    'kernel': (cmd_kernel, 'csv'),
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run the command and map failures to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"fracplap: error: {e}", file=sys.stderr)
        return EXIT_USAGE

    handler, default_format = COMMANDS[args.command]
    try:
        if args.command != 'kernel':
            _require(args, 'N', 's', 'p')
        config = RunConfig.from_args(args, default_format)
        logging.basicConfig(
            level=getattr(logging, str(config.log_level).upper(), logging.WARNING),
            format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            stream=sys.stderr,
        )
        logger.info(f"fracplap {args.command} (schema {SCHEMA_VERSION}): {config.to_dict()}")
        return handler(args, config)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"fracplap: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except FracPlapError as e:
        print(f"fracplap: {e.KIND} error: {e.message}", file=sys.stderr)
        return e.EXIT_CODE


if __name__ == '__main__':
    sys.exit(main())
