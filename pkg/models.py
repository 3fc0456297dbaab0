"""
Data models for fracplap
Parameter sets, quadrature policy and the result records written to reports
"""

import logging
import math
import os
from dataclasses import dataclass, field, replace as dc_replace
from enum import Enum
from typing import Dict, List, Optional, Tuple

from utils.errors import DomainError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


@dataclass(frozen=True)
class FracParams:
    """The triple (N, s, p) of the operator (-Δ_p)^s on R^N"""

    N: int
    s: float
    p: float

    def __post_init__(self):
        errors = []
        if isinstance(self.N, bool) or not float(self.N).is_integer():
            errors.append(f"N must be an integer, got: {self.N}")
        elif self.N < 2:
            errors.append(f"N must be >= 2, got: {self.N}")
        if not (0.0 < self.s < 1.0):
            errors.append(f"s must lie in (0, 1), got: {self.s}")
        if not (1.0 < self.p < math.inf):
            errors.append(f"p must lie in (1, inf), got: {self.p}")
        if errors:
            raise DomainError('; '.join(errors), N=self.N, s=self.s, p=self.p)
        object.__setattr__(self, 'N', int(self.N))
        object.__setattr__(self, 's', float(self.s))
        object.__setattr__(self, 'p', float(self.p))

    @property
    def sp(self) -> float:
        return self.s * self.p

    ps = sp

    @property
    def beta_star(self) -> float:
        """Critical exponent (ps - N)/(p - 1)."""
        return (self.sp - self.N) / (self.p - 1.0)

    @property
    def beta_interval(self) -> Tuple[float, float]:
        """Open interval of admissible exponents β."""
        return (-self.N / (self.p - 1.0), self.sp / (self.p - 1.0))

    @property
    def is_log_case(self) -> bool:
        return abs(self.sp - self.N) < 1e-12

    @property
    def regime(self) -> str:
        if self.is_log_case:
            return 'N=ps'
        return 'N>ps' if self.N > self.sp else 'N<ps'

    @property
    def critical_q(self) -> float:
        """Critical Lane-Emden exponent N(p-1)/(N-ps), defined for N > ps."""
        if self.N <= self.sp:
            raise DomainError(f"critical exponent needs N > ps, got N={self.N}, ps={self.sp}")
        return self.N * (self.p - 1.0) / (self.N - self.sp)

    def is_admissible(self, beta: float) -> bool:
        low, high = self.beta_interval
        return low < beta < high

    def require_admissible(self, beta: float):
        low, high = self.beta_interval
        if not (low < beta < high):
            raise DomainError(
                f"beta={beta} outside the admissible interval ({low:.12g}, {high:.12g})",
                beta=beta, low=low, high=high
            )

    def to_dict(self) -> Dict:
        return {
            'N': self.N,
            's': self.s,
            'p': self.p,
            'sp': self.sp,
            'beta_star': self.beta_star,
            'regime': self.regime,
        }

    def __repr__(self):
        return f'<FracParams N={self.N} s={self.s} p={self.p}>'


@dataclass(frozen=True)
class HyperParams:
    """Parameters (a, b, c) of the Gauss function 2F1(a, b; c; t)"""

    a: float
    b: float
    c: float

    def __post_init__(self):
        if _is_nonpositive_integer(self.c):
            raise DomainError(f"c must not be a non-positive integer, got: {self.c}", c=self.c)

    @classmethod
    def from_params(cls, params: FracParams, ps: Optional[float] = None) -> 'HyperParams':
        """The parameters of G: a = (N+ps)/2, b = (ps+2)/2, c = N/2."""
        ps = params.sp if ps is None else ps
        return cls(a=(params.N + ps) / 2.0, b=(ps + 2.0) / 2.0, c=params.N / 2.0)

    def to_dict(self) -> Dict:
        return {'a': self.a, 'b': self.b, 'c': self.c}


DEFAULT_PV_EPSILONS = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances, mesh grading and PV schedule for every integral"""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 2000
    grading_exponent: float = 2.0
    pv_epsilons: Tuple[float, ...] = DEFAULT_PV_EPSILONS
    graded_panels: int = 4
    dual_path: bool = False

    def __post_init__(self):
        errors = []
        if not self.rel_tol > 0:
            errors.append(f"rel_tol must be > 0, got: {self.rel_tol}")
        if not self.abs_tol > 0:
            errors.append(f"abs_tol must be > 0, got: {self.abs_tol}")
        if int(self.max_subdivisions) < 1:
            errors.append(f"max_subdivisions must be >= 1, got: {self.max_subdivisions}")
        if not self.grading_exponent >= 1.0:
            errors.append(f"grading_exponent must be >= 1, got: {self.grading_exponent}")
        eps = tuple(float(e) for e in self.pv_epsilons)
        if len(eps) < 3:
            errors.append(f"pv_epsilons needs at least 3 entries, got: {len(eps)}")
        if any(e <= 0 for e in eps):
            errors.append("pv_epsilons must be positive")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            errors.append("pv_epsilons must be strictly decreasing")
        if errors:
            raise DomainError('; '.join(errors))
        object.__setattr__(self, 'pv_epsilons', eps)
        object.__setattr__(self, 'max_subdivisions', int(self.max_subdivisions))

    @classmethod
    def from_env(cls) -> 'QuadratureSpec':
        """Build a spec from FRACPLAP_* environment variables (defaults when unset)."""
        eps_text = os.getenv('FRACPLAP_PV_EPSILONS')
        try:
            return cls(
                rel_tol=float(os.getenv('FRACPLAP_REL_TOL', 1e-10)),
                abs_tol=float(os.getenv('FRACPLAP_ABS_TOL', 1e-14)),
                max_subdivisions=int(os.getenv('FRACPLAP_MAX_SUBDIVISIONS', 2000)),
                grading_exponent=float(os.getenv('FRACPLAP_GRADING_EXPONENT', 2.0)),
                pv_epsilons=parse_float_list(eps_text) if eps_text else DEFAULT_PV_EPSILONS,
            )
        except ValueError as e:
            if isinstance(e, DomainError):
                raise
            raise DomainError(f"Invalid quadrature configuration: {e}")

    def replace(self, **overrides) -> 'QuadratureSpec':
        changes = {k: v for k, v in overrides.items() if v is not None}
        return dc_replace(self, **changes)

    def to_dict(self) -> Dict:
        return {
            'rel_tol': self.rel_tol,
            'abs_tol': self.abs_tol,
            'max_subdivisions': self.max_subdivisions,
            'grading_exponent': self.grading_exponent,
            'pv_epsilons': list(self.pv_epsilons),
            'dual_path': self.dual_path,
        }


def parse_float_list(text: str) -> List[float]:
    """Parse '0.5,1,2' into floats; raises DomainError on malformed input."""
    try:
        values = [float(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise DomainError(f"Expected a comma separated list of numbers, got: {text!r}")
    if not values:
        raise DomainError(f"Expected at least one number, got: {text!r}")
    return values


class Sign(str, Enum):
    ZERO = 'Zero'
    POSITIVE = 'Positive'
    NEGATIVE = 'Negative'

    @classmethod
    def of(cls, value: float) -> 'Sign':
        if value > 0:
            return cls.POSITIVE
        if value < 0:
            return cls.NEGATIVE
        return cls.ZERO


TRUNCATED = 'truncated'
PRINCIPAL_VALUE = 'principal_value'


@dataclass
class OperatorValue:
    """Value of the operator at radius r, with its error estimate"""

    value: float
    err_est: float
    r: float
    mode: str = PRINCIPAL_VALUE
    eps: Optional[float] = None
    dual_value: Optional[float] = None
    dual_err_est: Optional[float] = None

    def __post_init__(self):
        if self.err_est < 0:
            raise DomainError(f"err_est must be >= 0, got: {self.err_est}")
        if not self.r > 0:
            raise DomainError(f"r must be > 0, got: {self.r}")

    @property
    def dual_agrees(self) -> Optional[bool]:
        """Dual-path agreement within 3x the combined error estimate."""
        if self.dual_value is None:
            return None
        slack = 3.0 * (self.err_est + (self.dual_err_est or 0.0))
        return abs(self.value - self.dual_value) <= slack

    def to_dict(self) -> Dict:
        return {
            'r': self.r,
            'value': self.value,
            'err_est': self.err_est,
            'mode': self.mode,
            'eps': self.eps,
            'dual_value': self.dual_value,
            'dual_err_est': self.dual_err_est,
        }

    def __repr__(self):
        return f'<OperatorValue r={self.r} value={self.value:.6g} ± {self.err_est:.1e} ({self.mode})>'


@dataclass
class CBetaResult:
    """The multiplier constant for one exponent β"""

    beta: float
    value: float
    err_est: float
    predicted_sign: Optional[Sign]
    rhs_exponent: float
    error: Optional[str] = None

    @property
    def computed_sign(self) -> Optional[Sign]:
        """Sign of the value when it is resolved (|value| > 10 err_est)."""
        if self.error is not None or not abs(self.value) > 10.0 * self.err_est:
            return None
        return Sign.of(self.value)

    @property
    def sign_matches(self) -> Optional[bool]:
        computed = self.computed_sign
        return None if computed is None else computed == self.predicted_sign

    def to_dict(self) -> Dict:
        return {
            'beta': self.beta,
            'value': self.value,
            'err_est': self.err_est,
            'predicted_sign': None if self.predicted_sign is None else self.predicted_sign.value,
            'rhs_exponent': self.rhs_exponent,
            'error': self.error,
        }

    def __repr__(self):
        return f'<CBetaResult beta={self.beta} value={self.value:.6g} ({getattr(self.predicted_sign, "value", None)})>'


PASS = 'pass'
FAIL = 'fail'
ERROR = 'error'


def aggregate_verdicts(verdicts: List[str]) -> str:
    """All pass -> pass; nothing but errors -> error; otherwise fail."""
    if not verdicts or all(v == ERROR for v in verdicts):
        return ERROR
    return PASS if all(v == PASS for v in verdicts) else FAIL


@dataclass
class Report:
    """Structured verification output: per-sample rows plus an aggregate verdict"""

    kind: str
    params: Dict
    rows: List[Dict] = field(default_factory=list)
    verdict: str = PASS
    flags: List[str] = field(default_factory=list)
    diagnostics: Dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def add_flag(self, flag: str):
        if flag not in self.flags:
            self.flags.append(flag)

    def to_dict(self) -> Dict:
        return {
            'schema_version': SCHEMA_VERSION,
            'kind': self.kind,
            'params': dict(self.params),
            'rows': [dict(row) for row in self.rows],
            'verdict': self.verdict,
            'flags': list(self.flags),
            'diagnostics': dict(self.diagnostics),
        }

    def log_summary(self):
        """Log report summary"""
        failed = sum(1 for row in self.rows if row.get('verdict') not in (None, PASS))
        logger.info("=" * 60)
        logger.info(f"Report: {self.kind}")
        logger.info("=" * 60)
        for key, value in self.params.items():
            logger.info(f"{key + ':':<22}{value}")
        logger.info(f"{'Rows:':<22}{len(self.rows)}")
        logger.info(f"{'Failed rows:':<22}{failed}")
        if self.flags:
            logger.info(f"{'Flags:':<22}{', '.join(self.flags)}")
        logger.info(f"{'Verdict:':<22}{self.verdict}")
        logger.info("=" * 60)

    def __repr__(self):
        return f'<Report {self.kind} {self.verdict} rows={len(self.rows)}>'


BARRIER_KINDS = ('PhiEps', 'PsiEps', 'ThetaEps', 'LogBarrier', 'Cutoff', 'Supersolution')


@dataclass
class BarrierCheckReport:
    """Outcome of sampling a barrier inequality on an annulus"""

    barrier_kind: str
    parameters: Dict
    sample_radii: List[float] = field(default_factory=list)
    operator_values: List[Optional[OperatorValue]] = field(default_factory=list)
    bound_values: List[float] = field(default_factory=list)
    verdicts: List[str] = field(default_factory=list)
    errors: List[Optional[str]] = field(default_factory=list)
    thresholds: Dict = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def __post_init__(self):
        if self.barrier_kind not in BARRIER_KINDS:
            raise DomainError(f"barrier_kind must be one of {BARRIER_KINDS}, got: {self.barrier_kind}")

    @property
    def aggregate_verdict(self) -> str:
        return aggregate_verdicts(self.verdicts)

    @property
    def passed(self) -> bool:
        return self.aggregate_verdict == PASS

    def rows(self) -> List[Dict]:
        rows = []
        for i, r in enumerate(self.sample_radii):
            ov = self.operator_values[i]
            rows.append({
                'r': r,
                'value': None if ov is None else ov.value,
                'err_est': None if ov is None else ov.err_est,
                'bound': self.bound_values[i],
                'verdict': self.verdicts[i],
                'error': self.errors[i] if i < len(self.errors) else None,
            })
        return rows

    def to_report(self) -> Report:
        report = Report(
            kind=f'barrier:{self.barrier_kind}',
            params=dict(self.parameters),
            rows=self.rows(),
            verdict=self.aggregate_verdict,
            diagnostics={'thresholds': dict(self.thresholds), 'notes': list(self.notes)},
        )
        return report

    def to_dict(self) -> Dict:
        return self.to_report().to_dict()

    def __repr__(self):
        return f'<BarrierCheckReport {self.barrier_kind} {self.aggregate_verdict} n={len(self.sample_radii)}>'


OUTPUT_FORMATS = ('csv', 'json')


@dataclass
class RunConfig:
    """Validated command-line configuration"""

    command: str
    params: Optional[FracParams] = None
    spec: QuadratureSpec = field(default_factory=QuadratureSpec)
    output_format: str = 'csv'
    output_path: Optional[str] = None
    threads: int = 0
    perturb_ps: bool = False
    log_level: str = 'WARNING'

    def __post_init__(self):
        if self.output_format not in OUTPUT_FORMATS:
            raise DomainError(f"format must be one of {OUTPUT_FORMATS}, got: {self.output_format}")
        if self.threads < 0:
            raise DomainError(f"threads must be >= 0, got: {self.threads}")

    @classmethod
    def from_args(cls, args, default_format: str = 'csv') -> 'RunConfig':
        """Merge argparse flags over FRACPLAP_* environment defaults."""
        spec = QuadratureSpec.from_env()
        pv_eps = getattr(args, 'pv_epsilons', None)
        spec = spec.replace(
            rel_tol=getattr(args, 'rel_tol', None),
            abs_tol=getattr(args, 'abs_tol', None),
            max_subdivisions=getattr(args, 'max_subdivisions', None),
            pv_epsilons=tuple(parse_float_list(pv_eps)) if pv_eps else None,
            dual_path=True if getattr(args, 'dual_path', False) else None,
        )

        params = None
        if getattr(args, 'N', None) is not None:
            params = FracParams(N=args.N, s=args.s, p=args.p)

        threads = getattr(args, 'threads', None)
        if threads is None:
            threads = _env_int('FRACPLAP_THREADS', 0)

        perturb = os.getenv('FRACPLAP_PERTURB_PS', 'false').lower() == 'true'

        return cls(
            command=args.command,
            params=params,
            spec=spec,
            output_format=getattr(args, 'format', None) or default_format,
            output_path=getattr(args, 'output', None),
            threads=threads,
            perturb_ps=perturb,
            log_level=getattr(args, 'log_level', None) or os.getenv('FRACPLAP_LOG_LEVEL', 'WARNING'),
        )

    def to_dict(self) -> Dict:
        return {
            'command': self.command,
            'params': None if self.params is None else self.params.to_dict(),
            'quadrature': self.spec.to_dict(),
            'format': self.output_format,
            'output': self.output_path,
            'threads': self.threads,
            'perturb_ps': self.perturb_ps,
        }


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        return int(raw)
    except ValueError:
        raise DomainError(f"{name} must be an integer, got: {raw!r}")
