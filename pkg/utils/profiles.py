"""
Radial Profiles
Piecewise radial functions (power, log, constant, shifted power, smooth
cutoff pieces) with cancellation-free increments for the operator integrands
"""

import bisect
import logging
import math
from dataclasses import dataclass, replace
from typing import ClassVar, Dict, List, Optional, Sequence, Tuple

from models import FracParams, QuadratureSpec
from utils.errors import DomainError
from utils.quadrature import integrate_adaptive, integrate_endpoint_singular

logger = logging.getLogger(__name__)

CONTINUITY_TOL = 1e-12


def smooth_step(t: float) -> float:
    """
    C-infinity cutoff: 1 on [0, 1/2], 0 on [1, inf),
    e(2 - 2t) / (e(2 - 2t) + e(2t - 1)) in between, e(x) = exp(-1/x).
    """
    if t <= 0.5:
        return 1.0
    if t >= 1.0:
        return 0.0
    return 1.0 / (1.0 + math.exp(_step_phase(t)))


def _step_phase(t: float) -> float:
    # log(e(2t-1) / e(2-2t)) on (1/2, 1)
    return -1.0 / (2.0 * t - 1.0) + 1.0 / (2.0 - 2.0 * t)


@dataclass(frozen=True)
class ProfilePiece:
    """One analytic piece of a radial profile."""

    kind: ClassVar[str] = 'Piece'
    closed_form: ClassVar[bool] = False

    def value(self, r: float) -> float:
        raise NotImplementedError

    def increment(self, r: float, ell: float) -> float:
        """f(r) - f(r e^ell)"""
        return self.value(r) - self.value(r * math.exp(ell))

    def second_difference(self, r: float, ell: float) -> float:
        """2 f(r) - f(r e^ell) - f(r e^-ell)"""
        return self.increment(r, ell) + self.increment(r, -ell)

    @property
    def origin_exponent(self) -> float:
        return 0.0

    @property
    def growth_exponent(self) -> float:
        return 0.0

    def scaled(self, c: float) -> 'ProfilePiece':
        raise NotImplementedError

    def shifted(self, c: float) -> 'ProfilePiece':
        raise NotImplementedError

    def to_dict(self) -> Dict:
        data = {'kind': self.kind}
        data.update(self.__dict__)
        return data


@dataclass(frozen=True)
class Power(ProfilePiece):
    """coeff * r^beta + offset"""

    coeff: float
    beta: float
    offset: float = 0.0

    kind: ClassVar[str] = 'Power'
    closed_form: ClassVar[bool] = True

    def value(self, r: float) -> float:
        if r == 0.0:
            if self.beta > 0:
                return self.offset
            if self.beta == 0:
                return self.coeff + self.offset
            return math.copysign(math.inf, self.coeff)
        return self.coeff * r ** self.beta + self.offset

    def increment(self, r: float, ell: float) -> float:
        return -self.coeff * r ** self.beta * math.expm1(self.beta * ell)

    def second_difference(self, r: float, ell: float) -> float:
        half = math.sinh(0.5 * self.beta * ell)
        return -self.coeff * r ** self.beta * 4.0 * half * half

    @property
    def origin_exponent(self) -> float:
        return self.beta if self.coeff != 0 else 0.0

    @property
    def growth_exponent(self) -> float:
        return self.beta if self.coeff != 0 else 0.0

    def scaled(self, c: float) -> 'Power':
        return replace(self, coeff=c * self.coeff, offset=c * self.offset)

    def shifted(self, c: float) -> 'Power':
        return replace(self, offset=self.offset + c)


@dataclass(frozen=True)
class Log(ProfilePiece):
    """coeff * log r + offset"""

    coeff: float
    offset: float = 0.0

    kind: ClassVar[str] = 'Log'
    closed_form: ClassVar[bool] = True

    def value(self, r: float) -> float:
        if r == 0.0:
            return math.copysign(math.inf, -self.coeff)
        return self.coeff * math.log(r) + self.offset

    def increment(self, r: float, ell: float) -> float:
        return -self.coeff * ell

    def second_difference(self, r: float, ell: float) -> float:
        return 0.0

    def scaled(self, c: float) -> 'Log':
        return replace(self, coeff=c * self.coeff, offset=c * self.offset)

    def shifted(self, c: float) -> 'Log':
        return replace(self, offset=self.offset + c)


@dataclass(frozen=True)
class Constant(ProfilePiece):
    c: float

    kind: ClassVar[str] = 'Constant'
    closed_form: ClassVar[bool] = True

    def value(self, r: float) -> float:
        return self.c

    def increment(self, r: float, ell: float) -> float:
        return 0.0

    def second_difference(self, r: float, ell: float) -> float:
        return 0.0

    def scaled(self, c: float) -> 'Constant':
        return Constant(c * self.c)

    def shifted(self, c: float) -> 'Constant':
        return Constant(self.c + c)


@dataclass(frozen=True)
class ShiftedPower(ProfilePiece):
    """coeff * (shift + r)^exponent + offset"""

    coeff: float
    exponent: float
    shift: float = 1.0
    offset: float = 0.0

    kind: ClassVar[str] = 'ShiftedPower'
    closed_form: ClassVar[bool] = True

    def __post_init__(self):
        if not self.shift > 0:
            raise DomainError(f"ShiftedPower needs shift > 0, got: {self.shift}")

    def value(self, r: float) -> float:
        return self.coeff * (self.shift + r) ** self.exponent + self.offset

    def increment(self, r: float, ell: float) -> float:
        base = self.shift + r
        return -self.coeff * base ** self.exponent * math.expm1(
            self.exponent * math.log1p(r * math.expm1(ell) / base))

    @property
    def growth_exponent(self) -> float:
        return self.exponent if self.coeff != 0 else 0.0

    def scaled(self, c: float) -> 'ShiftedPower':
        return replace(self, coeff=c * self.coeff, offset=c * self.offset)

    def shifted(self, c: float) -> 'ShiftedPower':
        return replace(self, offset=self.offset + c)


@dataclass(frozen=True)
class SmoothCutoff(ProfilePiece):
    """amplitude * mu(r / radius) + offset, mu the smooth step"""

    amplitude: float
    radius: float
    offset: float = 0.0

    kind: ClassVar[str] = 'SmoothCutoff'

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError(f"SmoothCutoff needs radius > 0, got: {self.radius}")

    def value(self, r: float) -> float:
        return self.amplitude * smooth_step(r / self.radius) + self.offset

    def increment(self, r: float, ell: float) -> float:
        t1 = r / self.radius
        t2 = t1 * math.exp(ell)
        inside1 = 0.5 < t1 < 1.0
        inside2 = 0.5 < t2 < 1.0
        if not (inside1 and inside2):
            return self.amplitude * (smooth_step(t1) - smooth_step(t2))
        # logistic form: mu(t1) - mu(t2) from the phase difference, without cancellation
        dt = t1 * math.expm1(ell)
        phase1 = _step_phase(t1)
        dphase = 2.0 * dt / ((2.0 * t1 - 1.0) * (2.0 * t2 - 1.0)) \
            + 2.0 * dt / ((2.0 - 2.0 * t1) * (2.0 - 2.0 * t2))
        phase2 = phase1 + dphase
        if phase1 > 0:
            # mu = e^-phase / (1 + e^-phase)
            num = math.exp(-phase1) * -math.expm1(-dphase)
            den = (1.0 + math.exp(-phase1)) * (1.0 + math.exp(-phase2))
        else:
            num = math.exp(phase1) * math.expm1(dphase)
            den = (1.0 + math.exp(phase1)) * (1.0 + math.exp(phase2))
        return self.amplitude * num / den

    def scaled(self, c: float) -> 'SmoothCutoff':
        return replace(self, amplitude=c * self.amplitude, offset=c * self.offset)

    def shifted(self, c: float) -> 'SmoothCutoff':
        return replace(self, offset=self.offset + c)


PIECE_KINDS = {cls.kind: cls for cls in (Power, Log, Constant, ShiftedPower, SmoothCutoff)}


@dataclass(frozen=True)
class RadialProfile:
    """
    Piecewise radial function: pieces[i] = (breakpoint_start, piece), the
    last piece extending to infinity. Breakpoints start at 0, increase
    strictly, and the profile is continuous across them.
    """

    pieces: Tuple[Tuple[float, ProfilePiece], ...]
    name: str = 'profile'

    def __post_init__(self):
        pieces = tuple((float(start), piece) for start, piece in self.pieces)
        if not pieces:
            raise DomainError("a profile needs at least one piece")
        if pieces[0][0] != 0.0:
            raise DomainError(f"first breakpoint must be 0, got: {pieces[0][0]}")
        starts = [start for start, _ in pieces]
        for left, right in zip(starts, starts[1:]):
            if not right > left:
                raise DomainError(f"breakpoints must increase strictly, got {left} then {right}")
        for i in range(1, len(pieces)):
            b = pieces[i][0]
            left = pieces[i - 1][1].value(b)
            right = pieces[i][1].value(b)
            scale = max(1.0, abs(left), abs(right))
            if not abs(left - right) < CONTINUITY_TOL * scale:
                raise DomainError(
                    f"profile '{self.name}' is discontinuous at r={b}: {left!r} vs {right!r} "
                    f"({pieces[i - 1][1].kind} -> {pieces[i][1].kind})",
                    breakpoint=b
                )
        object.__setattr__(self, 'pieces', pieces)

    @property
    def starts(self) -> List[float]:
        return [start for start, _ in self.pieces]

    @property
    def breakpoints(self) -> List[float]:
        """Interior breakpoints (excludes the leading 0)."""
        return self.starts[1:]

    def piece_index(self, r: float) -> int:
        return bisect.bisect_right(self.starts, r) - 1

    def piece_at(self, r: float) -> ProfilePiece:
        return self.pieces[self.piece_index(r)][1]

    def __call__(self, r: float) -> float:
        return profile_eval(self, r)

    @property
    def origin_exponent(self) -> float:
        return self.pieces[0][1].origin_exponent

    @property
    def growth_exponent(self) -> float:
        return self.pieces[-1][1].growth_exponent

    def scaled(self, c: float) -> 'RadialProfile':
        return RadialProfile(tuple((b, piece.scaled(c)) for b, piece in self.pieces), name=self.name)

    def shifted(self, c: float) -> 'RadialProfile':
        return RadialProfile(tuple((b, piece.shifted(c)) for b, piece in self.pieces), name=self.name)

    def to_dict(self) -> Dict:
        return {
            'name': self.name,
            'pieces': [dict(start=b, **piece.to_dict()) for b, piece in self.pieces],
        }

    def __repr__(self):
        kinds = ', '.join(f'{b:g}:{piece.kind}' for b, piece in self.pieces)
        return f'<RadialProfile {self.name} [{kinds}]>'


def profile_eval(f: RadialProfile, r: float) -> float:
    """
    Pointwise value f(r), piece found by binary search on the breakpoints.

    A Log piece at r = 0 yields the -inf sentinel only for a pure log profile.

    Raises:
        DomainError: r < 0, or r = 0 on a profile whose log piece is not alone
    """
    if math.isnan(r) or r < 0:
        raise DomainError(f"profile_eval needs r >= 0, got: {r}", r=r)
    piece = f.piece_at(r)
    if r == 0.0 and isinstance(piece, Log) and len(f.pieces) > 1:
        raise DomainError(f"profile '{f.name}' has a log piece at r = 0")
    return piece.value(r)


def power_profile(beta: float, coeff: float = 1.0) -> RadialProfile:
    """v_beta = |x|^beta"""
    return RadialProfile(((0.0, Power(coeff, beta)),), name=f'power({beta:g})')


def log_profile(coeff: float = 1.0, offset: float = 0.0) -> RadialProfile:
    return RadialProfile(((0.0, Log(coeff, offset)),), name='log')


def constant_profile(c: float) -> RadialProfile:
    return RadialProfile(((0.0, Constant(c)),), name='constant')


def check_profile(f: RadialProfile, params: FracParams):
    """
    Admissibility of f for the operator: local integrability of
    |f|^(p-1) at the origin and the tail condition of L_s^{p-1}.

    Raises:
        DomainError: naming the offending piece
    """
    p1 = params.p - 1.0
    first = f.pieces[0][1]
    if first.origin_exponent * p1 <= -params.N:
        raise DomainError(
            f"profile '{f.name}': first piece {first.kind} has origin exponent "
            f"{first.origin_exponent} <= -N/(p-1)",
            piece=first.kind
        )
    last = f.pieces[-1][1]
    limit = params.sp / p1
    if not last.growth_exponent < limit:
        raise DomainError(
            f"profile '{f.name}': last piece {last.kind} grows like r^{last.growth_exponent}, "
            f"which needs exponent < ps/(p-1) = {limit:.12g}",
            piece=last.kind
        )


def tail_weight(f: RadialProfile, params: FracParams,
                spec: Optional[QuadratureSpec] = None) -> Tuple[float, float]:
    """
    |S^(N-1)| int_0^inf |f(t)|^(p-1) (1 + t)^(-N-sp) t^(N-1) dt, the weight of
    f in L_s^{p-1}. Finite for admissible profiles.

    Returns:
        (value, err_est)
    """
    from utils.kernel import sphere_area

    spec = spec or QuadratureSpec()
    check_profile(f, params)
    N, p1, sp = params.N, params.p - 1.0, params.sp

    def weight(t: float) -> float:
        return abs(profile_eval(f, t)) ** p1 * (1.0 + t) ** (-N - sp) * t ** (N - 1)

    lam0 = min(0.0, f.origin_exponent * p1 + N - 1)
    inner_points = [b for b in f.breakpoints if b < 1.0]
    if lam0 < 0:
        value_in, err_in = integrate_endpoint_singular(
            lambda t: weight(t) / t ** lam0, 0.0, 1.0, lam0, spec,
            endpoint='left', points=inner_points
        )
    else:
        value_in, err_in = integrate_adaptive(weight, 0.0, 1.0, spec, points=inner_points)

    # t = 1/u on [1, inf)
    lam_inf = min(0.0, sp - 1.0 - max(f.growth_exponent, 0.0) * p1)
    outer_points = [1.0 / b for b in f.breakpoints if b > 1.0]

    def tail(u: float) -> float:
        return weight(1.0 / u) / (u * u)

    if lam_inf < 0:
        value_out, err_out = integrate_endpoint_singular(
            lambda u: tail(u) / u ** lam_inf, 0.0, 1.0, lam_inf, spec,
            endpoint='left', points=outer_points
        )
    else:
        value_out, err_out = integrate_adaptive(tail, 0.0, 1.0, spec, points=outer_points)

    area = sphere_area(N)
    return area * (value_in + value_out), area * (err_in + err_out)
