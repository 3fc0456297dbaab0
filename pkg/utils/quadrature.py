"""
Quadrature Engine
Adaptive Gauss-Kronrod integration, endpoint-singular and near-singular
substitutions, and principal-value extrapolation over an epsilon schedule
"""

import heapq
import logging
import math
import sys
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from models import QuadratureSpec
from utils.errors import AccuracyError, DivergenceError, DomainError, IntegrandError

logger = logging.getLogger(__name__)

EPS = sys.float_info.epsilon

# Kronrod 15-point nodes (positive half, last is the center) and weights
XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
# Gauss 7-point weights on XGK[1], XGK[3], XGK[5], XGK[7]
WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)

_NODES = np.array([-x for x in XGK[:-1]] + [0.0] + list(reversed(XGK[:-1])))
_KRONROD = np.array(list(WGK[:-1]) + [WGK[-1]] + list(reversed(WGK[:-1])))
_GAUSS = np.zeros(15)
for _i, _w in zip((1, 3, 5), WG[:3]):
    _GAUSS[_i] = _w
    _GAUSS[14 - _i] = _w
_GAUSS[7] = WG[3]

ROUNDOFF_FLOOR = 50.0

Integrand = Callable[[float], float]


def _evaluate_nodes(f, a: float, b: float, vectorized: bool) -> np.ndarray:
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = center + half * _NODES
    if vectorized:
        values = np.asarray(f(x), dtype=float)
    else:
        values = np.array([f(float(xi)) for xi in x], dtype=float)
    finite = np.isfinite(values)
    if not finite.all():
        bad = float(x[np.argmin(finite)])
        raise IntegrandError(f"integrand is not finite at x={bad!r}", abscissa=bad)
    return values


def gauss_kronrod_15(f, a: float, b: float, vectorized: bool = False) -> Tuple[float, float]:
    """
    One G7/K15 panel.

    Returns:
        (K15 estimate, error estimate) where the error is the embedded
        difference |K15 - G7| with a round-off floor
    """
    values = _evaluate_nodes(f, a, b, vectorized)
    half = 0.5 * (b - a)
    kronrod = half * math.fsum(_KRONROD * values)
    gauss = half * math.fsum(_GAUSS * values)
    resabs = half * math.fsum(_KRONROD * np.abs(values))
    err = max(abs(kronrod - gauss), ROUNDOFF_FLOOR * EPS * resabs)
    return kronrod, err


def _tolerance(value: float, spec: QuadratureSpec) -> float:
    return max(spec.abs_tol, spec.rel_tol * abs(value))


def integrate_adaptive(f: Integrand, a: float, b: float, spec: Optional[QuadratureSpec] = None,
                       points: Optional[Sequence[float]] = None,
                       vectorized: bool = False) -> Tuple[float, float]:
    """
    Globally adaptive Gauss-Kronrod quadrature of f over [a, b].

    The panel with the largest error estimate is bisected until the total
    error meets max(abs_tol, rel_tol * |value|). Ties are broken by panel
    creation order so results are bitwise reproducible.

    Args:
        f: Integrand (takes a numpy array when vectorized=True)
        a: Lower limit
        b: Upper limit
        spec: Tolerances and subdivision budget
        points: Interior breakpoints to seed the initial panels
        vectorized: Evaluate all 15 nodes of a panel in one call

    Returns:
        (value, err_est)

    Raises:
        DomainError: a > b
        AccuracyError: subdivision budget exhausted (carries the best estimate)
        IntegrandError: f returned NaN or Inf
    """
    spec = spec or QuadratureSpec()
    if math.isnan(a) or math.isnan(b) or a > b:
        raise DomainError(f"integrate_adaptive needs a <= b, got [{a}, {b}]", a=a, b=b)
    if a == b:
        return 0.0, 0.0

    edges = [a]
    for x in sorted(set(points or ())):
        if a < x < b:
            edges.append(float(x))
    edges.append(b)

    heap = []
    frozen = []
    counter = 0
    for left, right in zip(edges, edges[1:]):
        value, err = gauss_kronrod_15(f, left, right, vectorized)
        heapq.heappush(heap, (-err, counter, left, right, value))
        counter += 1

    total = math.fsum(item[4] for item in heap)
    total_err = math.fsum(-item[0] for item in heap)

    while total_err > _tolerance(total, spec):
        if len(heap) + len(frozen) >= spec.max_subdivisions or not heap:
            logger.debug(f"adaptive quadrature budget exhausted on [{a}, {b}]: "
                         f"value={total!r}, err={total_err:.3e}")
            raise AccuracyError(
                f"quadrature on [{a}, {b}] did not reach tolerance within "
                f"{spec.max_subdivisions} panels (err_est={total_err:.3e})",
                value=total, err_est=total_err
            )
        neg_err, _, left, right, value = heapq.heappop(heap)
        mid = 0.5 * (left + right)
        if not (left < mid < right):
            frozen.append((left, right, value, -neg_err))
            continue
        value_l, err_l = gauss_kronrod_15(f, left, mid, vectorized)
        value_r, err_r = gauss_kronrod_15(f, mid, right, vectorized)
        heapq.heappush(heap, (-err_l, counter, left, mid, value_l))
        heapq.heappush(heap, (-err_r, counter + 1, mid, right, value_r))
        counter += 2

        total += (value_l + value_r) - value
        total_err = max(0.0, total_err + (err_l + err_r) + neg_err)

    # exact reduction in a fixed order
    total = math.fsum([item[4] for item in heap] + [item[2] for item in frozen])
    total_err = math.fsum([-item[0] for item in heap] + [item[3] for item in frozen])
    return total, total_err


def graded_points(length: float, n: int, exponent: float) -> List[float]:
    """Graded breakpoints length * (k/n)^exponent, k = 1..n-1."""
    return [length * (k / n) ** exponent for k in range(1, n)]


def integrate_endpoint_singular(f_regular: Integrand, a: float, b: float, lam: float,
                                spec: Optional[QuadratureSpec] = None, endpoint: str = 'right',
                                from_endpoint: bool = False,
                                points: Optional[Sequence[float]] = None) -> Tuple[float, float]:
    """
    Integral of f_regular(rho) * dist(rho)^lam over [a, b], where dist is the
    distance to the singular endpoint (b by default, a with endpoint='left').

    The substitution dist = t^(1/(1+lam)) turns the integrand into
    f_regular / (1 + lam), which is then integrated adaptively on a graded
    t-mesh.

    Args:
        f_regular: Bounded factor, continuous at the singular endpoint
        a: Lower limit
        b: Upper limit
        lam: Endpoint exponent, > -1
        spec: Quadrature policy
        endpoint: 'right' or 'left'
        from_endpoint: Pass the distance to the endpoint to f_regular instead of rho
        points: Interior kinks of f_regular in rho, mapped to t-space breakpoints

    Returns:
        (value, err_est)
    """
    spec = spec or QuadratureSpec()
    if math.isnan(lam) or lam <= -1.0:
        raise DomainError(f"endpoint exponent must be > -1 (integrable), got: {lam}", lam=lam)
    if endpoint not in ('right', 'left'):
        raise DomainError(f"endpoint must be 'right' or 'left', got: {endpoint!r}")
    if a > b:
        raise DomainError(f"integrate_endpoint_singular needs a <= b, got [{a}, {b}]", a=a, b=b)
    if a == b:
        return 0.0, 0.0

    q = 1.0 / (1.0 + lam)
    length = b - a
    t_max = length ** (1.0 + lam)
    scale = q

    def integrand(t: float) -> float:
        dist = min(t ** q, length)
        if from_endpoint:
            return scale * f_regular(dist)
        rho = b - dist if endpoint == 'right' else a + dist
        return scale * f_regular(rho)

    seeds = graded_points(t_max, spec.graded_panels, spec.grading_exponent)
    for x in points or ():
        if a < x < b:
            dist = b - x if endpoint == 'right' else x - a
            seeds.append(dist ** (1.0 + lam))
    return integrate_adaptive(integrand, 0.0, t_max, spec, points=seeds)


def integrate_near_singular(f: Integrand, a: float, b: float, c: float,
                            spec: Optional[QuadratureSpec] = None,
                            from_endpoint: bool = False) -> Tuple[float, float]:
    """
    Integral over [a, b] of f, steep near the excluded point c > b.

    Uses rho = c - e^v, which spreads the last decades before c evenly.
    With from_endpoint=True f receives the gap c - rho.
    """
    spec = spec or QuadratureSpec()
    if not (a <= b < c):
        raise DomainError(f"integrate_near_singular needs a <= b < c, got a={a}, b={b}, c={c}")
    if a == b:
        return 0.0, 0.0

    v_low = math.log(c - b)
    v_high = math.log(c - a)

    def integrand(v: float) -> float:
        gap = math.exp(v)
        return (f(gap) if from_endpoint else f(c - gap)) * gap

    n = max(1, int(math.ceil(v_high - v_low)))
    seeds = [v_low + (v_high - v_low) * k / n for k in range(1, n)]
    return integrate_adaptive(integrand, v_low, v_high, spec, points=seeds)


def _noise_level(values: Sequence[float], spec: QuadratureSpec) -> float:
    scale = max(abs(v) for v in values)
    return 10.0 * (spec.rel_tol * scale + spec.abs_tol) + 100.0 * EPS * scale


def aitken_table(values: Sequence[float], noise: float = 0.0) -> List[List[float]]:
    """
    Iterated Aitken delta-squared table; level k has len(values) - 2k entries.

    A second difference at or below `noise` means the column has settled and
    its last entry is carried over.
    """
    table = [list(values)]
    while len(table[-1]) >= 3:
        level = table[-1]
        nxt = []
        for x0, x1, x2 in zip(level, level[1:], level[2:]):
            d1 = x1 - x0
            d2 = x2 - x1
            denom = d2 - d1
            if abs(denom) <= noise or denom == 0.0:
                nxt.append(x2)
            else:
                nxt.append(x2 - d2 * d2 / denom)
        table.append(nxt)
    return table


def pv_limit(J: Callable[[float], float], spec: Optional[QuadratureSpec] = None) -> Tuple[float, float]:
    """
    Limit of J(eps) as eps -> 0+ over the pv_epsilons schedule.

    Each Aitken level is a Richardson step with the exponent estimated from
    the data, so the unknown rates eps^gamma and eps log eps are both
    handled. err_est is the spread of the last two extrapolants, floored at
    the round-off of the table.

    Raises:
        DivergenceError: the table increments grow (carries the table)
    """
    spec = spec or QuadratureSpec()
    eps_list = spec.pv_epsilons
    values = [float(J(eps)) for eps in eps_list]
    table_rows = list(zip(eps_list, values))
    logger.debug(f"pv_limit table: {table_rows}")

    if not all(math.isfinite(v) for v in values):
        raise DivergenceError("principal value table contains non-finite entries", table=table_rows)

    noise = _noise_level(values, spec)
    increments = [abs(v1 - v0) for v0, v1 in zip(values, values[1:])]
    if increments[-1] > noise and increments[-1] > increments[-2] and increments[-2] > noise:
        raise DivergenceError(
            f"principal value does not settle: last increments {increments[-2]:.3e} -> {increments[-1]:.3e}",
            table=table_rows
        )

    table = aitken_table(values, noise)
    extrapolants = [level[-1] for level in table if level]
    value = extrapolants[-1]
    spread = abs(extrapolants[-1] - extrapolants[-2]) if len(extrapolants) > 1 else increments[-1]
    roundoff = 100.0 * EPS * max(abs(v) for v in values)
    return value, max(spread, roundoff)
