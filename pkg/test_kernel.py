#!/usr/bin/env python3
"""
Tests for the angular kernel
Closed form against theta quadrature, reflection law and the shell integrals
"""

import math
import sys
sys.path.insert(0, '.')

import mpmath
import pytest

from models import FracParams
from utils.errors import DomainError
from utils.kernel import (KernelEvaluator, K_eval, K_theta, alpha_N, ball_integral, get_evaluator,
                          psi_p, sphere_area)
from utils.specfun import G_eval, beta_fn

PARAMETER_SETS = [FracParams(2, 0.5, 2.0), FracParams(3, 0.5, 2.0), FracParams(2, 0.75, 4.0)]
RHO_GRID = [0.1 * k for k in range(1, 10)]


def test_alpha_and_sphere():
    print("Test: alpha_N and sphere areas")
    print("-" * 60)
    assert alpha_N(2) == pytest.approx(1.0 / math.pi, rel=1e-14)
    assert alpha_N(3) == pytest.approx(1.0, rel=1e-14)
    assert alpha_N(4) == pytest.approx(2.0, rel=1e-14)
    for N in (2, 3, 4, 5):
        # 2 pi alpha_N is the area of S^(N-2)
        assert 2.0 * math.pi * alpha_N(N) == pytest.approx(sphere_area(N - 1), rel=1e-13)
    assert sphere_area(2) == pytest.approx(4.0 * math.pi, rel=1e-14)
    with pytest.raises(DomainError):
        alpha_N(1)
    print("  ✅ PASS")


def test_psi_p():
    assert psi_p(0.0, 3.0) == 0.0
    assert psi_p(2.0, 3.0) == pytest.approx(4.0)
    assert psi_p(-2.0, 3.0) == pytest.approx(-4.0)
    assert psi_p(-0.25, 1.5) == pytest.approx(-0.5)


def test_K_theta_at_zero():
    for params in PARAMETER_SETS:
        expected = beta_fn((params.N - 1) / 2.0, 0.5)
        assert K_theta(0.0, params) == pytest.approx(expected, rel=1e-12)


def test_K_dual_path():
    """Closed form K against theta quadrature on rho = 0.1..0.9"""
    print("Test: K_eval vs K_theta")
    print("-" * 60)
    worst = 0.0
    for params in PARAMETER_SETS:
        ke = KernelEvaluator(params)
        for rho in RHO_GRID:
            closed = K_eval(rho, ke)
            direct = K_theta(rho, params)
            worst = max(worst, abs(closed - direct) / abs(direct))
    print(f"  max relative difference: {worst:.2e}")
    assert worst < 1e-8
    print("  ✅ PASS")


def test_K_reflection():
    """K(1/rho) = rho^(N+ps) K(rho)"""
    for params in PARAMETER_SETS:
        ke = get_evaluator(params)
        power = params.N + params.sp
        for rho in (0.2, 0.5, 0.9):
            assert K_eval(1.0 / rho, ke) == pytest.approx(rho ** power * K_eval(rho, ke), rel=1e-9)
            assert K_theta(1.0 / rho, params) == pytest.approx(rho ** power * K_theta(rho, params), rel=1e-9)


def test_K_branches():
    print("Test: K branch formula")
    print("-" * 60)
    params = FracParams(3, 0.5, 2.0)
    ke = get_evaluator(params)
    assert K_eval(0.0, ke) == pytest.approx(G_eval(0.0, params), rel=1e-15)
    assert K_eval(3.0, ke) == pytest.approx(G_eval(1.0 / 9.0, params) / 3.0 ** (params.N + params.sp), rel=1e-14)
    assert K_eval(0.9, ke) == pytest.approx(K_theta(0.9, params), rel=1e-8)
    assert K_eval(2.0, get_evaluator(FracParams(2, 0.5, 2.0))) == pytest.approx(
        2.0 ** -3 * K_theta(0.5, FracParams(2, 0.5, 2.0)), rel=1e-9)
    for bad in (1.0, -0.5, math.nan):
        with pytest.raises(DomainError):
            K_eval(bad, ke)
    with pytest.raises(DomainError):
        K_theta(1.0, params)
    print("  ✅ PASS")


def test_G_at_quarter_matches_theta():
    params = FracParams(2, 0.5, 2.0)
    assert G_eval(0.25, params) == pytest.approx(K_theta(0.5, params), rel=1e-9)


def test_evaluator_cache_and_H():
    params = FracParams(2, 0.5, 3.0)
    ke = get_evaluator(params)
    assert get_evaluator(params) is ke
    assert ke.radial_factor == pytest.approx(4.0, rel=1e-14)
    assert ke.H(1.0) == ke.h_limit
    assert ke.H(0.0) == pytest.approx(math.pi, rel=1e-14)
    for d in (0.3, 1e-3):
        assert ke.G_sq_from_gap(d) == pytest.approx(ke.G((1.0 - d) ** 2), rel=1e-9)
    assert 'N=2' in repr(ke)


def test_ball_integral_outer_shell():
    """Shell |y| > 2 around x = e_1 in R^3 against the 1-D shell formula in mpmath"""
    print("Test: ball_integral")
    print("-" * 60)
    params = FracParams(3, 0.5, 2.0)
    ke = get_evaluator(params)
    value, err = ball_integral(ke, lambda t: 1.0, 1.0, 2.0, math.inf)
    m = 1.0 + params.sp
    mpmath.mp.dps = 30
    expected = 2.0 * math.pi / m * float(mpmath.quad(lambda t: t * ((t - 1) ** -m - (t + 1) ** -m),
                                                      [2, 10, mpmath.inf]))
    assert value == pytest.approx(expected, rel=1e-8)
    assert err < 1e-8 * abs(value)
    print("  ✅ PASS")


def test_ball_integral_inner_shell():
    """Ball |y| < 1/2 around |x| = 1 in R^3 against the 1-D shell formula"""
    params = FracParams(3, 0.5, 2.0)
    ke = get_evaluator(params)
    value, _ = ball_integral(ke, lambda t: t, 1.0, 0.0, 0.5)
    m = 1.0 + params.sp
    mpmath.mp.dps = 30
    # int_0^(1/2) t * t^2 * (2 pi / (t m)) [(1 - t)^-m - (1 + t)^-m] dt
    expected = 2.0 * math.pi / m * float(mpmath.quad(lambda t: t * t * ((1 - t) ** -m - (1 + t) ** -m),
                                                      [0, 0.5]))
    assert value == pytest.approx(expected, rel=1e-8)
    with pytest.raises(DomainError):
        ball_integral(ke, lambda t: 1.0, 1.0, 0.5, 2.0)


def main():
    """Run all tests"""
    tests = [
        test_alpha_and_sphere,
        test_psi_p,
        test_K_theta_at_zero,
        test_K_dual_path,
        test_K_reflection,
        test_K_branches,
        test_G_at_quarter_matches_theta,
        test_evaluator_cache_and_H,
        test_ball_integral_outer_shell,
        test_ball_integral_inner_shell,
    ]
    failures = 0
    for test in tests:
        try:
            test()
        except Exception as e:
            failures += 1
            print(f"  ❌ {test.__name__} FAILED: {e}")

    print()
    print("=" * 60)
    print("All Tests Passed! ✅" if failures == 0 else f"{failures} test(s) failed ❌")
    print("=" * 60)
    sys.exit(0 if failures == 0 else 1)


if __name__ == "__main__":
    main()
