#!/usr/bin/env python3
"""
Tests for the special functions
Gamma, Beta, digamma and 2F1 against mpmath and scipy.special
"""

import math
import sys
sys.path.insert(0, '.')

import mpmath
import pytest
from scipy import special

from models import FracParams, HyperParams, QuadratureSpec
from utils.errors import DomainError, RangeError
from utils.specfun import (G_eval, H_eval, H_from_gap, H_limit, H_prime_limit, beta_fn, digamma,
                           gamma_fn, hyp2f1, kernel_hyper_params, log_gamma, rgamma)

mpmath.mp.dps = 40


def rel(a, b):
    return abs(a - b) / abs(b)


def test_gamma_values():
    """Gamma at integers, half integers and through reflection"""
    print("Test: gamma_fn")
    print("-" * 60)
    assert gamma_fn(1.0) == pytest.approx(1.0, rel=1e-14)
    assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert gamma_fn(5.0) == pytest.approx(24.0, rel=1e-14)
    assert gamma_fn(-0.5) == pytest.approx(-2.0 * math.sqrt(math.pi), rel=1e-13)
    for x in (0.1, 1.7, 3.3, 12.5, 60.25, 170.5):
        assert rel(gamma_fn(x), float(mpmath.gamma(x))) < 1e-12, x
    print("  ✅ PASS")


def test_gamma_errors():
    print("Test: gamma_fn poles and overflow")
    print("-" * 60)
    for pole in (0.0, -1.0, -7.0):
        with pytest.raises(DomainError):
            gamma_fn(pole)
    with pytest.raises(RangeError) as info:
        gamma_fn(172.0)
    assert info.value.threshold == pytest.approx(171.6243769563027)
    assert rgamma(-3.0) == 0.0
    assert rgamma(200.0) == pytest.approx(float(mpmath.rgamma(200)), rel=1e-12)
    print("  ✅ PASS")


def test_log_gamma_and_beta():
    print("Test: log_gamma and beta_fn")
    print("-" * 60)
    for x in (0.25, 1.5, 40.0, 500.0):
        assert log_gamma(x) == pytest.approx(float(mpmath.loggamma(x)), rel=1e-13, abs=1e-14)
    assert beta_fn(1.0, 1.0) == pytest.approx(1.0, rel=1e-14)
    assert beta_fn(0.5, 0.5) == pytest.approx(math.pi, rel=1e-14)
    assert beta_fn(2.0, 3.0) == pytest.approx(1.0 / 12.0, rel=1e-14)
    assert beta_fn(0.3, 4.7) == pytest.approx(special.beta(0.3, 4.7), rel=1e-12)
    with pytest.raises(DomainError):
        beta_fn(0.0, 1.0)
    print("  ✅ PASS")


def test_digamma():
    print("Test: digamma")
    print("-" * 60)
    for x in (-2.5, 0.3, 1.0, 2.5, 9.99, 12.0, 100.0):
        assert digamma(x) == pytest.approx(float(mpmath.digamma(x)), rel=1e-12, abs=1e-13), x
    with pytest.raises(DomainError):
        digamma(-2.0)
    print("  ✅ PASS")


def test_hyp2f1_identities():
    """Closed forms of 2F1 on both branches"""
    print("Test: hyp2f1 identities")
    print("-" * 60)
    assert hyp2f1(HyperParams(2.5, 1.5, 3.0), 0.0) == 1.0
    assert hyp2f1(HyperParams(1.0, 1.0, 2.0), 0.5) == pytest.approx(2.0 * math.log(2.0), rel=1e-14)
    # F(a, b; b; t) = (1 - t)^-a
    assert hyp2f1(HyperParams(1.5, 2.3, 2.3), 0.2) == pytest.approx(0.8 ** -1.5, rel=1e-13)
    assert hyp2f1(HyperParams(2.5, 1.5, 1.5), 0.9) == pytest.approx(0.1 ** -2.5, rel=1e-10)
    # -log(1 - t)/t, c - a - b = 0 (logarithmic branch, m = 0)
    assert hyp2f1(HyperParams(1.0, 1.0, 2.0), 0.99) == pytest.approx(-math.log(0.01) / 0.99, rel=1e-12)
    with pytest.raises(DomainError):
        hyp2f1(HyperParams(1.0, 1.0, 2.0), 1.0)
    print("  ✅ PASS")


@pytest.mark.parametrize('N,s,p', [(2, 0.5, 2.0), (3, 0.5, 2.0), (2, 0.75, 4.0), (2, 0.9, 5.0),
                                   (3, 0.3, 1.5), (4, 0.6, 2.5)])
def test_G_against_mpmath(N, s, p):
    """G(t) on the series and connection branches, integer and non-integer c - a - b"""
    params = FracParams(N, s, p)
    hp = kernel_hyper_params(params)
    B = float(mpmath.beta((N - 1) / 2.0, 0.5))
    for t in (0.0, 0.1, 0.45, 0.55, 0.81, 0.95, 0.999):
        expected = B * float(mpmath.hyp2f1(hp.a, hp.b, hp.c, t))
        assert rel(G_eval(t, params), expected) < 1e-10, (t, params)


def test_G_closed_forms():
    print("Test: G closed forms")
    print("-" * 60)
    assert G_eval(0.0, FracParams(2, 0.5, 2.0)) == pytest.approx(math.pi, rel=1e-14)
    # N = 3, ps = 1: F(2, 3/2; 3/2; t) = (1 - t)^-2 and B(1, 1/2) = 2
    assert G_eval(0.81, FracParams(3, 0.5, 2.0)) == pytest.approx(2.0 / 0.19 ** 2, rel=1e-12)
    with pytest.raises(DomainError):
        G_eval(1.0, FracParams(2, 0.5, 2.0))
    print("  ✅ PASS")


def test_perturbed_ps_branch():
    """The perturbed non-log branch agrees with the log branch to the perturbation size"""
    params = FracParams(2, 0.5, 2.0)
    for t in (0.6, 0.9, 0.99):
        assert rel(G_eval(t, params, perturb_ps=True), G_eval(t, params)) < 1e-5
    # ps = 1 sits exactly on the log branch; the shift has to leave it
    hp = kernel_hyper_params(params, perturb_ps=True)
    gap = hp.c - hp.a - hp.b
    assert abs(gap - round(gap)) > 1e-9
    assert kernel_hyper_params(params) == HyperParams.from_params(params)
    assert H_limit(params, perturb_ps=True) != H_limit(params)
    assert rel(H_limit(params, perturb_ps=True), H_limit(params)) < 1e-7
    assert rel(H_eval(0.999, params, perturb_ps=True), H_eval(0.999, params)) < 1e-5


@pytest.mark.parametrize('N,s,p', [(2, 0.5, 2.0), (3, 0.5, 2.0), (2, 0.75, 4.0), (3, 0.4, 2.5)])
def test_H_regularization(N, s, p):
    """H(1 - 10^-k) settles on the connection-formula limit"""
    params = FracParams(N, s, p)
    limit = H_limit(params)
    assert limit > 0
    values = [H_eval(1.0 - 10.0 ** -k, params) for k in range(2, 9)]
    increments = [abs(b - a) for a, b in zip(values, values[1:])]
    assert increments[-1] < 1e-4 * abs(limit)
    assert abs(values[-1] - limit) < 1e-6 * abs(limit)
    assert H_eval(1.0, params) == limit
    assert H_eval(0.0, params) == pytest.approx(G_eval(0.0, params), rel=1e-14)


def test_H_from_gap_matches_direct():
    """Connection form of H against (1 - rho)^(1+ps) G(rho^2) in mpmath"""
    params = FracParams(2, 0.5, 3.0)
    hp = kernel_hyper_params(params)
    B = mpmath.beta(0.5, 0.5)
    for d in (0.5, 0.2, 1e-2, 1e-4):
        rho = 1 - mpmath.mpf(d)
        expected = float(d ** mpmath.mpf(1 + params.sp) * B * mpmath.hyp2f1(hp.a, hp.b, hp.c, rho * rho))
        assert rel(H_from_gap(d, params), expected) < 1e-10, d


def test_H_prime_limit():
    print("Test: lim H'(rho) at 1")
    print("-" * 60)
    params = FracParams(2, 0.5, 2.0)
    slope, err = H_prime_limit(params, QuadratureSpec())
    h = 1e-4
    quotient = (H_limit(params) - H_eval(1.0 - h, params)) / h
    assert math.isfinite(slope)
    assert err < 1e-4 * max(1.0, abs(slope))
    assert abs(slope - quotient) < 1e-2 * max(1.0, abs(slope))
    print(f"  H'(1-) = {slope:.10g} ± {err:.1e}")
    print("  ✅ PASS")


def main():
    """Run all tests"""
    tests = [
        test_gamma_values,
        test_gamma_errors,
        test_log_gamma_and_beta,
        test_digamma,
        test_hyp2f1_identities,
        test_G_closed_forms,
        test_perturbed_ps_branch,
        test_H_from_gap_matches_direct,
        test_H_prime_limit,
    ]
    failures = 0
    for test in tests:
        try:
            test()
        except Exception as e:
            failures += 1
            print(f"  ❌ {test.__name__} FAILED: {e}")
    for N, s, p in [(2, 0.5, 2.0), (3, 0.5, 2.0), (2, 0.75, 4.0)]:
        try:
            test_G_against_mpmath(N, s, p)
            test_H_regularization(N, s, p)
        except Exception as e:
            failures += 1
            print(f"  ❌ G/H checks FAILED for ({N}, {s}, {p}): {e}")

    print()
    print("=" * 60)
    print("All Tests Passed! ✅" if failures == 0 else f"{failures} test(s) failed ❌")
    print("=" * 60)
    sys.exit(0 if failures == 0 else 1)


if __name__ == "__main__":
    main()
