#!/usr/bin/env python3
"""
Tests for the fundamental-solution constants
C(beta) values, sign chart, zeros and the h/g splitting of J_eps
"""

import math
import sys
sys.path.insert(0, '.')

import pytest

from models import FracParams, Sign
from utils.errors import DomainError
from utils.fundamental import (BORDERLINE, FAST, SLOW, c_beta, c_beta_sign, c_beta_sweep, c_beta_zeros,
                               g_beta_eps, g_log_eps, h_beta_eps, remainder_decay_order, remainder_regime,
                               rhs_exponent)
from utils.kernel import get_evaluator
from utils.profiles import power_profile
from utils.radial_operator import frac_plap_radial_Jeps

SUBCRITICAL = FracParams(3, 0.5, 2.0)      # beta* = -2, admissible (-3, 1)
SUPERCRITICAL = FracParams(2, 0.9, 5.0)    # beta* = 0.625
LOG_CASE = FracParams(2, 0.5, 4.0)


def test_c_beta_exact_zeros():
    print("Test: C(0) and C(beta*)")
    print("-" * 60)
    at_zero = c_beta(SUBCRITICAL, 0.0)
    assert at_zero.value == 0.0 and at_zero.err_est == 0.0
    assert at_zero.predicted_sign is Sign.ZERO
    at_star = c_beta(SUBCRITICAL, SUBCRITICAL.beta_star)
    assert at_star.value == 0.0
    assert at_star.predicted_sign is Sign.ZERO
    assert at_star.rhs_exponent == pytest.approx(-SUBCRITICAL.N)
    print("  ✅ PASS")


def test_rhs_exponent():
    assert rhs_exponent(SUBCRITICAL, -1.0) == pytest.approx(-2.0)
    assert rhs_exponent(SUPERCRITICAL, 0.3) == pytest.approx(0.3 * 4.0 - 4.5)


@pytest.mark.parametrize('params,beta,expected', [
    (SUBCRITICAL, -1.0, Sign.POSITIVE),
    (SUBCRITICAL, -2.5, Sign.NEGATIVE),
    (SUBCRITICAL, 0.5, Sign.NEGATIVE),
    (SUPERCRITICAL, 0.3, Sign.POSITIVE),
    (SUPERCRITICAL, -0.2, Sign.NEGATIVE),
    (SUPERCRITICAL, 0.8, Sign.NEGATIVE),
])
def test_sign_chart(params, beta, expected):
    """Predicted sign and the sign of the computed value agree"""
    assert c_beta_sign(params, beta) is expected
    result = c_beta(params, beta)
    assert result.computed_sign is expected
    assert result.sign_matches
    assert result.err_est < 1e-4 * abs(result.value)


def test_c_beta_domain_errors():
    print("Test: c_beta domain errors")
    print("-" * 60)
    with pytest.raises(DomainError):
        c_beta(SUBCRITICAL, 1.0)
    with pytest.raises(DomainError):
        c_beta(SUBCRITICAL, -3.5)
    with pytest.raises(DomainError) as info:
        c_beta(LOG_CASE, -0.5)
    assert 'log' in info.value.message
    print("  ✅ PASS")


def test_c_beta_zeros():
    print("Test: zeros of C(beta)")
    print("-" * 60)
    low, high = c_beta_zeros(SUBCRITICAL)
    assert low == pytest.approx(-2.0, abs=1e-8)
    assert high == pytest.approx(0.0, abs=1e-8)
    low, high = c_beta_zeros(SUPERCRITICAL)
    assert low == pytest.approx(0.0, abs=1e-8)
    assert high == pytest.approx(SUPERCRITICAL.beta_star, abs=1e-8)
    print(f"  zeros: {low!r}, {high!r}")
    print("  ✅ PASS")


def test_c_beta_perturbed_ps():
    """The perturbed kernel moves C(beta) by about the perturbation, and nothing more"""
    params = FracParams(2, 0.5, 2.0)           # ps = 1, log connection branch
    plain = c_beta(params, -0.5)
    shifted = c_beta(params, -0.5, perturb_ps=True)
    assert shifted.value != plain.value
    assert shifted.value == pytest.approx(plain.value, rel=1e-5)
    assert shifted.predicted_sign == plain.predicted_sign
    ke = get_evaluator(params, None, True)
    assert ke.kernel_sp > params.sp
    assert ke.h_limit != get_evaluator(params).h_limit
    # the exact zeros do not depend on the kernel
    assert c_beta(params, 0.0, perturb_ps=True).value == 0.0
    assert c_beta(params, params.beta_star, perturb_ps=True).value == 0.0


def test_c_beta_sweep_records_errors():
    results = c_beta_sweep(SUBCRITICAL, [-1.0, 5.0, -2.5], threads=2)
    assert [r.beta for r in results] == [-1.0, 5.0, -2.5]
    assert results[0].error is None and results[0].value > 0
    assert results[1].error.startswith('domain')
    assert math.isnan(results[1].value)
    assert results[1].predicted_sign is None
    assert results[1].computed_sign is None
    assert results[2].value < 0


def test_h_tends_to_c():
    """h_{beta,eps}(r) -> C(beta) as eps -> 0"""
    print("Test: h_beta_eps convergence")
    print("-" * 60)
    beta = -1.0
    constant = c_beta(SUBCRITICAL, beta).value
    gaps = []
    for eps in (1e-2, 1e-4, 1e-6):
        h, _ = h_beta_eps(SUBCRITICAL, beta, 1.0, eps)
        gaps.append(abs(h - constant))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[-1] < 1e-4 * abs(constant)
    print("  ✅ PASS")


def test_truncated_operator_splits_into_h_and_g():
    """J_eps |x|^beta (r) = h r^e - g"""
    beta, r, eps = -1.0, 1.5, 0.1
    ke = get_evaluator(SUBCRITICAL)
    J = frac_plap_radial_Jeps(power_profile(beta), r, eps, ke)
    h, _ = h_beta_eps(SUBCRITICAL, beta, r, eps)
    g, _ = g_beta_eps(SUBCRITICAL, beta, r, eps)
    expected = h * r ** rhs_exponent(SUBCRITICAL, beta) - g
    assert J.value == pytest.approx(expected, rel=1e-8)
    assert J.mode == 'truncated' and J.eps == eps


def test_h_g_domain_errors():
    with pytest.raises(DomainError):
        h_beta_eps(SUBCRITICAL, -1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        g_beta_eps(SUBCRITICAL, -1.0, 1.0, 0.0)
    with pytest.raises(DomainError):
        g_log_eps(SUBCRITICAL, 1.0, 0.1)
    value, err = g_log_eps(LOG_CASE, 1.0, 0.1)
    assert math.isfinite(value) and err >= 0


def test_remainder_regime():
    assert remainder_regime(FracParams(2, 0.5, 3.0)) == FAST
    assert remainder_regime(FracParams(2, 0.5, 1.5)) == SLOW
    assert remainder_regime(FracParams(2, 0.5, 2.0)) == BORDERLINE


def test_remainder_decay_order():
    """g_{beta,eps} decays like eps^(p(1-s))"""
    print("Test: remainder decay order")
    print("-" * 60)
    params = FracParams(3, 0.5, 3.0)
    result = remainder_decay_order(params, -1.0)
    print(f"  observed {result['order']:.4f}, predicted {result['predicted']:.4f}")
    assert result['predicted'] == pytest.approx(1.5)
    assert result['order'] == pytest.approx(result['predicted'], abs=0.05)
    assert result['regime'] == FAST
    assert len(result['table']) == 5
    print("  ✅ PASS")


def main():
    """Run all tests"""
    tests = [
        test_c_beta_exact_zeros,
        test_rhs_exponent,
        test_c_beta_domain_errors,
        test_c_beta_zeros,
        test_c_beta_perturbed_ps,
        test_c_beta_sweep_records_errors,
        test_h_tends_to_c,
        test_truncated_operator_splits_into_h_and_g,
        test_h_g_domain_errors,
        test_remainder_regime,
        test_remainder_decay_order,
    ]
    failures = 0
    for test in tests:
        try:
            test()
        except Exception as e:
            failures += 1
            print(f"  ❌ {test.__name__} FAILED: {e}")
    for params, beta, expected in [(SUBCRITICAL, -1.0, Sign.POSITIVE), (SUPERCRITICAL, 0.3, Sign.POSITIVE)]:
        try:
            test_sign_chart(params, beta, expected)
        except Exception as e:
            failures += 1
            print(f"  ❌ sign chart FAILED at beta={beta}: {e}")

    print()
    print("=" * 60)
    print("All Tests Passed! ✅" if failures == 0 else f"{failures} test(s) failed ❌")
    print("=" * 60)
    sys.exit(0 if failures == 0 else 1)


if __name__ == "__main__":
    main()
