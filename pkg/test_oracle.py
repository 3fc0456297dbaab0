#!/usr/bin/env python3
"""
Tests for the direct 2-D oracle
The hypergeometric main path against brute-force polar integration
"""

import sys
sys.path.insert(0, '.')

import pytest

from models import FracParams
from utils import oracle
from utils.errors import DomainError
from utils.fundamental import c_beta
from utils.kernel import get_evaluator
from utils.profiles import Constant, Power, RadialProfile
from utils.radial_operator import frac_plap_radial_pv


def cap_profile():
    return RadialProfile(((0.0, Constant(1.0)), (1.0, Power(1.0, -1.0))), name='cap')


def test_c_beta_matches_oracle():
    """C(beta) at N = 2 by both routes"""
    print("Test: c_beta vs c_beta_direct_2d")
    print("-" * 60)
    s, p, beta = 0.5, 3.0, -0.3
    main_path = c_beta(FracParams(2, s, p), beta).value
    direct, err = oracle.c_beta_direct_2d(s, p, beta)
    print(f"  main {main_path!r}, oracle {direct!r} ± {err:.1e}")
    assert direct == pytest.approx(main_path, rel=1e-3)
    print("  ✅ PASS")


def test_piecewise_profile_matches_oracle():
    s, p = 0.5, 3.0
    cap = cap_profile()
    ke = get_evaluator(FracParams(2, s, p))
    folded = frac_plap_radial_pv(cap, 2.0, ke).value
    direct, _ = oracle.operator_direct_2d(cap, 2.0, s, p)
    assert direct == pytest.approx(folded, rel=1e-3)


def test_oracle_trivial_and_domain_cases():
    assert oracle.c_beta_direct_2d(0.5, 2.0, 0.0) == (0.0, 0.0)
    with pytest.raises(DomainError):
        oracle.c_beta_direct_2d(0.5, 4.0, -0.5)
    with pytest.raises(DomainError):
        oracle.c_beta_direct_2d(0.5, 2.0, 1.5)
    with pytest.raises(DomainError):
        oracle.operator_direct_2d(cap_profile(), 0.0, 0.5, 3.0)


def test_oracle_is_independent_of_the_closed_form():
    """The oracle never reaches the hypergeometric kernel"""
    assert not hasattr(oracle, 'K_eval')
    assert not hasattr(oracle, 'hyp2f1')
    assert not hasattr(oracle, 'G_eval')


def main():
    """Run all tests"""
    tests = [
        test_c_beta_matches_oracle,
        test_piecewise_profile_matches_oracle,
        test_oracle_trivial_and_domain_cases,
        test_oracle_is_independent_of_the_closed_form,
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
