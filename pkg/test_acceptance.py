#!/usr/bin/env python3
"""
End-to-end checks at the published parameter sets
Zeros and sign chart of C(beta), the fundamental and log identities,
kernel paths, the oracle, scaling laws and the barrier families
"""

import math
import sys
sys.path.insert(0, '.')

import pytest

from models import PASS, FracParams
from utils import oracle
from utils.barriers import (LE, barrier_sign_check, cutoff_scaling_check, make_phi_eps, make_theta_eps,
                            phi_eps_threshold, supercritical_check, theta_eps_threshold)
from utils.fundamental import c_beta, c_beta_sweep, rhs_exponent
from utils.kernel import K_eval, K_theta, get_evaluator
from utils.profiles import power_profile
from utils.radial_operator import frac_plap_radial_pv, verify_fundamental_identity, verify_log_harmonic
from utils.specfun import H_eval, H_limit

# (N, s, p) away from the log case, both regimes
MATRIX = [
    FracParams(3, 0.5, 2.0),
    FracParams(2, 0.75, 4.0),
    FracParams(2, 0.9, 5.0),
    FracParams(2, 0.5, 3.0),
    FracParams(3, 0.5, 3.0),
    FracParams(2, 0.75, 1.5),
]


@pytest.mark.parametrize('params', MATRIX, ids=repr)
def test_zero_at_origin(params):
    result = c_beta(params, 0.0)
    assert result.value == 0.0
    assert abs(result.value) < 1e-14


@pytest.mark.parametrize('N,s,p', [(3, 0.5, 2.0), (2, 0.75, 4.0), (2, 0.9, 5.0)])
def test_zero_at_critical_exponent(N, s, p):
    params = FracParams(N, s, p)
    at_star = c_beta(params, params.beta_star)
    half = c_beta(params, 0.5 * params.beta_star)
    assert abs(at_star.value) <= 10.0 * at_star.err_est
    assert at_star.err_est < 1e-6 * abs(half.value)


@pytest.mark.parametrize('params', MATRIX[:3], ids=repr)
def test_sign_chart(params):
    """50 exponents across the admissible interval, no resolved mismatch"""
    print("Test: sign chart")
    print("-" * 60)
    low, high = params.beta_interval
    grid = [low + (high - low) * (k + 0.5) / 50 for k in range(50)]
    results = c_beta_sweep(params, grid, threads=2)
    resolved = [r for r in results if r.computed_sign is not None]
    mismatches = [r.beta for r in resolved if not r.sign_matches]
    print(f"  {params}: {len(resolved)} resolved, mismatches {mismatches}")
    assert mismatches == []
    assert len(resolved) >= 40
    print("  ✅ PASS")


@pytest.mark.parametrize('N,s,p,beta', [(2, 0.5, 3.0, -0.3), (3, 0.5, 2.0, -1.5)])
def test_fundamental_identity(N, s, p, beta):
    report = verify_fundamental_identity(FracParams(N, s, p), beta, [0.5, 1.0, 2.0, 5.0])
    assert report.verdict == PASS
    for row in report.rows:
        assert row['mode'] == 'relative'
        assert row['residual'] < 1e-3


@pytest.mark.parametrize('N,s,p', [(2, 0.5, 4.0), (3, 0.75, 4.0)])
def test_log_case(N, s, p):
    params = FracParams(N, s, p)
    report = verify_log_harmonic(params, [0.5, 1.0, 3.0])
    assert report.verdict == PASS
    for row in report.rows:
        assert abs(row['value']) < 1e-5 * row['r'] ** (-params.sp)


def test_kernel_paths_and_reflection():
    print("Test: kernel dual path and reflection")
    print("-" * 60)
    worst = 0.0
    for params in MATRIX[:3]:
        ke = get_evaluator(params)
        for k in range(1, 10):
            rho = 0.1 * k
            closed = K_eval(rho, ke)
            worst = max(worst, abs(K_theta(rho, params) - closed) / abs(closed))
            reflected = K_eval(1.0 / rho, ke)
            assert reflected == pytest.approx(rho ** (params.N + params.sp) * closed, rel=1e-9)
    print(f"  max relative difference {worst:.2e}")
    assert worst < 1e-8
    print("  ✅ PASS")


@pytest.mark.parametrize('params', MATRIX[:3], ids=repr)
def test_H_regularization(params):
    limit = H_limit(params)
    values = [H_eval(1.0 - 10.0 ** -k, params) for k in range(2, 9)]
    assert abs(values[-1] - values[-2]) < 1e-4 * abs(limit)
    assert abs(values[-1] - limit) < 1e-6 * abs(limit)


@pytest.mark.parametrize('s,p,beta', [(0.5, 2.0, -0.5), (0.5, 3.0, -0.3), (0.75, 1.5, -0.4)])
def test_oracle_equivalence(s, p, beta):
    main_path = c_beta(FracParams(2, s, p), beta).value
    direct, _ = oracle.c_beta_direct_2d(s, p, beta)
    assert abs(direct - main_path) / abs(main_path) < 1e-3


def test_scaling_and_homogeneity():
    print("Test: radial scaling and homogeneity")
    print("-" * 60)
    params = FracParams(3, 0.5, 3.0)
    beta = -1.0
    ke = get_evaluator(params)
    f = power_profile(beta)
    e = rhs_exponent(params, beta)
    at_one = frac_plap_radial_pv(f, 1.0, ke).value
    for r in (0.25, 0.5, 2.0, 8.0):
        assert frac_plap_radial_pv(f, r, ke).value == pytest.approx(r ** e * at_one, rel=1e-8)
    for c in (0.5, 3.0):
        scaled = frac_plap_radial_pv(f.scaled(c), 1.0, ke).value
        assert scaled == pytest.approx(c ** (params.p - 1.0) * at_one, rel=1e-9)
    print("  ✅ PASS")


def test_phi_barrier_sixteen_samples():
    params, beta, r = FracParams(3, 0.5, 2.0), -2.5, 2.0
    eps = 0.5 * phi_eps_threshold(params, beta, r)
    report = barrier_sign_check(make_phi_eps(params, beta, min(eps, 0.5)), (r, 4.0 * r), 16, lambda x: 0.0, LE,
                                get_evaluator(params), barrier_kind='PhiEps', threads=2)
    assert len(report.sample_radii) == 16
    assert report.aggregate_verdict == PASS


def test_theta_barrier_supercritical_regime():
    params, beta, r, R = FracParams(2, 0.9, 5.0), 0.3, 2.0, 8.0
    assert params.N < params.sp
    eps = min(0.5 * theta_eps_threshold(params, beta, r), 0.5)
    report = barrier_sign_check(make_theta_eps(params, beta, eps, R), (r, R), 16, lambda x: 0.0, LE,
                                get_evaluator(params), barrier_kind='ThetaEps', threads=2)
    assert report.aggregate_verdict == PASS


def test_cutoff_scaling_is_R_independent():
    report = cutoff_scaling_check(FracParams(2, 0.5, 2.0), m=1.0, radii_R=(1.0, 2.0, 4.0), n_samples=16)
    calibrated = report.thresholds['C']
    for value in report.thresholds['sup_by_R'].values():
        assert abs(value - calibrated) <= 0.05 * abs(calibrated)
    assert report.aggregate_verdict == PASS


def test_supercritical_supersolution():
    print("Test: supercritical supersolution")
    print("-" * 60)
    params, q = FracParams(3, 0.5, 2.0), 4.0
    report = supercritical_check(params, q, [0.5, 1.0, 2.0, 8.0])
    kappa = report.parameters['kappa']
    assert math.isclose(kappa * (params.p - 1.0) + params.sp, kappa * q, rel_tol=0.0, abs_tol=1e-14)
    assert report.thresholds['identity_residual'] < 1e-14
    assert report.aggregate_verdict == PASS
    print("  ✅ PASS")


def main():
    """Run the parameter-free checks; the parametrized ones run under pytest"""
    tests = [
        test_kernel_paths_and_reflection,
        test_scaling_and_homogeneity,
        test_phi_barrier_sixteen_samples,
        test_theta_barrier_supercritical_regime,
        test_cutoff_scaling_is_R_independent,
        test_supercritical_supersolution,
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
