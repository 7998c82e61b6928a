import math

import numpy as np
import pytest

from lrdraw.family import FamilyParams, phi_for
from lrdraw.numerics import (
    LambdaReport,
    exponent_residual,
    family_params,
    holder_check,
    holder_fuzz,
    lambda_base,
    lambda_refined,
    loglog_slope,
    lower_bound_exponent,
    power_fit,
    refined_step_check,
    ruler_weights,
    scan_lambda_base,
)
from lrdraw.oracle import worst_case_table

WORST_FIT = (0.46309850, 0.79999998, -0.47725748)


def test_lambda_base_reference_point():
    rep = lambda_base(0.438, 0.247, 64)
    assert abs(rep.rho - 2.395068) < 1e-5
    assert rep.lam < 0.9984
    assert rep.bound_ok
    assert abs(rep.lam - 0.998365384) < 1e-8


def test_lambda_base_target():
    # lambda^(1-p) = 0.99908..., so the room left for delta is under 1e-3
    assert lambda_base(0.438, 0.247, 64, target=0.99910).bound_ok
    assert not lambda_base(0.438, 0.247, 64, target=0.99908).bound_ok


def test_lambda_base_h_zero():
    a0 = 0.3
    p = 0.44
    q = 1 / (1 - p)
    rep = lambda_base(p, a0, 0)
    assert rep.rho == 1.0
    assert math.isclose(rep.lam, 2 * a0 ** q + 2 * (1 - a0) ** q, rel_tol=1e-13)


def test_general_and_simplified_agree_on_grid():
    for p in np.linspace(0.40, 0.48, 9):
        for h in (1, 2, 3, 7, 20, 64):
            _, _, rho = ruler_weights(p, 1e-9, h)
            for t in np.linspace(0.01, 0.99, 25):
                rep = lambda_base(p, t / rho, h)  # raises on disagreement
                assert abs(sum(rep.a) + sum(rep.b) - 1) < 1e-12


def test_weights_reject_bad_inputs():
    with pytest.raises(ValueError):
        ruler_weights(0.438, 0.5, 64)  # rho * a0 > 1
    with pytest.raises(ValueError):
        ruler_weights(1.5, 0.1, 3)
    with pytest.raises(ValueError):
        LambdaReport(p=0.4, h=0, a0=0.5, a=[0.5], b=[0.6], rho=1, lam=1)


def test_scan_finds_minimum_near_reference():
    a0, lam = scan_lambda_base(0.438, 64)
    assert abs(a0 - 0.247) < 0.01
    assert abs(lam - lambda_base(0.438, 0.247, 64).lam) < 1e-3
    # increasing beyond the minimiser
    vals = [lambda_base(0.438, a0 + d, 64).lam for d in (0.005, 0.01, 0.02, 0.04)]
    assert vals == sorted(vals)


@pytest.mark.parametrize("istar", range(1, 9))
def test_refined_lambda_below_one(istar):
    rep = lambda_refined(0.437, 0.1, 7, 0.247, istar)
    assert rep.lam < 1 and rep.bound_ok


def test_refined_reference_values():
    got = [lambda_refined(0.437, 0.1, 7, 0.247, i).lam for i in range(1, 9)]
    want = [0.9999981578, 0.9892238, 0.9938099, 0.9971753, 0.9987985, 0.9995033, 0.9997984, 0.9999202]
    assert np.allclose(got, want, atol=1e-7)


def test_refined_collapses_to_base():
    # with gamma = 0 the refined expression equals the base one when the head holds only b_0
    for p, a0, h in [(0.437, 0.247, 7), (0.45, 0.2, 3), (0.41, 0.1, 12)]:
        assert math.isclose(lambda_refined(p, 0.0, h, a0, 1).lam, lambda_base(p, a0, h).lam, rel_tol=1e-13)
    # the other end (empty tail) is a different expression
    assert lambda_refined(0.437, 0.0, 7, 0.247, 8).lam != pytest.approx(lambda_base(0.437, 0.247, 7).lam, rel=1e-6)


def test_refined_shape_in_gamma():
    # continuous, first falling then rising; flat once the tail is empty
    grid = np.linspace(0, 0.5, 501)
    lowest = []
    for istar in range(1, 9):
        lams = np.array([lambda_refined(0.437, g, 7, 0.247, istar).lam for g in grid])
        d = np.diff(lams)
        assert np.max(np.abs(d)) < 1e-4
        k = int(np.argmin(lams))
        assert np.all(d[:k] <= 0) and np.all(d[k:] >= 0)
        lowest.append(grid[k])
    assert abs(lowest[0] - 0.106) < 2e-3  # the tightest case sits next to gamma = 0.1
    assert lowest == sorted(lowest, reverse=True) and lowest[-1] == 0


def test_refined_errors():
    with pytest.raises(ValueError):
        lambda_refined(0.437, 0.1, 7, 0.247, 9)
    with pytest.raises(ValueError):
        lambda_refined(0.437, 1.0, 7, 0.247, 1)


def test_holder_single_term_equality():
    for c, X, p in [(1.0, 5.0, 0.3), (2.5, 0.01, 0.7)]:
        q = 1 / (1 - p)
        lhs = c * X ** p
        rhs = (c ** q) ** (1 - p) * X ** p
        assert math.isclose(lhs, rhs, rel_tol=1e-12)
        assert holder_check([c], [X], p)


def test_holder_equality_case():
    # equality exactly when c^(1/(1-p)) is proportional to X; any other split is strict
    p = 0.43
    q = 1 / (1 - p)
    X = np.array([1.0, 4.0, 9.0])
    c = X ** (1 / q)
    lhs = float(np.sum(c * X ** p))
    rhs = float(np.sum(c ** q) ** (1 - p) * np.sum(X) ** p)
    assert math.isclose(lhs, rhs, rel_tol=1e-12) and holder_check(c, X, p)
    assert holder_check(c[::-1], X, p)
    assert refined_step_check(0.5, 1.0, 0.5, 0.5) and refined_step_check(1e-6, 1e6, 0.1, 0.437)


def test_fuzz_small():
    assert holder_fuzz(5000, seed=1) == (0, 0)


def test_exponent():
    x, p = lower_bound_exponent()
    assert abs(exponent_residual(x)) < 1e-12
    assert 0.429 <= p < 0.430 and p < 0.437
    assert abs(x - 1.3309214267) < 1e-9
    mu, phi = family_params(p)
    assert abs(phi ** p + mu ** p - 1) < 1e-6


def test_family_params_at_reference_point():
    phi = phi_for(0.429, 0.122)
    assert abs(phi - 0.297513) < 1e-6
    fp = FamilyParams()
    assert abs(fp.linear_residual()) < 1e-9 and fp.power_sum() >= 1
    mu, phi = family_params(0.429)
    assert phi ** 0.429 + mu ** 0.429 >= 1
    assert phi_for(0.429, 0.0) == 0.5


def test_family_params_fail_above_the_threshold():
    mu, phi = family_params(0.437)
    assert phi ** 0.437 + mu ** 0.437 < 1
    with pytest.raises(ValueError):
        FamilyParams(p=0.437, mu=mu)


def test_power_fit_exact():
    n = np.arange(1, 60)
    a, b, c = power_fit(zip(n, 2 * n ** 0.5))
    assert abs(a - 2) < 1e-6 and abs(b - 0.5) < 1e-6 and abs(c) < 1e-6


def test_power_fit_rounded_synthetic():
    n = np.arange(1, 456)
    w = np.round(1.54 * n ** 0.443 - 0.55)
    _, b, _ = power_fit(zip(n, w))
    assert abs(b - 0.443) < 0.02


def test_power_fit_worst_case_fixture():
    pts = [(n, w) for n, w, _ in worst_case_table(13)]
    got = power_fit(pts)
    assert all(math.isfinite(v) for v in got)
    assert np.allclose(got, WORST_FIT, atol=1e-6)


def test_power_fit_errors():
    with pytest.raises(ValueError):
        power_fit([(1, 1), (2, 2), (3, 3)])
    with pytest.raises(ValueError):
        power_fit([(5, 1)] * 5)
    with pytest.raises(ValueError):
        power_fit([(0, 1), (1, 1), (2, 2), (3, 3)])


def test_loglog_slope():
    n = [2 ** k for k in range(5, 15)]
    assert abs(loglog_slope(n, [3 * x ** 0.44 for x in n]) - 0.44) < 1e-12
