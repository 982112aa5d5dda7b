import mpmath
import pytest
from mpmath import mp, mpf

from src import asymptotics
from src.asymptotics import (
    TARGETS,
    amplitude_constants,
    build_report,
    count_estimate,
    count_estimates,
    expected_height_estimate,
    find_rho,
    height_constants,
    ladder_point,
    singular_polynomial,
)
from src.dpcount import height_distribution
from src.errors import ConvergenceError


def close(value, target, tol):
    with mp.workdps(60):
        return abs(value - mpf(target)) < mpf(tol)


def test_rho():
    rho = find_rho(50)
    assert close(rho, TARGETS["rho"], "1e-20")
    with mp.workdps(70):
        assert abs(singular_polynomial(rho)) < mpf("1e-22")


def test_rho_is_bracketed():
    assert singular_polynomial(mpf("0.29")) > 0
    assert singular_polynomial(mpf("0.30")) < 0


def test_rho_needs_enough_digits():
    with pytest.raises(ValueError):
        find_rho(5)


def test_amplitude_constants():
    amplitude = amplitude_constants(50)
    assert close(amplitude.amp, TARGETS["amp"], "1e-12")
    assert close(amplitude.a0, TARGETS["a0"], "1e-12")
    assert close(amplitude.C, TARGETS["C"], "1e-9")
    assert close(amplitude.sqrt_coefficient, TARGETS["sqrt_coefficient"], "1e-9")
    assert close(amplitude.p_at_rho, TARGETS["p_at_rho"], "1e-9")
    assert close(amplitude.omega_coefficient, TARGETS["omega_coefficient"], "1e-9")
    assert close(amplitude.half_ratio, TARGETS["half_ratio"], "1e-9")


def test_value_of_p_at_rho_simplifies():
    rho = find_rho(50)
    with mp.workdps(60):
        assert abs(amplitude_constants(50).p_at_rho - (2 - 4 * rho)) < mpf("1e-40")


@pytest.mark.parametrize("name", ["K_diff", "K_exp", "K_log", "K_height"])
def test_height_constants(name):
    value = getattr(height_constants(50), name)
    assert close(value, TARGETS[name], "1e-9")


def test_exp_limit_is_twice_half_ratio():
    heights = height_constants(50)
    assert abs(heights.K_exp - 2 * amplitude_constants(50).half_ratio) < mpf("1e-25")


def test_diff_limit_matches_local_expansion():
    # At rho: c ~ -D (rho - z), omega ~ (1 + rho) sqrt(C) s and S = -2 rho^2 / (1 - rho).
    rho = find_rho(50)
    with mp.workdps(70):
        D = 3 + 2 * rho + 3 * rho**2
        C = (1 - rho) * D
        bracket = (1 + rho) * (2 * rho**2 / (1 - rho) - (1 - rho) ** 2)
        expected = -2 * D * bracket * (1 - rho) ** 2 / (4 * rho**4 * (1 + rho) * mpmath.sqrt(C))
        assert abs(height_constants(50).K_diff - expected) < mpf("1e-25")


def test_height_constants_need_enough_digits():
    with pytest.raises(ValueError):
        height_constants(12)


def test_ladder_point_is_finite_and_near_limit():
    point = ladder_point("K_diff", 8)
    assert mpmath.isfinite(point)
    assert abs(point - height_constants(50).K_diff) < mpf("1e-2")


def test_unstable_ladder_raises(monkeypatch):
    monkeypatch.setattr(asymptotics, "STABLE_DIGITS", 45)
    with pytest.raises(ConvergenceError):
        asymptotics._ladder_limit("K_exp", 30)


def test_count_estimate_error_at_one_hundred():
    estimate = count_estimate(100)
    assert 0.015 <= estimate.rel_error <= 0.05


def test_count_estimate_error_decreases():
    errors = [e.rel_error for e in count_estimates([400, 50, 200, 100])]
    assert errors == sorted(errors, reverse=True)


def test_count_estimate_uses_given_exact():
    estimate = count_estimate(11, exact=20705)
    assert estimate.exact == 20705
    with pytest.raises(ValueError):
        count_estimate(0)


def test_expected_height_estimate_at_one_hundred():
    estimate = expected_height_estimate(100)
    assert abs(estimate.estimate - mpf("12.49")) < mpf("0.01")
    assert estimate.rel_error is not None


def test_expected_height_estimate_at_zero():
    estimate = expected_height_estimate(0)
    assert estimate.rel_error is None
    assert estimate.ratio is None
    assert estimate.estimate == 0


def test_report_checks():
    report = build_report(50, check_n=(50, 100))
    checks = {c.name: c for c in report.checks()}
    assert set(checks) == set(TARGETS)
    assert checks["rho"].delta < mpf("1e-20")
    assert checks["K_height"].delta < mpf("1e-9")
    assert [e.n for e in report.estimates] == [50, 100]


@pytest.mark.slow
def test_average_height_law():
    K_height = height_constants(50).K_height
    deviations = []
    for n in (100, 200, 300):
        ratio = expected_height_estimate(n, profile=height_distribution(n, workers=4)).ratio
        deviations.append(abs(ratio - K_height))
    assert deviations[-1] < mpf("0.2") * K_height
    assert deviations == sorted(deviations, reverse=True)
