from fractions import Fraction

import pytest

from serieslab._coeffbox import binary_support, constant_one, power_over_factorial
from serieslab._diagnostics import (
    CERTIFIED,
    DIVERGING,
    FAILS,
    INCONCLUSIVE,
    NON_MONOTONE,
    NOT_APPLICABLE,
    TENDING_TO_ONE,
    TENDING_TO_ZERO,
    WINDOW_ONLY,
    RatioPoint,
    RatioReport,
    TrendConfig,
    classify_trend,
    find_onset,
    positivity_onset,
    ratio_sequence,
    support_gcd,
)
from serieslab._errors import EmptyReport, EmptySupport, InsufficientData, InvalidArgument
from serieslab._series import PowerSeries, euler_product, series_exp


def _g(rule, order):
    return PowerSeries.from_rule(rule, order, constant=False)


def _report(ratios, start=1):
    points = [
        RatioPoint(n, Fraction(1), Fraction(r), True) for n, r in enumerate(ratios, start)
    ]
    return RatioReport(start, 1, points)


@pytest.fixture(name="exp_x")
def fixture_exp_x():
    yield series_exp(_g(binary_support([1]), 6))


def test_exp_x_ratios(exp_x):
    report = ratio_sequence(exp_x, 2)
    assert [p.ratio for p in report.points] == [2, 3, 4, 5, 6]
    assert report.first == 2
    assert report.last == 6
    assert report.monotone_violations == 0


def test_short_window_is_inconclusive(exp_x):
    report = ratio_sequence(exp_x, 2)
    assert report.trend == INCONCLUSIVE
    assert "at least 10 needed" in report.note


def test_ratio_csv(exp_x):
    lines = ratio_sequence(exp_x, 2).to_csv().splitlines()
    assert lines[0] == "n,f(n),ratio,defined"
    assert lines[1] == "2,1/2,2,True"


def test_partition_ratio():
    report = ratio_sequence(euler_product(constant_one(), 30), 30)
    assert report.ratio_at(30) == Fraction(4565, 5604)


def test_undefined_points_are_kept():
    f = series_exp(_g(binary_support([2]), 10))
    report = ratio_sequence(f, 2)
    assert report.undefined == [3, 5, 7, 9]
    assert len(report.points) == 9


@pytest.mark.parametrize("n0, shift", [(0, 1), (2, 3), (2, 0)])
def test_ratio_window_errors(exp_x, n0, shift):
    with pytest.raises(InvalidArgument):
        ratio_sequence(exp_x, n0, shift)


def test_vanishing_window():
    with pytest.raises(EmptyReport):
        ratio_sequence(PowerSeries.polynomial([1, 0, 0, 0]), 1)


def test_bell_ratios_diverge():
    f = series_exp(_g(power_over_factorial(0), 60))
    assert ratio_sequence(f, 2).trend == DIVERGING
    assert ratio_sequence(f, 2, shift=2).trend == DIVERGING


def test_partition_ratios_tend_to_one():
    a = euler_product(constant_one(), 100)
    assert ratio_sequence(a, 2).trend == TENDING_TO_ONE


@pytest.mark.parametrize(
    "ratios, expected",
    [
        (list(range(1, 41)), DIVERGING),
        ([Fraction(1, n) for n in range(1, 41)], TENDING_TO_ZERO),
        ([1 + Fraction(1, n) for n in range(1, 41)], TENDING_TO_ONE),
        ([1 if n % 2 else 2 for n in range(40)], NON_MONOTONE),
        ([2] * 40, INCONCLUSIVE),
    ],
)
def test_classify_trend(ratios, expected):
    assert classify_trend(_report(ratios)) == expected


def test_classify_trend_kappa():
    # linear growth to 4; the slope floor is put out of reach
    ratios = [1 + Fraction(3 * n, 40) for n in range(1, 41)]
    config = TrendConfig(kappa=2.0, slope_floor=100.0)
    assert classify_trend(_report(ratios), config) == DIVERGING
    config = TrendConfig(kappa=50.0, slope_floor=100.0)
    assert classify_trend(_report(ratios), config) != DIVERGING


def test_classify_trend_needs_points():
    with pytest.raises(InsufficientData):
        classify_trend(_report([1, 2, 3]))


def test_trend_config_echo():
    assert TrendConfig().to_dict() == {
        "kappa": 5.0,
        "delta": 0.05,
        "slope_floor": 0.15,
        "decay_slope": 0.25,
        "block": 6,
        "min_points": 10,
    }


@pytest.mark.parametrize(
    "support, window, gcd, bound, onset",
    [
        ([6, 10, 15], 15, 1, 29, None),
        ([2, 3], 10, 1, 1, 3),
        ([1], 5, 1, -1, 2),
        ([2, 4], 10, 2, NOT_APPLICABLE, None),
    ],
)
def test_support_gcd(support, window, gcd, bound, onset):
    profile = support_gcd(_g(binary_support(support), window), window)
    assert profile.support == support
    assert profile.gcd == gcd
    assert profile.frobenius_bound == bound
    assert profile.onset_L == onset


def test_support_gcd_of_rule():
    profile = support_gcd(binary_support([3, 5]), 10)
    assert (profile.gcd, profile.frobenius_bound) == (1, 7)


def test_support_gcd_empty():
    with pytest.raises(EmptySupport):
        support_gcd(binary_support([20]), 10)


@pytest.mark.parametrize(
    "support, order, L, verdict, witness",
    [
        ([1], 10, 2, CERTIFIED, None),
        ([2, 3], 20, 3, CERTIFIED, None),
        ([2, 3], 3, 3, WINDOW_ONLY, None),
        ([3, 5], 11, 5, FAILS, 7),
        ([2, 4], 10, 4, FAILS, 5),
    ],
)
def test_positivity_onset(support, order, L, verdict, witness):
    result = positivity_onset(_g(binary_support(support), order), L)
    assert result.verdict == verdict
    assert result.witness == witness


def test_positivity_onset_gcd_has_no_bound():
    result = positivity_onset(_g(binary_support([2, 4]), 10), 4)
    assert result.gcd == 2
    assert result.frobenius_bound == NOT_APPLICABLE


def test_positivity_onset_small_L():
    with pytest.raises(InvalidArgument):
        positivity_onset(_g(binary_support([1]), 10), 1)


@pytest.mark.parametrize(
    "support, expected", [([1], 2), ([2, 3], 3), ([2, 4], None)]
)
def test_find_onset(support, expected):
    assert find_onset(_g(binary_support(support), 20)) == expected
