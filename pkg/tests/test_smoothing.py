from fractions import Fraction

import mock
import pytest

from serieslab._coeffbox import (
    binary_support,
    constant_one,
    parse_rule,
    power_over_factorial,
)
from serieslab._diagnostics import DIVERGING, INCONCLUSIVE
from serieslab._errors import (
    CheckFailure,
    HypothesisFailure,
    InsufficientData,
    InvalidArgument,
    OnsetViolation,
    PreconditionViolation,
)
from serieslab._series import PowerSeries, series_exp, split_at
from serieslab._smoothing import (
    SHIFTS,
    CrBound,
    choose_ell,
    cr_bound,
    epsilon_envelope,
    hypothesis_constant,
    shift_bound_check,
    theorem_demo,
)


def _g(rule, order):
    return PowerSeries.from_rule(rule, order, constant=False)


@pytest.fixture(name="single_term")
def fixture_single_term():
    g = _g(binary_support([1]), 6)
    yield g, split_at(g, 1)


@pytest.fixture(name="bell_split")
def fixture_bell_split():
    g = _g(power_over_factorial(0), 40)
    yield g, split_at(g, 3)


def test_single_term_bound(single_term):
    # n*g(n)/f0(n + 2) peaks at n = 1: 1 / (1/3!)
    g, split = single_term
    cr = cr_bound(g, split, 2)
    assert cr.C_r == 6
    assert cr.argmax_n == 1
    assert cr.L == 2


def test_bound_window(bell_split):
    g, split = bell_split
    cr = cr_bound(g, split, -1, L=2)
    assert cr.window == (4, 40)
    cr = cr_bound(g, split, 2, L=2)
    assert cr.window == (1, 38)


def test_bound_rejects_small_shift(bell_split):
    g, split = bell_split
    with pytest.raises(InvalidArgument):
        cr_bound(g, split, -2, L=2)


def test_bound_needs_positive_f0():
    g = _g(binary_support([2, 3]), 12)
    split = split_at(g, 2)
    # exp(x^2) vanishes at odd degrees, so L=2 is not an onset
    with pytest.raises(OnsetViolation):
        cr_bound(g, split, 0, L=2)


@pytest.mark.parametrize("r", SHIFTS)
@pytest.mark.parametrize("rule", ["1/n!", "floor(n^(1/2 n))/n!"])
def test_shift_bound_holds_exactly(rule, r):
    g = _g(parse_rule(rule), 60)
    split = split_at(g, 3)
    cr = cr_bound(g, split, r, L=2)
    check = shift_bound_check(g, split, r, cr)
    assert check.checked == 60 - max(r, 0)
    assert check.max_quotient <= cr.C_r


def test_shift_bound_reports_witness(bell_split):
    g, split = bell_split
    cr = cr_bound(g, split, 0, L=2)
    broken = CrBound(cr.r, cr.C_r / 1000, cr.argmax_n, cr.window, cr.L)
    with pytest.raises(CheckFailure) as e_info:
        shift_bound_check(g, split, 0, broken)
    assert e_info.value.witness is not None


def test_epsilon_envelope(bell_split):
    _, split = bell_split
    table = epsilon_envelope(series_exp(split.low), (4, 40))
    values = [eps for _, _, eps in table.entries]
    assert all(b <= a for a, b in zip(values, values[1:]))
    assert values[-1] < values[0]
    assert table.window == (4, 40)
    for n, ratio, eps in table.entries:
        assert ratio < eps


def test_epsilon_envelope_short_window(bell_split):
    _, split = bell_split
    with pytest.raises(InsufficientData):
        epsilon_envelope(series_exp(split.low), (4, 5))


def test_epsilon_envelope_flat():
    # f0 = 1/(1 - x): every ratio is 1
    f0 = PowerSeries.from_rule(constant_one(), 10)
    with pytest.raises(CheckFailure):
        epsilon_envelope(f0, (2, 10))


def test_epsilon_envelope_needs_positive_f0():
    f0 = series_exp(_g(binary_support([2]), 10))
    with pytest.raises(OnsetViolation):
        epsilon_envelope(f0, (2, 10))


def test_hypothesis_constant():
    g = _g(power_over_factorial(0), 40)
    assert hypothesis_constant(g, Fraction(1, 2)) == 1


def test_hypothesis_violated():
    g = _g(power_over_factorial(1), 40)
    with pytest.raises(HypothesisFailure) as e_info:
        hypothesis_constant(g, Fraction(1, 2))
    assert e_info.value.witness > 20


@pytest.mark.parametrize(
    "L, theta, expected",
    [(2, Fraction(1, 2), 3), (2, Fraction(3, 4), 5), (6, Fraction(1, 2), 7)],
)
def test_choose_ell(L, theta, expected):
    g = _g(constant_one(), 20)
    assert choose_ell(g, L, theta) == expected


def test_choose_ell_skips_zeros():
    g = _g(binary_support([1, 2, 5]), 20)
    assert choose_ell(g, 2, Fraction(1, 2)) == 5


@pytest.mark.parametrize("rule", ["1/n!", "floor(n^(1/2 n))/n!"])
def test_theorem_demo_diverges(rule):
    report = theorem_demo(parse_rule(rule), Fraction(1, 2), 200)
    assert report.trend == DIVERGING
    assert report.L == 2
    assert report.ell == 3
    assert [cr.r for cr in report.cr_table] == list(SHIFTS)
    assert len(report.shift_checks) == len(SHIFTS)
    assert report.epsilon_checks


def test_theorem_demo_report_shape():
    report = theorem_demo(parse_rule("1/n!"), Fraction(1, 2), 40, jobs=1)
    data = report.to_dict()
    assert data["L"] == 2
    assert data["ell"] == 3
    assert data["theta"] == "1/2"
    lines = report.to_csv().splitlines()
    assert lines[0] == "n,f(n),ratio,epsilon"
    assert len(lines) == 40


def test_theorem_demo_rejects_gcd():
    with pytest.raises(PreconditionViolation):
        theorem_demo(binary_support([2, 4]), Fraction(1, 2), 30)


@pytest.mark.parametrize("theta", [0, 1, Fraction(3, 2)])
def test_theorem_demo_rejects_theta(theta):
    with pytest.raises(InvalidArgument):
        theorem_demo(constant_one(), theta, 30)


def test_theorem_demo_warns_without_divergence():
    with mock.patch("serieslab._smoothing.ratio_sequence") as mocked_ratios, mock.patch(
        "serieslab._smoothing._LOG"
    ) as mocked_log:
        mocked_ratios.return_value.trend = INCONCLUSIVE
        report = theorem_demo(parse_rule("1/n!"), Fraction(1, 2), 30)

    assert report.trend == INCONCLUSIVE
    mocked_log.warning.assert_called_once()
