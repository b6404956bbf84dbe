from fractions import Fraction

import pytest

from serieslab._bestpossible import (
    Stage,
    build_counterexample,
    h_value,
    next_degree,
    s_theta_member,
    stage_theta,
)
from serieslab._coeffbox import Backend, binary_support, eval_rule, parse_rule
from serieslab._diagnostics import NON_MONOTONE, ratio_sequence
from serieslab._errors import InvalidArgument, SearchExhausted
from serieslab._series import PowerSeries, series_exp

T = parse_rule("n^n/n!")


@pytest.fixture(name="three_stages")
def fixture_three_stages():
    yield build_counterexample(T, 1, 3)


@pytest.mark.parametrize(
    "theta, n, expected",
    [
        (Fraction(1, 2), 3, True),
        (Fraction(5, 6), 4, True),
        # t(1) = 1 = 1^(theta)/1!
        (Fraction(1, 2), 1, False),
    ],
)
def test_s_theta_member(theta, n, expected):
    assert s_theta_member(T, theta, n) is expected


@pytest.mark.parametrize("theta, n", [(0, 3), (1, 3), (Fraction(1, 2), 0)])
def test_s_theta_member_errors(theta, n):
    with pytest.raises(InvalidArgument):
        s_theta_member(T, theta, n)


def test_stage_theta():
    assert stage_theta(1) == Fraction(1, 2)
    assert stage_theta(3) == Fraction(5, 6)


def test_h_value():
    ctx = Backend.floating().context
    # 4^(4/2)/4!
    assert abs(h_value(1, 4) - ctx.mpf(2) / 3) < ctx.mpf(10) ** -60
    with pytest.raises(InvalidArgument):
        h_value(0, 3)


def test_counterexample_degrees(three_stages):
    assert three_stages.degrees == [1, 3, 4]
    assert three_stages.to_dict()["degrees"] == [1, 3, 4]


def test_counterexample_violations(three_stages):
    backend = three_stages.g.backend
    assert [d for d, _ in three_stages.violations] == [3, 4]
    for _, ratio in three_stages.violations:
        assert ratio > backend.one


def test_counterexample_is_dominated(three_stages):
    g = three_stages.g
    backend = g.backend
    for n in range(1, g.order + 1):
        assert g[n] <= eval_rule(T, n, backend)


def test_counterexample_stage_coefficients(three_stages):
    second, third = three_stages.stages[1:]
    assert second.added_coeff == h_value(1, 3)
    assert third.added_coeff == h_value(3, 4)
    assert second.ratio_at_d > 1


def test_ratio_dips_below_one_at_stage_degrees(three_stages):
    report = ratio_sequence(three_stages.f, 2)
    for d in three_stages.degrees[1:]:
        assert report.ratio_at(d) < 1


def test_counterexample_ratios_are_non_monotone():
    result = build_counterexample(T, 1, 3, N=40)
    assert ratio_sequence(result.f, 2).trend == NON_MONOTONE


def test_next_degree_directly():
    backend = Backend.floating()
    f_1 = series_exp(PowerSeries([0, 1] + [0] * 9, backend))
    assert next_degree(T, Stage(1, 1), f_1, search_cap=10) == 3


def test_next_degree_needs_order():
    backend = Backend.floating()
    f_1 = series_exp(PowerSeries([0, 1, 0], backend))
    with pytest.raises(InvalidArgument):
        next_degree(T, Stage(1, 1), f_1, search_cap=10)


def test_search_exhausted():
    with pytest.raises(SearchExhausted) as e_info:
        build_counterexample(T, 1, 2, search_cap=2)
    assert e_info.value.traces == [{"d": 2, "member": True, "h_beats_f": False}]


@pytest.mark.parametrize(
    "t, M, stages, N",
    [
        (T, 1, 0, None),
        (T, 0, 2, None),
        (binary_support([2]), 3, 2, None),
        (T, 1, 3, 3),
    ],
)
def test_counterexample_errors(t, M, stages, N):
    with pytest.raises(InvalidArgument):
        build_counterexample(t, M, stages, N)


def test_counterexample_csv(three_stages):
    lines = three_stages.to_csv().splitlines()
    assert lines[0] == "n,f(n),f(n)/f(n-1)"
    assert len(lines) == three_stages.f.order + 1
