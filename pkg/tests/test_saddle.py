from fractions import Fraction

import mock
import pytest

from serieslab._coeffbox import Backend, float_context
from serieslab._errors import InvalidArgument, NumericFailure, SamplePointUndefined
from serieslab._saddle import (
    SADDLE_CSV_HEADER,
    exponent_fit,
    hayman_estimate,
    hayman_grid,
    monomial_saddle,
    saddle_csv,
    solve_saddle,
)
from serieslab._series import PowerSeries

CTX = float_context(256)

X = PowerSeries.polynomial([0, 1])
X_PLUS_X2 = PowerSeries.polynomial([0, 1, 1])
X2_PLUS_X3 = PowerSeries.polynomial([0, 0, 1, 1])


def _close(a, b, digits):
    return abs(a - b) < CTX.mpf(10) ** -digits


def test_quadratic_saddle():
    # x + 2x^2 = 10
    assert _close(solve_saddle(X_PLUS_X2, 10), 2, 25)


@pytest.mark.parametrize(
    "d, c, n", [(1, 1, 10), (3, 1, 6), (2, 3, 50), (4, Fraction(1, 2), 7)]
)
def test_monomial_saddle_matches_solver(d, c, n):
    G = PowerSeries.polynomial([0] * d + [c])
    assert _close(solve_saddle(G, n), monomial_saddle(d, c, n), 25)


def test_cubic_saddle():
    assert _close(solve_saddle(PowerSeries.polynomial([0, 0, 0, 1]), 6), CTX.cbrt(2), 25)


def test_saddle_on_float_backend():
    G = PowerSeries.polynomial([0, 1, 1], backend=Backend.floating(128))
    ctx = float_context(128)
    assert abs(solve_saddle(G, 10) - 2) < ctx.mpf(10) ** -25


@pytest.mark.parametrize("coeffs", [[1, 1], [0, 1, -1], [0, 0, 0]])
def test_saddle_rejects_bad_polynomials(coeffs):
    with pytest.raises(InvalidArgument):
        solve_saddle(PowerSeries.polynomial(coeffs), 5)


def test_saddle_rejects_small_index():
    with pytest.raises(InvalidArgument):
        solve_saddle(X, 0)


@mock.patch("serieslab._saddle.MAX_ITERATIONS", 0)
def test_saddle_reports_bracket():
    with pytest.raises(NumericFailure) as e_info:
        solve_saddle(X_PLUS_X2, 10)
    lo, hi = e_info.value.bracket
    assert Fraction(lo) == 0
    assert Fraction(hi) > 2


def test_stirling_relative_error():
    report = hayman_estimate(X, 10)
    assert report.exact == Fraction(1, 3628800)
    # 1/(12n) + 1/(288n^2) - ...
    assert abs(report.rel_err - CTX.mpf("0.0083")) < CTX.mpf("0.00083")


@pytest.mark.parametrize("G", [X, X_PLUS_X2, X2_PLUS_X3])
def test_estimate_improves_with_n(G):
    assert hayman_estimate(G, 200).rel_err < hayman_estimate(G, 20).rel_err


def test_vanishing_coefficient_has_no_rel_err():
    report = hayman_estimate(PowerSeries.polynomial([0, 0, 1]), 3)
    assert report.exact == 0
    assert report.rel_err is None
    assert report.to_dict()["rel_err"] is None


def test_hayman_grid_keeps_input_order():
    reports = hayman_grid(X_PLUS_X2, [5, 20, 10], jobs=2)
    assert [r.n for r in reports] == [5, 20, 10]
    assert reports[2].rel_err == hayman_estimate(X_PLUS_X2, 10).rel_err


def test_hayman_grid_empty():
    assert hayman_grid(X, []) == []


def test_saddle_csv():
    lines = saddle_csv(hayman_grid(X, [4, 8], jobs=1)).splitlines()
    assert lines[0] == ",".join(SADDLE_CSV_HEADER)
    assert len(lines) == 3
    assert lines[1].startswith("4,4.0")


def test_exponent_of_exp_x():
    fit = exponent_fit(X, [10, 100])
    # log(10!) / (10 log 10)
    assert abs(fit.s(10) - CTX.mpf("0.655976")) < CTX.mpf("1e-5")
    assert fit.d == 1


@pytest.mark.parametrize("G", [X, X_PLUS_X2, X2_PLUS_X3])
def test_exponent_converges(G):
    fit = exponent_fit(G, [50, 200])
    assert abs(fit.s(200) - 1) < abs(fit.s(50) - 1)
    assert fit.converging


@pytest.mark.parametrize("sample", [[1, 10], [3]])
def test_exponent_fit_undefined(sample):
    with pytest.raises(SamplePointUndefined):
        exponent_fit(PowerSeries.polynomial([0, 0, 1]), sample)


def test_exponent_fit_csv():
    text = exponent_fit(X, [10, 20]).to_csv()
    assert text.splitlines()[0] == "n,s"
