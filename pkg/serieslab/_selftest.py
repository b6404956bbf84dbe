"""Example tables for ``--selftest``, diffed against data/golden.json."""
import json
import logging
import math
import os

from fractions import Fraction

from serieslab._bestpossible import build_counterexample
from serieslab._classes import (
    builtin_class,
    labelled_01_verdict,
    radius_estimate,
    unlabelled_01_verdict,
)
from serieslab._coeffbox import (
    binary_support,
    constant_one,
    geometric,
    parse_rule,
)
from serieslab._diagnostics import ratio_sequence, support_gcd
from serieslab._errors import SeriesLabError
from serieslab._oracles import oracle_count
from serieslab._saddle import exponent_fit, hayman_estimate, solve_saddle
from serieslab._series import PowerSeries, euler_product, series_exp, series_log, split_at
from serieslab._smoothing import cr_bound, theorem_demo
from serieslab._utils import format_value, is_bigfloat

_LOG = logging.getLogger("serieslab.selftest")

GOLDEN_PATH = os.path.join(os.path.dirname(__file__), "data", "golden.json")


def _g(rule, order):
    return PowerSeries.from_rule(rule, order, constant=False)


def _bell(order):
    f = series_exp(_g(parse_rule("1/n!"), order))
    return [int(c * math.factorial(n)) for n, c in enumerate(f)]


def _log_geometric():
    return list(series_log(PowerSeries.from_rule(constant_one(), 4)))


def _cr_single_term():
    g = _g(binary_support([1]), 6)
    return cr_bound(g, split_at(g, 1), 2).C_r


def _demo(rule_text, theta, N):
    report = theorem_demo(parse_rule(rule_text), Fraction(theta), N)
    return [report.L, report.ell, report.trend]


def _exp_x(order):
    return series_exp(_g(binary_support([1]), order))


def _frobenius(support):
    window = max(support)
    return support_gcd(_g(binary_support(support), window), window).frobenius_bound


def _verdict(name, side_fn, field):
    return getattr(side_fn(builtin_class(name), 40), field)


def _labelled(name, n):
    return oracle_count(name, n, "labelled").count


CASES = {
    "exp": [
        ("bell-numbers", lambda: _bell(8)),
        ("exp-x-third", lambda: _exp_x(5)[3]),
    ],
    "log": [("log-geometric", _log_geometric)],
    "euler": [("partitions", lambda: list(euler_product(constant_one(), 10)))],
    "ratios": [
        ("exp-x", lambda: [p.ratio for p in ratio_sequence(_exp_x(6), 2).points]),
        ("partitions-30", lambda: ratio_sequence(euler_product(constant_one(), 30), 30).last),
        ("frobenius-6-10-15", lambda: _frobenius([6, 10, 15])),
    ],
    "saddle": [
        ("quadratic-root", lambda: solve_saddle(PowerSeries.polynomial([0, 1, 1]), 10)),
        ("cubic-root", lambda: solve_saddle(PowerSeries.polynomial([0, 0, 0, 1]), 6)),
        ("exp-x-rel-err", lambda: hayman_estimate(PowerSeries.polynomial([0, 1]), 10).rel_err),
    ],
    "exponent-fit": [
        ("exp-x-s10", lambda: exponent_fit(PowerSeries.polynomial([0, 1]), [10, 100]).s(10)),
    ],
    "split": [("bell-split", lambda: list(split_at(_g(constant_one(), 5), 2).low))],
    "cr-bound": [("single-term", _cr_single_term)],
    "theorem-demo": [("inverse-factorial", lambda: _demo("1/n!", "1/2", 60))],
    "counterexample": [
        ("degrees", lambda: build_counterexample(parse_rule("n^n/n!"), 1, 3).degrees),
    ],
    "class": [
        (
            "equivalence-labelled",
            lambda: _verdict("equivalence-relations", labelled_01_verdict, "verdict"),
        ),
        (
            "equivalence-unlabelled",
            lambda: _verdict("equivalence-relations", unlabelled_01_verdict, "criterion"),
        ),
        (
            "two-sizes-unlabelled",
            lambda: _verdict("finitely-many-components", unlabelled_01_verdict, "criterion"),
        ),
    ],
    "oracle": [
        ("bell-4", lambda: _labelled("equivalence-relations", 4)),
        ("stars-3", lambda: _labelled("height1-forests", 3)),
        ("broom-3", lambda: _labelled("broom", 3)),
        ("partitions-5", lambda: oracle_count("integer-partitions", 5, "unlabelled").count),
        ("selection-2", lambda: _labelled("selection-partitions", 2)),
    ],
    "radius": [("geometric-2", lambda: radius_estimate(geometric(1, 2), 40).value)],
}


def load_golden(path=GOLDEN_PATH):
    with open(path) as f:
        return json.load(f)


def _normalize(value):
    if isinstance(value, (list, tuple)):
        return [_normalize(v) for v in value]
    if is_bigfloat(value):
        return value
    return format_value(value)


def _matches(value, golden):
    expected = golden["expected"]
    tol = golden.get("tol")
    if tol is not None:
        return abs(float(value) - float(Fraction(expected))) <= float(Fraction(tol))
    return _normalize(value) == expected


def run_selftest(command, golden=None):
    """Run the example table of one command; return the list of mismatches."""
    golden = load_golden() if golden is None else golden
    expected = golden.get(command, {})
    failures = []
    for name, case in CASES.get(command, []):
        try:
            value = case()
        except SeriesLabError as exc:
            failures.append((name, "raised %s: %s" % (type(exc).__name__, exc)))
            continue
        if name not in expected:
            failures.append((name, "no golden value"))
        elif not _matches(value, expected[name]):
            got, want = _normalize(value), expected[name]["expected"]
            failures.append((name, "got %s, golden %s" % (got, want)))
        else:
            _LOG.info("selftest %s/%s: ok", command, name)
    for name, reason in failures:
        _LOG.error("selftest %s/%s: %s", command, name, reason)
    return failures
