"""
Recursive construction of a sequence g <= t whose exponential has
infinitely many ratio violations f(d)/f(d-1) > 1.

Stage 1 takes g = t on [1, M]. Stage m+1 adds the single term
h_m(d) x^d, h_m(n) = n^((1 - 1/(2 d_m)) n) / n!, at the smallest degree
d > d_m where t beats n^(theta n)/n! for theta = 1 - 1/(2 d_m) and
h_m(d) beats f_m(d - 1).
"""
import logging
import os

from dataclasses import dataclass
from fractions import Fraction

from serieslab._coeffbox import (
    Backend,
    eval_rule,
    strictly_greater,
)
from serieslab._errors import CheckFailure, InvalidArgument, SearchExhausted
from serieslab._series import PowerSeries, series_exp
from serieslab._utils import dump_csv, format_value, gcd_of

_LOG = logging.getLogger("serieslab.bestpossible")

# largest degree scanned for the next stage
SEARCH_CAP = int(os.getenv("SERIESLAB_SEARCH_CAP", "500"))


def _backend(precision):
    return Backend.floating(precision)


def _power_over_factorial(theta, n, backend):
    ctx = backend.context
    return ctx.power(n, ctx.mpf(theta.numerator) / theta.denominator * n) / ctx.factorial(n)


def s_theta_member(t, theta, n, precision=None):
    """n in S(theta) iff t(n) > n^(theta n)/n!, strictly beyond tolerance."""
    theta = Fraction(theta)
    if not 0 < theta < 1:
        raise InvalidArgument("theta must lie in (0, 1), got %s" % theta)
    if n < 1:
        raise InvalidArgument("membership index must be >= 1, got %d" % n)
    backend = _backend(precision)
    return strictly_greater(
        backend, eval_rule(t, n, backend), _power_over_factorial(theta, n, backend)
    )


def stage_theta(d_m):
    return 1 - Fraction(1, 2 * d_m)


def h_value(d_m, n, precision=None):
    if d_m < 1 or n < 1:
        raise InvalidArgument("h needs d_m >= 1 and n >= 1")
    return _power_over_factorial(stage_theta(d_m), n, _backend(precision))


@dataclass
class Stage:
    m: int
    degree: int
    added_coeff: object = None
    ratio_at_d: object = None

    def to_dict(self):
        return {
            "m": self.m,
            "degree": self.degree,
            "added_coeff": format_value(self.added_coeff),
            "ratio_at_d": format_value(self.ratio_at_d),
        }


def next_degree(t, stage, f_m, search_cap=None, precision=None):
    """
    Smallest d > d_m with d in S(1 - 1/(2 d_m)) and h_m(d) > f_m(d - 1).
    f_m must reach order search_cap - 1.
    """
    search_cap = SEARCH_CAP if search_cap is None else search_cap
    if f_m.order < search_cap - 1:
        raise InvalidArgument(
            "f_m has order %d, the scan needs %d" % (f_m.order, search_cap - 1)
        )
    backend = _backend(precision)
    theta = stage_theta(stage.degree)
    traces = []
    for d in range(stage.degree + 1, search_cap + 1):
        member = s_theta_member(t, theta, d, backend.precision)
        h = _power_over_factorial(theta, d, backend)
        beats = strictly_greater(backend, h, backend.convert(f_m[d - 1]))
        traces.append({"d": d, "member": member, "h_beats_f": beats})
        if member and beats:
            _LOG.debug("Stage %d: d=%d qualifies", stage.m + 1, d)
            return d
    raise SearchExhausted(
        "no degree in (%d, %d] qualifies for stage %d"
        % (stage.degree, search_cap, stage.m + 1),
        traces=traces,
    )


@dataclass
class CounterexampleResult:
    stages: list
    M: int
    g: PowerSeries
    f: PowerSeries
    violations: list

    @property
    def degrees(self):
        return [stage.degree for stage in self.stages]

    def to_dict(self):
        return {
            "M": self.M,
            "precision": self.g.backend.precision,
            "degrees": self.degrees,
            "stages": [stage.to_dict() for stage in self.stages],
            "coefficients": [
                {"n": n, "g": format_value(c)}
                for n, c in enumerate(self.g)
                if c != 0
            ],
            "violations": [
                {"d": d, "ratio": format_value(ratio)} for d, ratio in self.violations
            ],
        }

    def to_csv(self):
        f = self.f
        rows = [
            (n, f[n], f[n] / f[n - 1] if f[n - 1] > 0 else None)
            for n in range(1, f.order + 1)
        ]
        return dump_csv(["n", "f(n)", "f(n)/f(n-1)"], rows)


def build_counterexample(t, M, stages, N=None, search_cap=None, precision=None):
    """
    Run the stage recursion for ``stages`` stages and return g, f = exp(g)
    truncated at N and the ratio violations f(d_m)/f(d_m - 1) > 1 at every
    stage degree after the first.
    """
    if stages < 1:
        raise InvalidArgument("stages must be >= 1")
    if M < 1:
        raise InvalidArgument("M must be >= 1")
    search_cap = SEARCH_CAP if search_cap is None else search_cap
    backend = _backend(precision)
    prefix = [n for n in range(1, M + 1) if eval_rule(t, n, backend) > 0]
    if not prefix or gcd_of(prefix) != 1:
        raise InvalidArgument("t has no gcd-1 support within [1, %d]" % M)

    work_order = max(search_cap, M, N or 0)
    coeffs = [backend.zero] * (work_order + 1)
    for n in prefix:
        coeffs[n] = eval_rule(t, n, backend)
    history = [Stage(1, prefix[-1])]
    f_m = series_exp(PowerSeries(coeffs, backend))

    for m in range(2, stages + 1):
        previous = history[-1]
        d = next_degree(t, previous, f_m, search_cap, backend.precision)
        added = h_value(previous.degree, d, backend.precision)
        coeffs[d] += added
        f_m = series_exp(PowerSeries(coeffs, backend))
        history.append(Stage(m, d, added, f_m[d] / f_m[d - 1]))
        _LOG.info("Stage %d: degree %d, coefficient %s", m, d, format_value(added, 12))

    last = history[-1].degree
    N = last + 1 if N is None else N
    if N < last:
        raise InvalidArgument("order %d is below the last stage degree %d" % (N, last))
    g = PowerSeries(coeffs[: N + 1], backend)
    f = series_exp(g)
    _check_domination(t, g, backend)

    violations = []
    for stage in history[1:]:
        d = stage.degree
        ratio = f[d] / f[d - 1]
        if not strictly_greater(backend, ratio, backend.one):
            raise CheckFailure("f(%d)/f(%d) = %s is not > 1" % (d, d - 1, ratio), witness=d)
        violations.append((d, ratio))
    return CounterexampleResult(history, M, g, f, violations)


def _check_domination(t, g, backend):
    for n in range(1, g.order + 1):
        if g[n] != 0 and strictly_greater(backend, g[n], eval_rule(t, n, backend)):
            raise CheckFailure("g(%d) exceeds t(%d)" % (n, n), witness=n)
