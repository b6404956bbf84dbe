import logging

from dataclasses import dataclass, field
from fractions import Fraction

from serieslab._coeffbox import (
    DEFAULT_PRECISION,
    Backend,
    float_context,
    strictly_greater,
    to_bigfloat,
)
from serieslab._diagnostics import (
    DIVERGING,
    TrendConfig,
    find_onset,
    ratio_sequence,
    support_gcd,
)
from serieslab._errors import (
    CheckFailure,
    HypothesisFailure,
    InsufficientData,
    InvalidArgument,
    OnsetViolation,
    PreconditionViolation,
)
from serieslab._series import PowerSeries, series_exp, split_at
from serieslab._utils import dump_csv, format_value, run_grid

_LOG = logging.getLogger("serieslab.smoothing")

# shifts sampled for the C_r table
SHIFTS = (-1, 0, 1, 2)

# envelope strictness factor 1 + 1e-6
EPSILON_SLACK = Fraction(1000001, 1000000)


@dataclass
class CrBound:
    r: int
    C_r: object
    argmax_n: object
    window: tuple
    L: int

    def to_dict(self):
        return {
            "r": self.r,
            "C_r": format_value(self.C_r),
            "argmax_n": self.argmax_n,
            "window": list(self.window),
            "L": self.L,
        }


def _onset(low, L):
    if L is not None:
        return L
    L = find_onset(low)
    if L is None:
        raise OnsetViolation("no certified positivity onset for the low part")
    return L


def cr_bound(g, split, r, L=None, f0=None):
    """
    Smallest C_r with n*g(n) <= C_r * f0(n + r) for every window index
    n + r >= L + 1, where f0 = exp(split.low).
    """
    if r < -1:
        raise InvalidArgument("shift r must be >= -1, got %d" % r)
    f0 = series_exp(split.low) if f0 is None else f0
    L = _onset(split.low, L)
    N = g.order
    lo, hi = max(1, L + 1 - r), min(N, N - r)

    best, argmax = g.backend.zero, None
    for n in range(lo, hi + 1):
        if not f0[n + r] > 0:
            raise OnsetViolation("f0(%d) = 0 inside the window; L=%d is too small" % (n + r, L))
        quotient = n * g[n] / f0[n + r]
        if argmax is None or quotient > best:
            best, argmax = quotient, n

    for n in range(lo, hi + 1):
        if strictly_greater(g.backend, n * g[n], best * f0[n + r]):
            raise CheckFailure("C_%d does not bound n*g(n) at n=%d" % (r, n), witness=n)
    return CrBound(r, best, argmax, (lo, hi), L)


@dataclass
class ShiftCheck:
    r: int
    C_r: object
    max_quotient: object
    argmax_n: object
    checked: int

    def to_dict(self):
        return {
            "r": self.r,
            "C_r": format_value(self.C_r),
            "max_quotient": format_value(self.max_quotient),
            "argmax_n": self.argmax_n,
            "checked": self.checked,
        }


def shift_bound_check(g, split, r, cr, f=None, f1=None):
    """
    Assert n*f1(n) <= C_r * f(n + r) at every window point, where
    f1 = exp(split.high) and f = exp(g). Any violation is a defect.
    """
    f = series_exp(g) if f is None else f
    f1 = series_exp(split.high) if f1 is None else f1
    backend = g.backend
    best, argmax, checked = backend.zero, None, 0
    for n in range(1, g.order - max(r, 0) + 1):
        lhs = n * f1[n]
        rhs = cr.C_r * f[n + r]
        if strictly_greater(backend, lhs, rhs):
            raise CheckFailure(
                "n*f1(n) > C_r*f(n+r) at n=%d for r=%d" % (n, r), witness=n
            )
        checked += 1
        if f[n + r] > 0:
            quotient = lhs / f[n + r]
            if argmax is None or quotient > best:
                best, argmax = quotient, n
    return ShiftCheck(r, cr.C_r, best, argmax, checked)


@dataclass
class EpsilonTable:
    """Suffix-maximum envelope eps(n) of f0(n)/f0(n-1), scaled by 1 + 1e-6."""

    entries: list

    def at(self, n):
        for m, _, eps in self.entries:
            if m == n:
                return eps
        raise KeyError(n)

    @property
    def window(self):
        return (self.entries[0][0], self.entries[-1][0])

    def to_dict(self):
        return {
            "window": list(self.window),
            "entries": [
                {"n": n, "ratio": format_value(q), "epsilon": format_value(e)}
                for n, q, e in self.entries
            ],
        }


def epsilon_envelope(f0, window=None):
    lo, hi = window or (2, f0.order)
    lo = max(lo, 1)
    hi = min(hi, f0.order)
    if hi - lo + 1 < 3:
        raise InsufficientData("envelope window [%d, %d] has fewer than 3 points" % (lo, hi))
    for n in range(lo - 1, hi + 1):
        if not f0[n] > 0:
            raise OnsetViolation("f0(%d) = 0 inside the envelope window" % n)

    slack = f0.backend.convert(EPSILON_SLACK)
    ratios = [(n, f0[n] / f0[n - 1]) for n in range(lo, hi + 1)]
    entries = []
    running = None
    for n, q in reversed(ratios):
        running = q if running is None or q > running else running
        entries.append((n, q, running * slack))
    entries.reverse()

    if not entries[-1][2] < entries[0][2]:
        raise CheckFailure(
            "envelope does not decrease over [%d, %d]" % (lo, hi), witness=hi
        )
    return EpsilonTable(entries)


@dataclass
class TheoremDemoReport:
    theta: Fraction
    L: int
    ell: int
    c_hat: object
    cr_table: list
    shift_checks: list
    ratio_report: object
    epsilon_table: EpsilonTable
    epsilon_checks: list = field(default_factory=list)
    f: PowerSeries = None

    @property
    def trend(self):
        return self.ratio_report.trend

    def to_dict(self):
        return {
            "theta": format_value(self.theta),
            "L": self.L,
            "ell": self.ell,
            "hypothesis_constant": format_value(self.c_hat),
            "cr_table": [cr.to_dict() for cr in self.cr_table],
            "shift_checks": [check.to_dict() for check in self.shift_checks],
            "trend": self.trend,
            "ratios": self.ratio_report.to_dict(),
            "epsilon": self.epsilon_table.to_dict(),
            "epsilon_checks": [
                {"M": m, "epsilon": format_value(e), "observed_max": format_value(o)}
                for m, e, o in self.epsilon_checks
            ],
        }

    def to_csv(self):
        eps = {n: e for n, _, e in self.epsilon_table.entries}
        rows = []
        for point in self.ratio_report.points:
            rows.append((point.n, point.value, point.ratio, eps.get(point.n)))
        return dump_csv(["n", "f(n)", "ratio", "epsilon"], rows)


def hypothesis_constant(g, theta):
    """
    max of q(n) = g(n)*n!/n^(theta*n) over the window. The bound
    g(n) = O(n^(theta*n)/n!) is taken as violated when q in the second half
    of the window exceeds every value seen in the first half.
    """
    backend = g.backend
    ctx = backend.context if not backend.is_exact else float_context(DEFAULT_PRECISION)
    theta_f = to_bigfloat(theta, ctx)
    N = g.order
    if N < 4:
        raise InsufficientData("hypothesis check needs N >= 4")
    q = {}
    for n in range(1, N + 1):
        q[n] = to_bigfloat(g[n], ctx) * ctx.factorial(n) / ctx.power(n, theta_f * n)

    head = max(q[n] for n in range(1, N // 2 + 1))
    float_backend = Backend.floating(ctx.prec)
    for n in range(N // 2 + 1, N + 1):
        if strictly_greater(float_backend, q[n], head):
            raise HypothesisFailure(
                "g(n)*n!/n^(theta*n) keeps growing: %s at n=%d above %s"
                % (format_value(q[n], 8), n, format_value(head, 8)),
                witness=n,
            )
    return max(q.values())


def choose_ell(g, L, theta):
    """Smallest ell > L with 1/ell < 1 - theta and g(ell) > 0."""
    ell = max(L + 1, int(1 / (1 - theta)) + 1)
    while ell <= g.order and not g[ell] > 0:
        ell += 1
    if ell > g.order:
        raise PreconditionViolation("no split degree ell with g(ell) > 0 below N")
    return ell


def theorem_demo(g_rule, theta, N, n0=2, trend_config=None, cutoffs=None, jobs=None):
    """
    Run the smoothing argument end to end on g = g_rule: certify the onset L,
    split at ell, tabulate C_r and the shift inequality for small shifts,
    build the eps envelope of f0 and classify the ratios of f = exp(g).
    """
    theta = Fraction(theta)
    if not 0 < theta < 1:
        raise InvalidArgument("theta must lie in (0, 1), got %s" % theta)
    g = PowerSeries.from_rule(g_rule, N, constant=False)

    profile = support_gcd(g, N)
    if profile.gcd != 1:
        raise PreconditionViolation("support gcd is %d, expected 1" % profile.gcd)
    c_hat = hypothesis_constant(g, theta)

    L = find_onset(g)
    if L is None:
        raise OnsetViolation("no certified positivity onset up to N=%d" % N)
    ell = choose_ell(g, L, theta)
    _LOG.info("Theorem demo: L=%d ell=%d theta=%s", L, ell, theta)

    split = split_at(g, ell)
    f0 = series_exp(split.low)
    f1 = series_exp(split.high)
    f = series_exp(g)

    cr_table = run_grid(lambda r: cr_bound(g, split, r, L, f0), SHIFTS, jobs)
    shift_checks = [shift_bound_check(g, split, cr.r, cr, f, f1) for cr in cr_table]

    ratio_report = ratio_sequence(f, n0, config=trend_config or TrendConfig())
    if ratio_report.trend != DIVERGING:
        _LOG.warning("Theorem demo trend is %s, expected diverging", ratio_report.trend)

    epsilon_table = epsilon_envelope(f0, (max(n0, L + 2), N))
    lo, hi = epsilon_table.window
    cutoffs = cutoffs or sorted({lo, (lo + hi) // 4, (lo + hi) // 2})
    epsilon_checks = []
    for M in cutoffs:
        if not lo <= M <= hi:
            continue
        observed = max(f[n] / f[n - 1] for n in range(M, N + 1) if f[n - 1] > 0)
        epsilon_checks.append((M, epsilon_table.at(M), observed))

    return TheoremDemoReport(
        theta=theta,
        L=L,
        ell=ell,
        c_hat=c_hat,
        cr_table=cr_table,
        shift_checks=shift_checks,
        ratio_report=ratio_report,
        epsilon_table=epsilon_table,
        epsilon_checks=epsilon_checks,
        f=f,
    )
