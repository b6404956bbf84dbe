"""
Saddle-point asymptotics for F(x) = exp(G(x)) with G a polynomial with
nonnegative coefficients and G(0) = 0.

For such G the function x*G'(x) increases strictly on (0, inf), so the
saddle point r_n solving x*G'(x) = n is unique and

    [x^n] F(x) ~ F(r_n) / (r_n^n * sqrt(2*pi*B(r_n))),
    B(x) = x^2*G''(x) + x*G'(x).
"""
import logging

from dataclasses import dataclass
from fractions import Fraction

from serieslab._coeffbox import DEFAULT_PRECISION, float_context, to_bigfloat
from serieslab._errors import InvalidArgument, NumericFailure, SamplePointUndefined
from serieslab._series import PowerSeries, series_exp
from serieslab._utils import dump_csv, format_value, run_grid

_LOG = logging.getLogger("serieslab.saddle")

DEFAULT_SADDLE_TOLERANCE = Fraction(1, 10**30)
MAX_ITERATIONS = 10000


def _terms(G):
    """Nonzero (j, c_j) pairs of a saddle-ready polynomial."""
    if G[0] != 0:
        raise InvalidArgument("G(0) must be 0")
    terms = [(j, c) for j, c in enumerate(G) if c != 0]
    if not terms:
        raise InvalidArgument("G is identically zero")
    if any(c < 0 for _, c in terms):
        raise InvalidArgument("G must have nonnegative coefficients")
    return terms


def _context(G, precision=None):
    if precision is not None:
        return float_context(precision)
    if G.backend.is_exact:
        return float_context(DEFAULT_PRECISION)
    return G.backend.context


def monomial_saddle(d, c, n, precision=None):
    """Closed form r_n = (n/(d*c))^(1/d) for G = c*x^d."""
    if d < 1 or not c > 0:
        raise InvalidArgument("monomial needs d >= 1 and c > 0")
    ctx = float_context(precision or DEFAULT_PRECISION)
    return ctx.root(ctx.mpf(n) / (d * to_bigfloat(c, ctx)), d)


def solve_saddle(G, n, tol=None, precision=None):
    """
    Unique positive root of x*G'(x) = n. The bracket [0, 2*(n/(d*g(d)))^(1/d)]
    always encloses it since x*G'(x) >= d*g(d)*x^d. Newton steps are taken
    inside the bracket and replaced by bisection whenever they leave it.
    """
    if n < 1:
        raise InvalidArgument("saddle index must be >= 1, got %d" % n)
    ctx = _context(G, precision)
    terms = [(j, to_bigfloat(c, ctx)) for j, c in _terms(G)]
    tol = to_bigfloat(DEFAULT_SADDLE_TOLERANCE if tol is None else tol, ctx)
    target = ctx.mpf(n)

    def residual(x):
        return sum(j * c * x**j for j, c in terms) - target

    def slope(x):
        return sum(j * j * c * x ** (j - 1) for j, c in terms)

    d, top = terms[-1]
    lo = ctx.mpf(0)
    hi = max(ctx.one, 2 * monomial_saddle(d, top, n, ctx.prec))
    x = (lo + hi) / 2
    for _ in range(MAX_ITERATIONS):
        value = residual(x)
        if abs(value) <= tol:
            return x
        if value > 0:
            hi = x
        else:
            lo = x
        step = x - value / slope(x)
        x = step if lo < step < hi else (lo + hi) / 2
    raise NumericFailure(
        "saddle for n=%d did not converge in %d iterations" % (n, MAX_ITERATIONS),
        bracket=(format_value(lo), format_value(hi)),
    )


@dataclass
class SaddleReport:
    n: int
    r_n: object
    B_rn: object
    G_rn: object
    estimate: object
    exact: object
    rel_err: object

    def to_dict(self):
        return {key: format_value(value) for key, value in vars(self).items()}

    def to_row(self):
        return (
            self.n,
            self.r_n,
            self.B_rn,
            self.G_rn,
            self.estimate,
            self.exact,
            self.rel_err,
        )


SADDLE_CSV_HEADER = ["n", "r_n", "B", "G_at_r", "estimate", "exact", "rel_err"]


def saddle_csv(reports):
    return dump_csv(SADDLE_CSV_HEADER, (r.to_row() for r in reports))


def _extended(G, order):
    """G padded with zeros so its exponential reaches degree ``order``."""
    if G.order >= order:
        return G
    return PowerSeries.polynomial(G.coeffs, order=order, backend=G.backend)


def hayman_estimate(G, n, tol=None, precision=None, exact_series=None):
    """
    Saddle-point estimate of [x^n] exp(G) next to the coefficient computed by
    series_exp. ``exact_series`` may carry a precomputed exp(G) of order >= n.
    """
    ctx = _context(G, precision)
    terms = [(j, to_bigfloat(c, ctx)) for j, c in _terms(G)]
    r = solve_saddle(G, n, tol, ctx.prec)
    G_r = sum(c * r**j for j, c in terms)
    xG1 = sum(j * c * r**j for j, c in terms)
    x2G2 = sum(j * (j - 1) * c * r**j for j, c in terms)
    B = x2G2 + xG1
    estimate = ctx.exp(G_r) / (r**n * ctx.sqrt(2 * ctx.pi * B))

    if exact_series is None or exact_series.order < n:
        exact_series = series_exp(_extended(G, n))
    exact = exact_series[n]
    if exact > 0:
        exact_f = to_bigfloat(exact, ctx)
        rel_err = abs(estimate - exact_f) / exact_f
    else:
        rel_err = None
    _LOG.debug("Saddle n=%d: r=%s rel_err=%s", n, format_value(r, 12), format_value(rel_err, 6))
    return SaddleReport(n, r, B, G_r, estimate, exact, rel_err)


def hayman_grid(G, ns, jobs=None, tol=None, precision=None):
    """hayman_estimate over a grid of n, in input order."""
    ns = list(ns)
    if not ns:
        return []
    exact_series = series_exp(_extended(G, max(ns)))
    return run_grid(
        lambda n: hayman_estimate(G, n, tol, precision, exact_series), ns, jobs
    )


@dataclass
class ExponentFit:
    d: int
    table: list
    drift: tuple

    @property
    def converging(self):
        return self.drift[1] < self.drift[0]

    def s(self, n):
        for m, value in self.table:
            if m == n:
                return value
        raise KeyError(n)

    def to_dict(self):
        return {
            "d": self.d,
            "s": [{"n": n, "s": format_value(v)} for n, v in self.table],
            "drift": [format_value(v) for v in self.drift],
            "converging": self.converging,
        }

    def to_csv(self):
        return dump_csv(["n", "s"], self.table)


def exponent_fit(G, sample, precision=None):
    """
    s(n) = -d * log f(n) / (n log n) with f = exp(G). The drift |s(n) - 1| at
    the largest sampled n should be below the drift at the smallest one.
    """
    sample = sorted(set(sample))
    if not sample:
        raise InvalidArgument("exponent_fit needs at least one sample index")
    d = max(j for j, _ in _terms(G))
    ctx = _context(G, precision)
    f = series_exp(_extended(G, sample[-1]))
    table = []
    for n in sample:
        if n < 2 or not f[n] > 0:
            raise SamplePointUndefined("f(%d) is not positive or n < 2" % n)
        value = to_bigfloat(f[n], ctx)
        table.append((n, -d * ctx.log(value) / (n * ctx.log(n))))
    drift = (abs(table[0][1] - 1), abs(table[-1][1] - 1))
    fit = ExponentFit(d, table, drift)
    if not fit.converging:
        _LOG.warning(
            "Exponent drift grew from %s to %s over the sample",
            format_value(drift[0], 6),
            format_value(drift[1], 6),
        )
    return fit
