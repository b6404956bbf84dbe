import json
import logging

from collections import namedtuple

from serieslab._coeffbox import Backend, eval_rule, to_bigfloat
from serieslab._errors import (
    DomainMismatch,
    IntegralityFailure,
    InvalidArgument,
    PreconditionViolation,
    UsageError,
)
from serieslab._utils import dump_csv, format_value, parse_rational

_LOG = logging.getLogger("serieslab.series")


class PowerSeries:
    """
    Truncated power series c(0) + c(1)x + ... + c(N)x^N. Instances are
    immutable; every operation returns a new series with the same backend
    and truncation order. Equalities between series always mean
    "equal up to order N".
    """

    __slots__ = ("_coeffs", "_backend")

    def __init__(self, coeffs, backend):
        coeffs = tuple(backend.convert(c) for c in coeffs)
        if not coeffs:
            raise InvalidArgument("a series needs at least the constant term")
        object.__setattr__(self, "_coeffs", coeffs)
        object.__setattr__(self, "_backend", backend)

    def __setattr__(self, name, value):
        raise AttributeError("PowerSeries is immutable")

    @classmethod
    def from_rule(cls, rule, order, backend=None, constant=True):
        """
        Series with c(n) = rule(n) for n <= order. With constant=False the
        constant term is forced to 0, which is how g(n), p_L(n) and p_U(n)
        rules are consumed.
        """
        if backend is None:
            backend = Backend.exact() if rule.is_exact else Backend.floating()
        coeffs = [eval_rule(rule, n, backend) for n in range(order + 1)]
        if not constant:
            coeffs[0] = backend.zero
        return cls(coeffs, backend)

    @classmethod
    def polynomial(cls, coeffs, order=None, backend=None):
        backend = backend or Backend.exact()
        coeffs = list(coeffs)
        order = len(coeffs) - 1 if order is None else order
        if len(coeffs) > order + 1:
            raise InvalidArgument("polynomial degree exceeds truncation order")
        return cls(coeffs + [0] * (order + 1 - len(coeffs)), backend)

    @property
    def coeffs(self):
        return self._coeffs

    @property
    def backend(self):
        return self._backend

    @property
    def order(self):
        return len(self._coeffs) - 1

    @property
    def degree(self):
        """Index of the last nonzero coefficient, -1 for the zero series."""
        for n in range(self.order, -1, -1):
            if self._coeffs[n] != 0:
                return n
        return -1

    def __len__(self):
        return len(self._coeffs)

    def __iter__(self):
        return iter(self._coeffs)

    def __getitem__(self, n):
        return self._coeffs[n]

    def __eq__(self, other):
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return self._backend == other._backend and self._coeffs == other._coeffs

    def __hash__(self):
        return hash((self._backend, self._coeffs))

    def __repr__(self):
        return "PowerSeries(order=%d, backend=%s, coeffs=%s)" % (
            self.order,
            self._backend.kind,
            [format_value(c, 8) for c in self._coeffs[:6]],
        )

    def __add__(self, other):
        _check_compatible(self, other)
        return PowerSeries([a + b for a, b in zip(self, other)], self._backend)

    def __sub__(self, other):
        _check_compatible(self, other)
        return PowerSeries([a - b for a, b in zip(self, other)], self._backend)

    def __mul__(self, other):
        return ps_mul(self, other)

    def truncate(self, order):
        if order > self.order:
            raise InvalidArgument("cannot extend a series beyond its order")
        return PowerSeries(self._coeffs[: order + 1], self._backend)

    def to_backend(self, backend):
        if backend == self._backend:
            return self
        if backend.is_exact:
            raise DomainMismatch("cannot move float coefficients to the exact backend")
        ctx = backend.context
        return PowerSeries([to_bigfloat(c, ctx) for c in self._coeffs], backend)

    def is_nonnegative(self):
        return all(c >= 0 for c in self._coeffs)

    def support(self, start=1):
        return [n for n in range(start, self.order + 1) if self._coeffs[n] > 0]

    def to_dict(self):
        return {
            "order": self.order,
            "backend": self._backend.describe(),
            "coeffs": [format_value(c) for c in self._coeffs],
        }

    def to_csv(self):
        return dump_csv(["n", "coefficient"], enumerate(self._coeffs))

    @classmethod
    def from_dict(cls, data, where="series"):
        try:
            backend_info = data["backend"]
            coeffs = data["coeffs"]
            order = int(data["order"])
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError("%s: malformed series file: %s" % (where, exc))
        if isinstance(backend_info, str):
            backend_info = {"kind": backend_info}
        backend = Backend.parse(
            backend_info.get("kind"), backend_info.get("precision")
        )
        if len(coeffs) != order + 1:
            raise UsageError(
                "%s: order %d needs %d coefficients, found %d"
                % (where, order, order + 1, len(coeffs))
            )
        if backend.is_exact:
            values = [
                parse_rational(c, "%s.coeffs[%d]" % (where, i))
                for i, c in enumerate(coeffs)
            ]
        else:
            values = [backend.context.mpf(str(c)) for c in coeffs]
        return cls(values, backend)

    @classmethod
    def load(cls, path):
        try:
            with open(path) as f:
                data = json.load(f)
        except (OSError, ValueError) as exc:
            raise UsageError("%s: cannot read series file: %s" % (path, exc))
        # accept a whole report written by another command
        if isinstance(data, dict) and "report" in data:
            data = data["report"]
        return cls.from_dict(data, where=path)


SplitPair = namedtuple("SplitPair", ["ell", "low", "high"])


def _check_compatible(a, b):
    if a.backend != b.backend:
        raise InvalidArgument(
            "backend mismatch: %s vs %s" % (a.backend.kind, b.backend.kind)
        )
    if a.order != b.order:
        raise InvalidArgument("order mismatch: %d vs %d" % (a.order, b.order))


def ps_mul(a, b):
    """Cauchy product truncated at the common order."""
    _check_compatible(a, b)
    zero = a.backend.zero
    out = [zero] * (a.order + 1)
    nonzero_b = [(j, c) for j, c in enumerate(b) if c != 0]
    for i, ca in enumerate(a):
        if ca == 0:
            continue
        for j, cb in nonzero_b:
            if i + j > a.order:
                break
            out[i + j] += ca * cb
    return PowerSeries(out, a.backend)


def series_exp(g):
    """
    f = exp(g) through n*f(n) = sum_{j=1..n} j*g(j)*f(n-j), f(0) = 1.
    Exact on the exact backend.
    """
    if g[0] != 0:
        raise InvalidArgument("series_exp needs g(0) = 0, got %s" % format_value(g[0]))
    backend = g.backend
    weighted = [(j, j * c) for j, c in enumerate(g) if j > 0 and c != 0]
    f = [backend.one]
    for n in range(1, g.order + 1):
        acc = backend.zero
        for j, jg in weighted:
            if j > n:
                break
            acc += jg * f[n - j]
        f.append(acc / n)
    return PowerSeries(f, backend)


def series_log(f):
    """Inverse of series_exp: g with exp(g) = f up to the order of f."""
    if f[0] != 1:
        raise InvalidArgument("series_log needs f(0) = 1, got %s" % format_value(f[0]))
    backend = f.backend
    g = [backend.zero]
    for n in range(1, f.order + 1):
        acc = n * f[n]
        for j in range(1, n):
            if g[j] != 0:
                acc -= j * g[j] * f[n - j]
        g.append(acc / n)
    return PowerSeries(g, backend)


def euler_product(p, order):
    """
    prod_{j>=1} (1 - x^j)^(-p(j)) truncated at ``order``, computed as the
    exponential of sum_j p(j) sum_k x^(jk)/k.
    """
    backend = Backend.exact()
    if not p.is_exact:
        raise InvalidArgument("euler_product needs an exact integer rule")
    log_coeffs = [backend.zero] * (order + 1)
    for j in range(1, order + 1):
        pj = eval_rule(p, j, backend)
        if pj < 0 or pj.denominator != 1:
            raise InvalidArgument("p(%d) = %s is not a nonnegative integer" % (j, pj))
        if pj == 0:
            continue
        for m in range(j, order + 1, j):
            log_coeffs[m] += j * pj
    for m in range(1, order + 1):
        log_coeffs[m] /= m

    result = series_exp(PowerSeries(log_coeffs, backend))
    for n, c in enumerate(result):
        if c.denominator != 1 or c < 0:
            raise IntegralityFailure(
                "Euler product coefficient %d is %s" % (n, format_value(c))
            )
    _LOG.debug("Euler product computed to order %d", order)
    return result


def eval_at_positive(g, x0):
    """Horner evaluation of the stored coefficients at x0 > 0."""
    if x0 <= 0:
        raise InvalidArgument("evaluation point must be positive, got %s" % (x0,))
    backend = g.backend
    if backend.is_exact and (isinstance(x0, float) or hasattr(x0, "_mpf_")):
        backend = Backend.floating()
        g = g.to_backend(backend)
    x = backend.convert(x0)
    acc = backend.zero
    for c in reversed(g.coeffs):
        acc = acc * x + c
    return acc


def exp_eval_at_positive(g, x0, precision=None):
    """e^{G(x0)} at the given float precision."""
    backend = Backend.floating(precision)
    value = eval_at_positive(g, x0)
    ctx = backend.context
    return ctx.exp(to_bigfloat(value, ctx))


def split_at(g, ell):
    """
    Split g into the part of degree <= ell and the part of degree > ell.
    The coefficient g(ell) must be strictly positive.
    """
    if not 1 <= ell <= g.order:
        raise InvalidArgument("split degree %d outside 1..%d" % (ell, g.order))
    if not g[ell] > 0:
        raise PreconditionViolation(
            "split degree %d needs g(%d) > 0, got %s" % (ell, ell, format_value(g[ell]))
        )
    zero = g.backend.zero
    low = [c if n <= ell else zero for n, c in enumerate(g)]
    high = [c if n > ell else zero for n, c in enumerate(g)]
    return SplitPair(ell, PowerSeries(low, g.backend), PowerSeries(high, g.backend))
