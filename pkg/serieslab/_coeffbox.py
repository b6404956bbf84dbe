"""
Coefficient domains and the declarative sequence-rule language.

Two backends carry coefficients: ``Backend.exact()`` works with
:class:`fractions.Fraction` and never rounds, ``Backend.floating(prec)``
works with mpmath big floats rounded to ``prec`` significant bits. Every
sequence used elsewhere in the package is described by a
:class:`SequenceRule` and evaluated with :func:`eval_rule`.
"""
import enum
import json
import logging
import math
import os
import re

from collections import namedtuple
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
from sympy import integer_nthroot

from serieslab._errors import DomainMismatch, InvalidArgument, UsageError
from serieslab._utils import format_rational, is_bigfloat, parse_rational

DEFAULT_PRECISION = int(os.getenv("SERIESLAB_PRECISION", "256"))
DEFAULT_TOLERANCE = os.getenv("SERIESLAB_TOLERANCE", "1e-40")

_LOG = logging.getLogger("serieslab.coeffbox")


@lru_cache(maxsize=None)
def float_context(precision):
    if precision < 1:
        raise InvalidArgument("precision must be a positive number of bits")
    ctx = mpmath.MPContext()
    ctx.prec = precision
    return ctx


class Backend(namedtuple("Backend", ["kind", "precision"])):
    __slots__ = ()

    EXACT = "exact"
    FLOAT = "float"

    @classmethod
    def exact(cls):
        return cls(cls.EXACT, None)

    @classmethod
    def floating(cls, precision=None):
        precision = DEFAULT_PRECISION if precision is None else int(precision)
        if precision < 1:
            raise InvalidArgument("precision must be a positive number of bits")
        return cls(cls.FLOAT, precision)

    @classmethod
    def parse(cls, text, precision=None):
        if text == cls.EXACT:
            return cls.exact()
        if text == cls.FLOAT:
            return cls.floating(precision)
        raise UsageError("unknown backend %r, expected exact or float" % text)

    @property
    def is_exact(self):
        return self.kind == self.EXACT

    @property
    def context(self):
        if self.is_exact:
            raise DomainMismatch("the exact backend has no float context")
        return float_context(self.precision)

    @property
    def zero(self):
        return self.convert(0)

    @property
    def one(self):
        return self.convert(1)

    def convert(self, value):
        if self.is_exact:
            if isinstance(value, float) or is_bigfloat(value):
                raise DomainMismatch(
                    "float value %r cannot enter the exact backend" % value
                )
            return Fraction(value)
        return to_bigfloat(value, self.context)

    def describe(self):
        if self.is_exact:
            return {"kind": self.EXACT}
        return {"kind": self.FLOAT, "precision": self.precision}


def to_bigfloat(value, ctx):
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return ctx.mpf(value.numerator)
        return ctx.mpf(value.numerator) / ctx.mpf(value.denominator)
    return ctx.mpf(value)


class BigFloat(namedtuple("BigFloat", ["value", "precision"])):
    """A big float together with the precision it was computed at."""

    __slots__ = ()

    @classmethod
    def of(cls, value, precision=None):
        precision = DEFAULT_PRECISION if precision is None else precision
        return cls(to_bigfloat(value, float_context(precision)), precision)


class Ordering(enum.Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"


def compare_with_tolerance(a, b, tol):
    """
    Three-way comparison of two BigFloats where ``|a-b| <= tol`` collapses to
    EQUAL. Values computed at different precisions are compared at the
    coarser of the two.
    """
    if tol < 0:
        raise InvalidArgument("tolerance must be nonnegative, got %r" % (tol,))
    ctx = float_context(min(a.precision, b.precision))
    diff = to_bigfloat(a.value, ctx) - to_bigfloat(b.value, ctx)
    if abs(diff) <= to_bigfloat(tol, ctx):
        return Ordering.EQUAL
    return Ordering.LESS if diff < 0 else Ordering.GREATER


def strictly_greater(backend, a, b, tol=None):
    """a > b beyond tolerance; exact values compare exactly."""
    if backend.is_exact:
        return a > b
    tol = Fraction(DEFAULT_TOLERANCE) if tol is None else tol
    ordering = compare_with_tolerance(
        BigFloat(a, backend.precision), BigFloat(b, backend.precision), tol
    )
    return ordering is Ordering.GREATER


# --- sequence rules ---------------------------------------------------------

EXPLICIT = "explicit"
POLYNOMIAL = "polynomial"
CONSTANT_ONE = "constant-one"
GEOMETRIC = "geometric"
POWER_OVER_FACTORIAL = "power-over-factorial"
BINARY_SUPPORT = "binary-support"
SHIFTED = "shifted"
SCALED = "scaled"
NAMED_BUILTIN = "named-builtin"

KINDS = (
    EXPLICIT,
    POLYNOMIAL,
    CONSTANT_ONE,
    GEOMETRIC,
    POWER_OVER_FACTORIAL,
    BINARY_SUPPORT,
    SHIFTED,
    SCALED,
    NAMED_BUILTIN,
)


def _broom_labelled(n):
    if n == 1:
        return 1
    if n > 0 and n % 3 == 0:
        m = n // 3
        return 2**m * math.factorial(3 * m) // math.factorial(2 * m)
    return 0


def _broom_unlabelled(n):
    if n == 1:
        return 1
    if n > 0 and n % 3 == 0:
        return 2 ** (n // 3)
    return 0


BUILTINS = {
    "broom-labelled": _broom_labelled,
    "broom-unlabelled": _broom_unlabelled,
    "height1-labelled": lambda n: n,
    "selection-labelled": lambda n: 2**n - 1,
    "selection-unlabelled": lambda n: n,
    "factorial-geometric": lambda n: math.factorial(n) * 2**n if n else 0,
    "inverse-factorial": lambda n: Fraction(1, math.factorial(n)),
}


@dataclass(frozen=True)
class SequenceRule:
    """
    Declarative recipe for a coefficient sequence. ``params`` is a tuple of
    (name, value) pairs so rules stay hashable and immutable; nested rules
    (for the shifted/scaled wrappers) live in the ``inner`` parameter.
    """

    kind: str
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument("unknown rule kind %r" % self.kind)

    def get(self, name, default=None):
        for key, value in self.params:
            if key == name:
                return value
        return default

    @property
    def is_exact(self):
        if self.kind == POWER_OVER_FACTORIAL:
            return bool(self.get("floor")) or self.get("alpha").denominator == 1
        if self.kind in (SHIFTED, SCALED):
            return self.get("inner").is_exact
        return True

    def describe(self):
        return rule_to_dict(self)

    def __str__(self):
        return json.dumps(rule_to_dict(self), sort_keys=True)


def _rule(kind, **params):
    return SequenceRule(kind, tuple(sorted(params.items())))


def explicit(values):
    return _rule(EXPLICIT, values=tuple(Fraction(v) for v in values))


def polynomial(coeffs):
    return _rule(POLYNOMIAL, coeffs=tuple(Fraction(c) for c in coeffs))


def constant_one():
    return _rule(CONSTANT_ONE)


def geometric(c, b):
    return _rule(GEOMETRIC, c=Fraction(c), b=Fraction(b))


def power_over_factorial(alpha, floor=False):
    alpha = Fraction(alpha)
    if alpha < 0:
        raise InvalidArgument("alpha must be nonnegative")
    return _rule(POWER_OVER_FACTORIAL, alpha=alpha, floor=bool(floor))


def binary_support(support):
    support = tuple(sorted(set(int(n) for n in support)))
    if any(n < 0 for n in support):
        raise InvalidArgument("support indices must be nonnegative")
    return _rule(BINARY_SUPPORT, support=support)


def shifted(inner, by):
    if by < 0:
        raise InvalidArgument("shift must be nonnegative")
    return _rule(SHIFTED, inner=inner, by=int(by))


def scaled(inner, factor=1, base=1):
    return _rule(SCALED, inner=inner, factor=Fraction(factor), base=Fraction(base))


def named_builtin(tag):
    if tag not in BUILTINS:
        raise InvalidArgument("unknown builtin sequence %r" % tag)
    return _rule(NAMED_BUILTIN, tag=tag)


def _exact_power_over_factorial(alpha, floor, n):
    if n == 0:
        return Fraction(1)
    # n^(p n / q) = (n^(p n))^(1/q)
    root, is_exact = integer_nthroot(n ** (alpha.numerator * n), alpha.denominator)
    if not (is_exact or floor):
        raise DomainMismatch("n^(alpha n) is irrational at n=%d" % n)
    return Fraction(int(root), math.factorial(n))


def _float_power_over_factorial(alpha, n, ctx):
    return ctx.power(n, to_bigfloat(alpha, ctx) * n) / ctx.factorial(n)


def _value(rule, n, backend):
    kind = rule.kind
    if kind == EXPLICIT:
        values = rule.get("values")
        return backend.convert(values[n] if n < len(values) else 0)
    if kind == POLYNOMIAL:
        total = Fraction(0)
        for coeff in reversed(rule.get("coeffs")):
            total = total * n + coeff
        return backend.convert(total)
    if kind == CONSTANT_ONE:
        return backend.one
    if kind == GEOMETRIC:
        return backend.convert(rule.get("c") * rule.get("b") ** n)
    if kind == POWER_OVER_FACTORIAL:
        alpha, floor = rule.get("alpha"), rule.get("floor")
        if floor or alpha.denominator == 1:
            return backend.convert(_exact_power_over_factorial(alpha, floor, n))
        return _float_power_over_factorial(alpha, n, backend.context)
    if kind == BINARY_SUPPORT:
        return backend.one if n in rule.get("support") else backend.zero
    if kind == SHIFTED:
        by = rule.get("by")
        if n < by:
            return backend.zero
        return _value(rule.get("inner"), n - by, backend)
    if kind == SCALED:
        scale = rule.get("factor") * rule.get("base") ** n
        return backend.convert(scale) * _value(rule.get("inner"), n, backend)
    return backend.convert(BUILTINS[rule.get("tag")](n))


def eval_rule(rule, n, backend=None):
    """
    Return the n-th term of ``rule``. Without an explicit backend exact rules
    evaluate exactly and float-only rules at the default precision.
    """
    if n < 0:
        raise InvalidArgument("rule index must be >= 0, got %d" % n)
    if backend is None:
        backend = Backend.exact() if rule.is_exact else Backend.floating()
    elif backend.is_exact and not rule.is_exact:
        raise DomainMismatch("rule %s only has float values" % rule)
    return _value(rule, n, backend)


# --- serialization ----------------------------------------------------------


def _param_to_json(value):
    if isinstance(value, SequenceRule):
        return rule_to_dict(value)
    if isinstance(value, bool):
        return value
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, tuple):
        return [_param_to_json(v) for v in value]
    return value


def rule_to_dict(rule):
    out = {"kind": rule.kind}
    for key, value in rule.params:
        out[key] = _param_to_json(value)
    return out


def _require(data, key, where):
    if key not in data:
        raise UsageError("%s: missing field %r" % (where, key))
    return data[key]


def _rational_list(data, key, where):
    values = _require(data, key, where)
    if not isinstance(values, list):
        raise UsageError("%s.%s: expected a list" % (where, key))
    return [
        parse_rational(v, "%s.%s[%d]" % (where, key, i)) for i, v in enumerate(values)
    ]


def rule_from_dict(data, where="rule"):
    if not isinstance(data, dict):
        raise UsageError("%s: expected a JSON object" % where)
    kind = _require(data, "kind", where)
    try:
        if kind == EXPLICIT:
            return explicit(_rational_list(data, "values", where))
        if kind == POLYNOMIAL:
            return polynomial(_rational_list(data, "coeffs", where))
        if kind == CONSTANT_ONE:
            return constant_one()
        if kind == GEOMETRIC:
            return geometric(
                parse_rational(_require(data, "c", where), where + ".c"),
                parse_rational(_require(data, "b", where), where + ".b"),
            )
        if kind == POWER_OVER_FACTORIAL:
            return power_over_factorial(
                parse_rational(_require(data, "alpha", where), where + ".alpha"),
                bool(data.get("floor", False)),
            )
        if kind == BINARY_SUPPORT:
            return binary_support(_require(data, "support", where))
        if kind == SHIFTED:
            return shifted(
                rule_from_dict(_require(data, "inner", where), where + ".inner"),
                int(_require(data, "by", where)),
            )
        if kind == SCALED:
            return scaled(
                rule_from_dict(_require(data, "inner", where), where + ".inner"),
                parse_rational(data.get("factor", 1), where + ".factor"),
                parse_rational(data.get("base", 1), where + ".base"),
            )
        if kind == NAMED_BUILTIN:
            return named_builtin(_require(data, "tag", where))
    except (InvalidArgument, TypeError, ValueError) as exc:
        raise UsageError("%s: %s" % (where, exc))
    raise UsageError("%s.kind: unknown rule kind %r" % (where, kind))


def load_rule(path):
    try:
        with open(path) as f:
            data = json.load(f)
    except (OSError, ValueError) as exc:
        raise UsageError("%s: cannot read rule file: %s" % (path, exc))
    rule = rule_from_dict(data, where=path)
    _LOG.debug("Loaded rule %s from %s", rule, path)
    return rule


_POWER_TEXT = re.compile(
    r"^(?P<floor>floor\()?n\^\(?(?P<alpha>\d+(?:/\d+)?)?\s*\*?\s*n\)?(?(floor)\))/n!$"
)

_ALIASES = {
    "1": constant_one,
    "1/n!": lambda: power_over_factorial(0),
}


def parse_rule(text):
    """
    Accept a rule file path, an inline JSON object, a builtin tag or one of
    the shorthands ``1``, ``1/n!``, ``n^n/n!``, ``n^(a n)/n!`` and
    ``floor(n^(a n))/n!``.
    """
    text = text.strip()
    if text.startswith("{"):
        try:
            return rule_from_dict(json.loads(text), where="--rule")
        except ValueError as exc:
            raise UsageError("--rule: invalid JSON: %s" % exc)
    if text in _ALIASES:
        return _ALIASES[text]()
    if text in BUILTINS:
        return named_builtin(text)
    match = _POWER_TEXT.match(text)
    if match:
        alpha = Fraction(match.group("alpha") or 1)
        return power_over_factorial(alpha, floor=bool(match.group("floor")))
    if os.path.exists(text):
        return load_rule(text)
    raise UsageError("cannot understand rule %r" % text)
