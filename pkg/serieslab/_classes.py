"""
Adequate classes of finite structures described by their component counts.

A class carries p_L(n), the number of labelled connected structures of size
n, and p_U(n), the number of unlabelled ones. The totals follow from

    A_L(x) = exp(sum p_L(n) x^n / n!)        (labelled, EGF)
    A_U(x) = prod (1 - x^j)^(-p_U(j))        (unlabelled, OGF)

and the 0-1 law criteria below only read finite windows of these series.
"""
import json
import logging
import math

from collections import namedtuple
from dataclasses import dataclass, field
from fractions import Fraction

from serieslab._coeffbox import (
    BINARY_SUPPORT,
    DEFAULT_PRECISION,
    EXPLICIT,
    SCALED,
    SHIFTED,
    Backend,
    binary_support,
    constant_one,
    eval_rule,
    explicit,
    float_context,
    named_builtin,
    rule_from_dict,
    rule_to_dict,
    scaled,
    to_bigfloat,
)
from serieslab._diagnostics import DIVERGING, TrendConfig, ratio_sequence
from serieslab._errors import (
    IntegralityFailure,
    InvalidArgument,
    NotApplicable,
    PreconditionViolation,
    UnknownClass,
    UsageError,
)
from serieslab._series import PowerSeries, euler_product, series_exp
from serieslab._utils import format_value, gcd_of

_LOG = logging.getLogger("serieslab.classes")

LABELLED = "labelled"
UNLABELLED = "unlabelled"

HOLDS = "holds-by-criterion"
FAILS = "fails-by-criterion"
INCONCLUSIVE = "inconclusive"

RATIO_DIVERGENCE = "theorem-6.1"
BELL = "bell-poly-bounded"
SCHUR = "schur-finitely-generated"
BATEMAN_ERDOS = "bateman-erdos"
RADIUS = "radius-in-(0,1)"

_CTX = float_context(DEFAULT_PRECISION)


@dataclass(frozen=True)
class ClassSpec:
    name: str
    p_L: object = None
    p_U: object = None
    params: tuple = ()

    def get(self, name, default=None):
        for key, value in self.params:
            if key == name:
                return value
        return default

    def labelled_rule(self):
        if self.p_L is None:
            raise NotApplicable("class %s has no labelled component counts" % self.name)
        return self.p_L

    def unlabelled_rule(self):
        if self.p_U is None:
            raise NotApplicable("class %s has no unlabelled component counts" % self.name)
        return self.p_U

    def to_dict(self):
        out = {"name": self.name, "params": {k: _jsonable(v) for k, v in self.params}}
        if self.p_L is not None:
            out["p_L"] = rule_to_dict(self.p_L)
        if self.p_U is not None:
            out["p_U"] = rule_to_dict(self.p_U)
        return out


def _jsonable(value):
    if isinstance(value, tuple):
        return list(value)
    if isinstance(value, Fraction):
        return format_value(value)
    return value


def _finite_components(sizes):
    """Cliques of the given sizes: each has exactly one labelling."""
    sizes = [int(s) for s in sizes]
    if not sizes or any(s < 1 for s in sizes):
        raise InvalidArgument("component sizes must be positive integers")
    counts = [0] * (max(sizes) + 1)
    for size in sizes:
        counts[size] += 1
    rule = explicit(counts)
    return rule, rule


def unary_predicates():
    one = binary_support([1])
    return ClassSpec("unary-predicates", one, one)


def height1_forests():
    return ClassSpec("height1-forests", named_builtin("height1-labelled"), constant_one())


def equivalence_relations():
    return ClassSpec("equivalence-relations", constant_one(), constant_one())


def selection_partitions():
    return ClassSpec(
        "selection-partitions",
        named_builtin("selection-labelled"),
        named_builtin("selection-unlabelled"),
    )


def broom():
    return ClassSpec(
        "broom",
        named_builtin("broom-labelled"),
        named_builtin("broom-unlabelled"),
        (("stated_radius", "2^(1/3)"),),
    )


def finitely_many_components(sizes=(1, 2)):
    p_L, p_U = _finite_components(sizes)
    return ClassSpec(
        "finitely-many-components", p_L, p_U, (("sizes", tuple(int(s) for s in sizes)),)
    )


BUILTIN_CLASSES = {
    "unary-predicates": unary_predicates,
    "height1-forests": height1_forests,
    "finitely-many-components": finitely_many_components,
    "equivalence-relations": equivalence_relations,
    "selection-partitions": selection_partitions,
    "broom": broom,
}


def builtin_class(name, colors=1, sizes=None):
    if name not in BUILTIN_CLASSES:
        raise UnknownClass("unknown class %r" % name)
    if sizes is not None:
        if name != "finitely-many-components":
            raise InvalidArgument("component sizes only apply to finitely-many-components")
        spec = finitely_many_components(sizes)
    else:
        spec = BUILTIN_CLASSES[name]()
    return color_wrapper(spec, colors)


def color_wrapper(spec, r):
    """
    Color every element of a labelled structure with one of r colors:
    p_L'(n) = p_L(n) * r^n. The unlabelled side is left undefined.
    """
    if r < 1:
        raise InvalidArgument("color count must be >= 1, got %r" % (r,))
    if r == 1:
        return spec
    return ClassSpec(
        "%s-%d-colored" % (spec.name, r),
        scaled(spec.labelled_rule(), 1, r),
        None,
        spec.params + (("colors", r),),
    )


def class_from_dict(data, where="class"):
    if not isinstance(data, dict):
        raise UsageError("%s: expected a JSON object" % where)
    if "builtin" in data:
        try:
            return builtin_class(
                data["builtin"], int(data.get("colors", 1)), data.get("sizes")
            )
        except (InvalidArgument, TypeError, ValueError) as exc:
            raise UsageError("%s: %s" % (where, exc))
    p_L = data.get("p_L")
    p_U = data.get("p_U")
    if p_L is None and p_U is None:
        raise UsageError("%s: needs a builtin name or at least one of p_L, p_U" % where)
    return ClassSpec(
        str(data.get("name", "custom")),
        rule_from_dict(p_L, where + ".p_L") if p_L is not None else None,
        rule_from_dict(p_U, where + ".p_U") if p_U is not None else None,
    )


def load_class(text, colors=1):
    """A builtin class name or the path of a JSON class file."""
    if text in BUILTIN_CLASSES:
        return builtin_class(text, colors)
    try:
        with open(text) as f:
            data = json.load(f)
    except OSError:
        raise UnknownClass("unknown class %r" % text)
    except ValueError as exc:
        raise UsageError("%s: invalid JSON: %s" % (text, exc))
    return color_wrapper(class_from_dict(data, where=text), colors)


# --- totals -----------------------------------------------------------------

LabelledTotals = namedtuple("LabelledTotals", ["series", "counts"])


def _component_counts(rule, N, side):
    counts = []
    for n in range(N + 1):
        value = eval_rule(rule, n, Backend.exact()) if n else Fraction(0)
        if value < 0 or value.denominator != 1:
            raise InvalidArgument(
                "%s component count at n=%d is %s, not a nonnegative integer"
                % (side, n, format_value(value))
            )
        counts.append(int(value))
    return counts


def labelled_totals(spec, N):
    """A_L = exp(P_L) with a_L(n) = n! [x^n] A_L checked to be integers."""
    p_L = _component_counts(spec.labelled_rule(), N, LABELLED)
    P = PowerSeries(
        [Fraction(p, math.factorial(n)) for n, p in enumerate(p_L)], Backend.exact()
    )
    A = series_exp(P)
    counts = []
    for n, c in enumerate(A):
        total = c * math.factorial(n)
        if total.denominator != 1 or total < 0:
            raise IntegralityFailure(
                "a_L(%d) = %s for class %s" % (n, format_value(total), spec.name)
            )
        counts.append(int(total))
    return LabelledTotals(A, counts)


def unlabelled_totals(spec, N):
    return euler_product(spec.unlabelled_rule(), N)


# --- radius -----------------------------------------------------------------


@dataclass
class RadiusEstimate:
    value: object
    band: object
    window: tuple

    def to_dict(self):
        return {
            "value": format_value(self.value),
            "band": format_value(self.band),
            "window": list(self.window),
        }


def _coefficients(source, N):
    if isinstance(source, PowerSeries):
        return [source[n] for n in range(min(N, source.order) + 1)]
    return [eval_rule(source, n) for n in range(N + 1)]


def radius_estimate(source, N):
    """
    Root test 1/max a(n)^(1/n) over the tail window [N/2, N]. The band is
    the spread between the estimates of the two halves of the window.
    """
    coeffs = _coefficients(source, N)
    N = len(coeffs) - 1
    lo = max(1, N // 2)
    roots = [
        (n, _CTX.exp(_CTX.log(to_bigfloat(coeffs[n], _CTX)) / n))
        for n in range(lo, N + 1)
        if coeffs[n] > 0
    ]
    if not roots:
        raise NotApplicable("no positive coefficient in [%d, %d]" % (lo, N))
    mid = (lo + N) // 2
    value = 1 / max(r for _, r in roots)
    early = [r for n, r in roots if n <= mid]
    late = [r for n, r in roots if n > mid]
    band = abs(1 / max(early) - 1 / max(late)) if early and late else _CTX.zero
    return RadiusEstimate(value, band, (lo, N))


# --- Schur ------------------------------------------------------------------


def finite_support(rule):
    """Support of a rule with finitely many nonzero terms, else None."""
    if rule.kind == BINARY_SUPPORT:
        return [n for n in rule.get("support") if n > 0]
    if rule.kind == EXPLICIT:
        return [n for n, v in enumerate(rule.get("values")) if n > 0 and v != 0]
    if rule.kind == SHIFTED:
        inner = finite_support(rule.get("inner"))
        return None if inner is None else [n + rule.get("by") for n in inner]
    if rule.kind == SCALED:
        return finite_support(rule.get("inner"))
    return None


@dataclass
class SchurFit:
    r: int
    C: object
    C_limit: Fraction
    residuals: list
    drift: tuple

    @property
    def converging(self):
        return self.drift[1] <= self.drift[0]

    def to_dict(self):
        return {
            "r": self.r,
            "C": format_value(self.C),
            "C_limit": format_value(self.C_limit),
            "drift": [format_value(d) for d in self.drift],
            "converging": self.converging,
            "residuals": [
                {"n": n, "residual": format_value(v)} for n, v in self.residuals
            ],
        }


def schur_fit(spec, N):
    """
    a_U(n) ~ C n^(r-1) for r = sum p_U(n) finite, with
    C = 1/((r-1)! prod j^p_U(j)).
    """
    rule = spec.unlabelled_rule()
    support = finite_support(rule)
    if support is None:
        raise NotApplicable("p_U of %s does not have finite support" % spec.name)
    support = [j for j in support if eval_rule(rule, j, Backend.exact()) > 0]
    if not support:
        raise NotApplicable("p_U of %s is identically zero" % spec.name)
    if gcd_of(support) != 1:
        raise PreconditionViolation("p_U support gcd is %d" % gcd_of(support))

    counts = {j: int(eval_rule(rule, j, Backend.exact())) for j in support}
    r = sum(counts.values())
    denominator = math.factorial(r - 1)
    for j, p in counts.items():
        denominator *= j**p
    C_limit = Fraction(1, denominator)

    a_U = euler_product(rule, N)
    lo = max(1, N // 2)
    residuals = [(n, Fraction(int(a_U[n]), n ** (r - 1)) - C_limit) for n in range(lo, N + 1)]
    half = len(residuals) // 2
    drift = (
        max(abs(v) for _, v in residuals[: max(half, 1)]),
        max(abs(v) for _, v in residuals[half:]),
    )
    C = Fraction(int(a_U[N]), N ** (r - 1))
    return SchurFit(r, C, C_limit, residuals, drift)


# --- verdicts ---------------------------------------------------------------


@dataclass(frozen=True)
class VerdictConfig:
    """
    theta_max: largest on-window exponent accepted for the labelled criterion.
    radius_cutoff: estimate + band must stay below this for a radius disproof.
    poly_slack: growth allowed in log p_U(n)/log n between window halves.
    poly_degree_max: largest polynomial degree accepted as bounded.
    shift_tests: number of smallest k with p_L(k) > 0 to shift-test.
    """

    theta_max: Fraction = Fraction(19, 20)
    radius_cutoff: Fraction = Fraction(49, 50)
    poly_slack: Fraction = Fraction(1, 4)
    poly_degree_max: int = 6
    shift_tests: int = 3
    window_start: int = 2
    trend: TrendConfig = field(default_factory=TrendConfig)

    def to_dict(self):
        return {
            "theta_max": format_value(self.theta_max),
            "radius_cutoff": format_value(self.radius_cutoff),
            "poly_slack": format_value(self.poly_slack),
            "poly_degree_max": self.poly_degree_max,
            "shift_tests": self.shift_tests,
            "window_start": self.window_start,
            "trend": self.trend.to_dict(),
        }


@dataclass
class LawVerdict:
    side: str
    criterion: str
    verdict: str
    evidence: dict
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {
            "side": self.side,
            "criterion": self.criterion,
            "verdict": self.verdict,
            "evidence": self.evidence,
            "notes": list(self.notes),
        }


def labelled_exponents(rule, N):
    """log p_L(n) / (n log n) for 2 <= n <= N with p_L(n) > 0."""
    table = []
    for n in range(2, N + 1):
        value = eval_rule(rule, n, Backend.exact())
        if value > 0:
            table.append((n, _CTX.log(to_bigfloat(value, _CTX)) / (n * _CTX.log(n))))
    return table


def labelled_01_verdict(spec, N, config=None):
    config = config or VerdictConfig()
    rule = spec.labelled_rule()
    exponents = labelled_exponents(rule, N)
    theta_hat = max((e for _, e in exponents), default=_CTX.zero)
    hypothesis = theta_hat <= to_bigfloat(config.theta_max, _CTX)

    A = labelled_totals(spec, N).series
    main = ratio_sequence(A, config.window_start, config=config.trend)
    shifts = []
    for k in range(1, N + 1):
        if len(shifts) == config.shift_tests:
            break
        if eval_rule(rule, k, Backend.exact()) > 0:
            report = ratio_sequence(
                A, max(k, config.window_start), shift=k, config=config.trend
            )
            shifts.append((k, report.trend))

    evidence = {
        "theta_hat": format_value(theta_hat),
        "theta_max": format_value(config.theta_max),
        "exponents": [{"n": n, "exponent": format_value(e)} for n, e in exponents],
        "ratio_trend": main.trend,
        "shift_trends": [{"k": k, "trend": t} for k, t in shifts],
        "config": config.to_dict(),
    }
    notes = []
    try:
        rho_L = radius_estimate(A, N)
        evidence["rho_L"] = rho_L.to_dict()
        if not rho_L.value > 0:
            notes.append("radius of A_L did not come out positive")
    except NotApplicable as exc:
        notes.append(str(exc))

    all_diverge = main.trend == DIVERGING and all(t == DIVERGING for _, t in shifts)
    if not hypothesis:
        verdict = INCONCLUSIVE
        notes.append("on-window exponent exceeds theta_max; the criterion does not apply")
    elif all_diverge:
        verdict = HOLDS
    else:
        verdict = INCONCLUSIVE
        notes.append("ratio trends are not all diverging on the window")
    _LOG.info("Labelled verdict for %s: %s", spec.name, verdict)
    return LawVerdict(LABELLED, RATIO_DIVERGENCE, verdict, evidence, notes)


def polynomial_slopes(rule, N):
    """log p_U(n) / log n for 2 <= n <= N with p_U(n) > 0."""
    table = []
    for n in range(2, N + 1):
        value = eval_rule(rule, n, Backend.exact())
        if value > 0:
            table.append((n, _CTX.log(to_bigfloat(value, _CTX)) / _CTX.log(n)))
    return table


def _polynomially_bounded(slopes, N, config):
    if not slopes:
        return True
    early = [s for n, s in slopes if n <= N // 2]
    late = [s for n, s in slopes if n > N // 2]
    top = max(s for _, s in slopes)
    if top > config.poly_degree_max:
        return False
    if early and late:
        return max(late) <= max(early) + to_bigfloat(config.poly_slack, _CTX)
    return True


def unlabelled_01_verdict(spec, N, config=None):
    """
    Criteria in order: Schur (finitely generated), Bell (polynomially
    bounded), Bateman-Erdos ({0,1}-valued) and the radius disproof
    rho_U in (0,1). The first that applies decides the verdict.
    """
    config = config or VerdictConfig()
    rule = spec.unlabelled_rule()
    a_U = unlabelled_totals(spec, N)
    trend = ratio_sequence(a_U, config.window_start, config=config.trend)
    slopes = polynomial_slopes(rule, N)
    values = [eval_rule(rule, n, Backend.exact()) for n in range(1, N + 1)]
    support = [n for n, v in enumerate(values, 1) if v > 0]

    evidence = {
        "ratio_trend": trend.trend,
        "ratios": trend.to_dict(),
        "poly_slopes": [{"n": n, "slope": format_value(s)} for n, s in slopes],
        "zero_one_valued": all(v in (0, 1) for v in values),
        "config": config.to_dict(),
    }
    notes = []

    if support and gcd_of(support) != 1:
        notes.append("p_U support gcd is %d; no criterion applies" % gcd_of(support))
        return _unlabelled(spec, BELL, INCONCLUSIVE, evidence, notes)

    try:
        fit = schur_fit(spec, N)
    except NotApplicable:
        fit = None
    if fit is not None:
        evidence["schur"] = fit.to_dict()
        return _unlabelled(spec, SCHUR, HOLDS, evidence, notes)

    if _polynomially_bounded(slopes, N, config):
        return _unlabelled(spec, BELL, HOLDS, evidence, notes)
    if evidence["zero_one_valued"]:
        return _unlabelled(spec, BATEMAN_ERDOS, HOLDS, evidence, notes)

    # A_U has radius min(1, radius of P_U) since prod (1 - x^j)^(-p_U(j))
    # converges exactly where sum p_U(j) x^j does inside the unit disc
    try:
        estimate = radius_estimate(rule, N)
    except NotApplicable as exc:
        notes.append(str(exc))
        return _unlabelled(spec, RADIUS, INCONCLUSIVE, evidence, notes)
    rho_U = min(estimate.value, _CTX.one)
    evidence["radius"] = estimate.to_dict()
    evidence["rho_U"] = format_value(rho_U)
    stated = spec.get("stated_radius")
    if stated is not None:
        evidence["stated_radius"] = stated
        notes.append(
            "stated radius %s, computed %s; the computed value is used"
            % (stated, format_value(rho_U, 8))
        )
        _LOG.warning("Class %s: %s", spec.name, notes[-1])

    if rho_U > 0 and rho_U + estimate.band < to_bigfloat(config.radius_cutoff, _CTX):
        return _unlabelled(spec, RADIUS, FAILS, evidence, notes)
    notes.append("radius estimate is not bounded away from 1")
    return _unlabelled(spec, RADIUS, INCONCLUSIVE, evidence, notes)


def _unlabelled(spec, criterion, verdict, evidence, notes):
    _LOG.info("Unlabelled verdict for %s: %s (%s)", spec.name, verdict, criterion)
    return LawVerdict(UNLABELLED, criterion, verdict, evidence, notes)
