import logging
import math

from dataclasses import dataclass, field
from fractions import Fraction

from serieslab._bestpossible import (
    CounterexampleResult,
    Stage,
    build_counterexample,
    h_value,
    next_degree,
    s_theta_member,
)
from serieslab._classes import (
    BUILTIN_CLASSES,
    ClassSpec,
    LawVerdict,
    SchurFit,
    VerdictConfig,
    builtin_class,
    color_wrapper,
    labelled_01_verdict,
    labelled_totals,
    load_class,
    radius_estimate,
    schur_fit,
    unlabelled_01_verdict,
    unlabelled_totals,
)
from serieslab._coeffbox import (
    Backend,
    BigFloat,
    Ordering,
    SequenceRule,
    compare_with_tolerance,
    eval_rule,
    load_rule,
    parse_rule,
)
from serieslab._diagnostics import (
    RatioReport,
    SupportProfile,
    TrendConfig,
    classify_trend,
    find_onset,
    positivity_onset,
    ratio_sequence,
    support_gcd,
)
from serieslab._errors import SeriesLabError, UsageError
from serieslab._oracles import (
    OracleCount,
    canonical_unlabelled_count,
    oracle_components,
    oracle_count,
    oracle_csv,
    oracle_table,
)
from serieslab._saddle import (
    ExponentFit,
    SaddleReport,
    exponent_fit,
    hayman_estimate,
    hayman_grid,
    monomial_saddle,
    saddle_csv,
    solve_saddle,
)
from serieslab._series import (
    PowerSeries,
    SplitPair,
    euler_product,
    eval_at_positive,
    exp_eval_at_positive,
    series_exp,
    series_log,
    split_at,
)
from serieslab._smoothing import (
    CrBound,
    TheoremDemoReport,
    cr_bound,
    epsilon_envelope,
    shift_bound_check,
    theorem_demo,
)
from serieslab._utils import dump_csv, dump_json, parse_rational, write_text

_LOG = logging.getLogger("serieslab")

JSON = "json"
CSV = "csv"


@dataclass
class RunConfig:
    """Everything one invocation depends on; embedded in every report."""

    command: str
    order: int = None
    backend: str = Backend.EXACT
    precision: int = None
    kappa: float = 5.0
    delta: float = 0.05
    output_format: str = JSON
    output: str = "-"
    jobs: int = None
    inputs: dict = field(default_factory=dict)

    @property
    def trend(self):
        return TrendConfig(kappa=self.kappa, delta=self.delta)

    def backend_for(self, rule=None):
        if self.backend == Backend.FLOAT or (rule is not None and not rule.is_exact):
            return Backend.floating(self.precision)
        return Backend.exact()

    def to_dict(self):
        # output is left out so the same run reports the same bytes wherever it is written
        return {
            "command": self.command,
            "order": self.order,
            "backend": self.backend,
            "precision": self.precision,
            "kappa": self.kappa,
            "delta": self.delta,
            "output_format": self.output_format,
            "jobs": self.jobs,
            "inputs": {k: self.inputs[k] for k in sorted(self.inputs)},
        }


class SeriesLab(object):
    """Runs exactly one pipeline for a RunConfig and writes its report."""

    def __init__(self, config):
        self.config = config
        self._commands = {
            "exp": self._exp,
            "log": self._log,
            "euler": self._euler,
            "ratios": self._ratios,
            "saddle": self._saddle,
            "exponent-fit": self._exponent_fit,
            "split": self._split,
            "cr-bound": self._cr_bound,
            "theorem-demo": self._theorem_demo,
            "counterexample": self._counterexample,
            "class": self._class,
            "oracle": self._oracle,
            "radius": self._radius,
        }

    @property
    def commands(self):
        return sorted(self._commands)

    def run(self):
        command = self.config.command
        if command not in self._commands:
            raise UsageError("unknown command %r" % command)
        _LOG.info("Running %s", command)
        payload, csv_text = self._commands[command]()
        if self.config.output_format == CSV:
            if csv_text is None:
                raise UsageError("command %s has no CSV report" % command)
            text = csv_text
        else:
            text = dump_json({"config": self.config.to_dict(), "report": payload})
        write_text(self.config.output, text)
        return text

    # --- inputs -------------------------------------------------------------

    def _input(self, name, default=None, required=False):
        value = self.config.inputs.get(name)
        if value is None:
            if required:
                flag = name.replace("_", "-")
                raise UsageError("command %s needs --%s" % (self.config.command, flag))
            return default
        return value

    def _order(self):
        if self.config.order is None:
            raise UsageError("command %s needs --order" % self.config.command)
        return self.config.order

    def _rule(self, name="rule"):
        return parse_rule(self._input(name, required=True))

    def _g_series(self):
        rule = self._rule()
        return PowerSeries.from_rule(
            rule, self._order(), self.config.backend_for(rule), constant=False
        )

    def _f_series(self):
        """A series file, or exp(g) for a rule g."""
        path = self._input("series")
        if path is not None:
            return PowerSeries.load(path)
        return series_exp(self._g_series())

    def _poly(self):
        text = self._input("poly", required=True)
        try:
            coeffs = [Fraction(c.strip()) for c in text.split(",")]
        except (ValueError, ZeroDivisionError):
            raise UsageError("--poly: %r is not a comma separated list of rationals" % text)
        backend = self.config.backend_for()
        return PowerSeries.polynomial(coeffs, backend=backend)

    def _ns(self):
        text = self._input("n", required=True)
        try:
            return [int(n) for n in str(text).split(",")]
        except ValueError:
            raise UsageError("--n: %r is not a comma separated list of integers" % text)

    # --- commands -----------------------------------------------------------

    def _exp(self):
        f = series_exp(self._g_series())
        rows = [(n, c, c * math.factorial(n)) for n, c in enumerate(f)]
        return f.to_dict(), dump_csv(["n", "f(n)", "n!*f(n)"], rows)

    def _log(self):
        path = self._input("series")
        if path is not None:
            f = PowerSeries.load(path)
        else:
            rule = self._rule()
            f = PowerSeries.from_rule(rule, self._order(), self.config.backend_for(rule))
        g = series_log(f)
        return g.to_dict(), g.to_csv()

    def _euler(self):
        a = euler_product(self._rule(), self._order())
        return a.to_dict(), a.to_csv()

    def _ratios(self):
        f = self._f_series()
        report = ratio_sequence(
            f, self._input("n0", 1), self._input("shift", 1), self.config.trend
        )
        return report.to_dict(), report.to_csv()

    def _saddle(self):
        G = self._poly()
        reports = hayman_grid(
            G, self._ns(), self.config.jobs, self._input("tol"), self.config.precision
        )
        return [r.to_dict() for r in reports], saddle_csv(reports)

    def _exponent_fit(self):
        fit = exponent_fit(self._poly(), self._ns(), self.config.precision)
        return fit.to_dict(), fit.to_csv()

    def _split(self):
        pair = split_at(self._g_series(), self._input("ell", required=True))
        payload = {"ell": pair.ell, "low": pair.low.to_dict(), "high": pair.high.to_dict()}
        return payload, None

    def _cr_bound(self):
        g = self._g_series()
        pair = split_at(g, self._input("ell", required=True))
        r = self._input("r", 0)
        cr = cr_bound(g, pair, r, self._input("L"))
        check = shift_bound_check(g, pair, r, cr)
        return {"cr": cr.to_dict(), "shift_check": check.to_dict()}, None

    def _theorem_demo(self):
        report = theorem_demo(
            self._rule(),
            parse_rational(self._input("theta", required=True), "--theta"),
            self._order(),
            self._input("n0", 2),
            self.config.trend,
            jobs=self.config.jobs,
        )
        return report.to_dict(), report.to_csv()

    def _counterexample(self):
        result = build_counterexample(
            self._rule("t"),
            self._input("M", 1),
            self._input("stages", 3),
            self.config.order,
            self._input("search_cap"),
            self.config.precision,
        )
        return result.to_dict(), result.to_csv()

    def _class(self):
        spec = load_class(self._input("name", required=True), self._input("colors", 1))
        N = self._order()
        config = VerdictConfig(trend=self.config.trend)
        sides = self._input("check", "labelled,unlabelled").split(",")
        verdicts = []
        for side in sides:
            side = side.strip()
            if side == "labelled":
                verdicts.append(labelled_01_verdict(spec, N, config))
            elif side == "unlabelled":
                verdicts.append(unlabelled_01_verdict(spec, N, config))
            else:
                raise UsageError("--check: unknown side %r" % side)
        payload = {"class": spec.to_dict(), "verdicts": [v.to_dict() for v in verdicts]}
        return payload, None

    def _oracle(self):
        name = self._input("name", required=True)
        side = self._input("side", "labelled")
        colors = self._input("colors", 1)
        ns = self._ns()
        if self._input("components"):
            counts = [oracle_components(name, n, side, colors) for n in ns]
        else:
            counts = oracle_table(name, ns, side, self.config.jobs, colors)
        payload = [c._asdict() for c in counts]
        return payload, oracle_csv(counts)

    def _radius(self):
        path = self._input("series")
        source = PowerSeries.load(path) if path is not None else self._rule()
        estimate = radius_estimate(source, self._order())
        return estimate.to_dict(), None


__all__ = [
    "Backend",
    "BigFloat",
    "BUILTIN_CLASSES",
    "ClassSpec",
    "CounterexampleResult",
    "CrBound",
    "ExponentFit",
    "LawVerdict",
    "OracleCount",
    "Ordering",
    "PowerSeries",
    "RatioReport",
    "RunConfig",
    "SaddleReport",
    "SchurFit",
    "SequenceRule",
    "SeriesLab",
    "SeriesLabError",
    "SplitPair",
    "Stage",
    "SupportProfile",
    "TheoremDemoReport",
    "TrendConfig",
    "VerdictConfig",
    "build_counterexample",
    "builtin_class",
    "canonical_unlabelled_count",
    "classify_trend",
    "color_wrapper",
    "compare_with_tolerance",
    "cr_bound",
    "epsilon_envelope",
    "euler_product",
    "eval_at_positive",
    "eval_rule",
    "exp_eval_at_positive",
    "exponent_fit",
    "find_onset",
    "h_value",
    "hayman_estimate",
    "hayman_grid",
    "labelled_01_verdict",
    "labelled_totals",
    "shift_bound_check",
    "load_class",
    "load_rule",
    "monomial_saddle",
    "next_degree",
    "oracle_components",
    "oracle_count",
    "parse_rule",
    "positivity_onset",
    "radius_estimate",
    "ratio_sequence",
    "s_theta_member",
    "schur_fit",
    "series_exp",
    "series_log",
    "solve_saddle",
    "split_at",
    "support_gcd",
    "theorem_demo",
    "unlabelled_01_verdict",
    "unlabelled_totals",
]
