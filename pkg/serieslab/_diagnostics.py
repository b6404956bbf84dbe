import logging

from collections import namedtuple
from dataclasses import asdict, dataclass, field

from serieslab._coeffbox import SequenceRule, eval_rule, float_context, to_bigfloat
from serieslab._errors import (
    EmptyReport,
    EmptySupport,
    InsufficientData,
    InvalidArgument,
)
from serieslab._series import PowerSeries, series_exp
from serieslab._utils import dump_csv, format_value, frobenius_bound, gcd_of

_LOG = logging.getLogger("serieslab.diagnostics")

DIVERGING = "diverging"
TENDING_TO_ONE = "tending-to-one"
TENDING_TO_ZERO = "tending-to-zero"
NON_MONOTONE = "non-monotone"
INCONCLUSIVE = "inconclusive"

CERTIFIED = "certified"
WINDOW_ONLY = "window-only"
FAILS = "fails"

NOT_APPLICABLE = "not-applicable"

# trend arithmetic only needs a little more than double precision
_TREND_CTX = float_context(80)


@dataclass(frozen=True)
class TrendConfig:
    """
    Thresholds of the finite-window trend heuristic.

    kappa: growth factor between the first ratio and the final level.
    delta: distance from 1 accepted as "already at 1".
    slope_floor: least growth of the ratio level per unit of log n that
        counts as unbounded growth.
    decay_slope: least power-law decay rate of |ratio - 1|.
    block: ratios are averaged geometrically over blocks of this length.
    min_points: defined ratios needed before any label is given.
    """

    kappa: float = 5.0
    delta: float = 0.05
    slope_floor: float = 0.15
    decay_slope: float = 0.25
    block: int = 6
    min_points: int = 10

    def to_dict(self):
        return asdict(self)


RatioPoint = namedtuple("RatioPoint", ["n", "value", "ratio", "defined"])


@dataclass
class RatioReport:
    n0: int
    shift: int
    points: list
    trend: str = INCONCLUSIVE
    config: TrendConfig = field(default_factory=TrendConfig)
    note: str = ""

    @property
    def defined(self):
        return [p for p in self.points if p.defined]

    @property
    def undefined(self):
        return [p.n for p in self.points if not p.defined]

    def ratio_at(self, n):
        for p in self.points:
            if p.n == n:
                return p.ratio
        raise KeyError(n)

    @property
    def first(self):
        defined = self.defined
        return defined[0].ratio if defined else None

    @property
    def last(self):
        defined = self.defined
        return defined[-1].ratio if defined else None

    @property
    def monotone_violations(self):
        """Number of direction changes between consecutive defined ratios."""
        ratios = [p.ratio for p in self.defined]
        signs = [
            (b > a) - (b < a) for a, b in zip(ratios, ratios[1:]) if b != a
        ]
        return sum(1 for s, t in zip(signs, signs[1:]) if s != t)

    def to_dict(self):
        return {
            "n0": self.n0,
            "shift": self.shift,
            "trend": self.trend,
            "thresholds": self.config.to_dict(),
            "first": format_value(self.first),
            "last": format_value(self.last),
            "monotone_violations": self.monotone_violations,
            "undefined": self.undefined,
            "note": self.note,
            "points": [
                {
                    "n": p.n,
                    "value": format_value(p.value),
                    "ratio": format_value(p.ratio),
                    "defined": p.defined,
                }
                for p in self.points
            ],
        }

    def to_csv(self):
        return dump_csv(
            ["n", "f(n)", "ratio", "defined"],
            ((p.n, p.value, p.ratio, p.defined) for p in self.points),
        )


def ratio_sequence(f, n0, shift=1, config=None):
    """
    rho(n) = f(n - shift) / f(n) for n in [n0, N]. Points where f(n) = 0 are
    kept in the report as undefined entries.
    """
    config = config or TrendConfig()
    if n0 < 1 or n0 < shift:
        raise InvalidArgument("window start must be >= max(1, shift), got %d" % n0)
    if shift < 1:
        raise InvalidArgument("shift must be >= 1")
    points = []
    for n in range(n0, f.order + 1):
        if f[n] > 0:
            points.append(RatioPoint(n, f[n], f[n - shift] / f[n], True))
        else:
            points.append(RatioPoint(n, f[n], None, False))
    if not any(p.defined for p in points):
        raise EmptyReport("f vanishes on the whole window [%d, %d]" % (n0, f.order))

    report = RatioReport(n0, shift, points, config=config)
    try:
        report.trend = classify_trend(report, config)
    except InsufficientData as exc:
        report.trend = INCONCLUSIVE
        report.note = str(exc)
    return report


def _block_levels(points, block):
    """Geometric means of the ratios over consecutive blocks ending at N."""
    if len(points) // block < 2:
        block = 1
    points = points[len(points) % block :]
    levels = []
    for start in range(0, len(points), block):
        chunk = points[start : start + block]
        mean_log = sum(_TREND_CTX.log(r) for _, r in chunk) / len(chunk)
        mean_n = _TREND_CTX.mpf(sum(n for n, _ in chunk)) / len(chunk)
        levels.append((mean_n, mean_log))
    return levels


def _strictly(values, increasing):
    pairs = zip(values, values[1:])
    if increasing:
        return all(b > a for a, b in pairs)
    return all(b < a for a, b in pairs)


def classify_trend(ratios, config=None):
    """
    Finite-window label for a ratio report. The label is a heuristic: the
    limits it names cannot be decided from finitely many terms.

    diverging: block levels strictly increase over the last half-window,
        the final level exceeds 1, and it is kappa times the first ratio or
        grows by at least slope_floor per unit of log n.
    tending-to-zero: block levels strictly decrease and the final level is
        below first/kappa.
    tending-to-one: |log level| strictly decreases and either the final
        level is within delta of 1 or |level - 1| decays at least like
        n^-decay_slope.
    non-monotone: consecutive ratios change direction after the first
        quarter of the window.
    """
    config = config or ratios.config
    ctx = _TREND_CTX
    pts = [(p.n, to_bigfloat(p.ratio, ctx)) for p in ratios.defined if p.ratio > 0]
    if len(pts) < config.min_points:
        raise InsufficientData(
            "%d positive ratios, at least %d needed" % (len(pts), config.min_points)
        )

    levels = _block_levels(pts[len(pts) // 2 :], config.block)
    logs = [mu for _, mu in levels]
    span = ctx.log(levels[-1][0]) - ctx.log(levels[0][0])
    first_level = ctx.exp(logs[0])
    last_level = ctx.exp(logs[-1])
    initial = pts[0][1]

    if _strictly(logs, increasing=True) and last_level > 1:
        slope = (last_level - first_level) / span
        if last_level >= config.kappa * initial or slope >= config.slope_floor:
            return DIVERGING

    if _strictly(logs, increasing=False) and last_level <= initial / config.kappa:
        return TENDING_TO_ZERO

    if _strictly([abs(mu) for mu in logs], increasing=False):
        last_gap = abs(last_level - 1)
        if last_gap < config.delta:
            return TENDING_TO_ONE
        first_gap = abs(first_level - 1)
        decay = (ctx.log(last_gap) - ctx.log(first_gap)) / span
        if decay <= -config.decay_slope:
            return TENDING_TO_ONE

    tail = [r for _, r in pts[len(pts) // 4 :]]
    signs = [(b > a) - (b < a) for a, b in zip(tail, tail[1:]) if b != a]
    if any(s != t for s, t in zip(signs, signs[1:])):
        return NON_MONOTONE
    return INCONCLUSIVE


# --- support analysis -------------------------------------------------------


@dataclass
class SupportProfile:
    support: list
    gcd: int
    frobenius_bound: object
    onset_L: object
    window: int

    def to_dict(self):
        return asdict(self)


def _positive_indices(g, window):
    if isinstance(g, SequenceRule):
        return [n for n in range(1, window + 1) if eval_rule(g, n) > 0]
    window = min(window, g.order)
    return [n for n in range(1, window + 1) if g[n] > 0]


def smallest_onset(support, window):
    """Smallest L >= 2 with every n > L representable by support within [1, L]."""
    for L in range(2, window + 1):
        low = [s for s in support if s <= L]
        if low and gcd_of(low) == 1 and frobenius_bound(low) <= L:
            return L
    return None


def support_gcd(g, window):
    if window < 1:
        raise InvalidArgument("window must be >= 1")
    support = _positive_indices(g, window)
    if not support:
        raise EmptySupport("no positive coefficient in [1, %d]" % window)
    gcd = gcd_of(support)
    bound = frobenius_bound(support) if gcd == 1 else None
    return SupportProfile(
        support=support,
        gcd=gcd,
        frobenius_bound=NOT_APPLICABLE if bound is None else bound,
        onset_L=smallest_onset(support, window),
        window=window,
    )


@dataclass
class OnsetVerdict:
    verdict: str
    L: int
    gcd: int
    frobenius_bound: object
    witness: object
    window: int

    def to_dict(self):
        return asdict(self)


def positivity_onset(g, L_candidate):
    """
    Check n > L => [x^n] exp(g(1)x + ... + g(L)x^L) > 0 on the computed
    window, and extend it to every n through the Frobenius bound of the
    low-part support.
    """
    L = L_candidate
    if L < 2:
        raise InvalidArgument("L must be >= 2, got %d" % L)
    N = g.order
    zero = g.backend.zero
    low = PowerSeries([c if n <= L else zero for n, c in enumerate(g)], g.backend)
    support = low.support()
    if not support:
        raise EmptySupport("g has no positive coefficient of degree <= %d" % L)
    gcd = gcd_of(support)
    f0 = series_exp(low)
    zeros = [n for n in range(L + 1, N + 1) if not f0[n] > 0]

    if gcd != 1:
        witness = zeros[0] if zeros else next(n for n in range(L + 1, L + gcd + 1) if n % gcd)
        _LOG.debug("Onset L=%d fails: support gcd %d, witness %d", L, gcd, witness)
        return OnsetVerdict(FAILS, L, gcd, NOT_APPLICABLE, witness, N)

    bound = frobenius_bound(support)
    if zeros:
        return OnsetVerdict(FAILS, L, gcd, bound, zeros[0], N)
    verdict = CERTIFIED if N >= bound + L else WINDOW_ONLY
    return OnsetVerdict(verdict, L, gcd, bound, None, N)


def find_onset(g, upto=None):
    """Smallest certified L, scanning L = 2, 3, ... up to ``upto``."""
    upto = g.order if upto is None else upto
    for L in range(2, upto + 1):
        if not any(g[n] > 0 for n in range(1, L + 1)):
            continue
        if positivity_onset(g, L).verdict == CERTIFIED:
            return L
    return None
