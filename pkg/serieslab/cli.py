import argparse
import logging
import sys

import serieslab

from serieslab._errors import SeriesLabError, UsageError
from serieslab._selftest import run_selftest

DEFAULT_LOG_FMT = "%(asctime)s [%(levelname)-8s] %(message)s"
DEFAULT_DATE_FMT = "%Y-%m-%d %H:%M:%S %z"

_LOG = logging.getLogger("serieslab")

EXIT_OK = 0
EXIT_COMPUTATION = 1
EXIT_USAGE = 2

# command -> (flag, dest, type, help)
COMMAND_FLAGS = {
    "exp": [("--rule", "rule", str, "rule file, JSON text or shorthand for g")],
    "log": [
        ("--rule", "rule", str, "rule for f, with f(0) = 1"),
        ("--series", "series", str, "series file written by another command"),
    ],
    "euler": [("--rule", "rule", str, "integer rule for p_U")],
    "ratios": [
        ("--rule", "rule", str, "rule for g; the ratios are taken on exp(g)"),
        ("--series", "series", str, "series file to take ratios on"),
        ("--n0", "n0", int, "first index of the ratio window"),
        ("--shift", "shift", int, "compare f(n) with f(n - shift)"),
    ],
    "saddle": [
        ("--poly", "poly", str, "comma separated coefficients of G, from x^0"),
        ("--n", "n", str, "comma separated sizes"),
        ("--tol", "tol", str, "residual tolerance of the saddle solve"),
    ],
    "exponent-fit": [
        ("--poly", "poly", str, "comma separated coefficients of G, from x^0"),
        ("--n", "n", str, "comma separated sample sizes"),
    ],
    "split": [
        ("--rule", "rule", str, "rule for g"),
        ("--ell", "ell", int, "split index"),
    ],
    "cr-bound": [
        ("--rule", "rule", str, "rule for g"),
        ("--ell", "ell", int, "split index"),
        ("--r", "r", int, "shift r of the bound"),
        ("--L", "L", int, "positivity onset of the low part"),
    ],
    "theorem-demo": [
        ("--rule", "rule", str, "rule for g"),
        ("--theta", "theta", str, "growth exponent theta in (0, 1), as p/q"),
        ("--n0", "n0", int, "first index of the ratio window"),
    ],
    "counterexample": [
        ("--t", "t", str, "dominating rule t"),
        ("--M", "M", int, "length of the copied prefix of t"),
        ("--stages", "stages", int, "number of stages"),
        ("--search-cap", "search_cap", int, "largest degree scanned per stage"),
    ],
    "class": [
        ("--name", "name", str, "builtin class name or class JSON file"),
        ("--colors", "colors", int, "color every element with one of r colors"),
        ("--check", "check", str, "comma separated sides: labelled,unlabelled"),
    ],
    "oracle": [
        ("--name", "name", str, "builtin class name"),
        ("--n", "n", str, "comma separated sizes"),
        ("--side", "side", str, "labelled or unlabelled"),
        ("--colors", "colors", int, "color every element with one of r colors"),
    ],
    "radius": [
        ("--rule", "rule", str, "rule whose radius is estimated"),
        ("--series", "series", str, "series file whose radius is estimated"),
    ],
}


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; keep that code for our own as well."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, "%s: error: %s\n" % (self.prog, message))


def _add_common(parser):
    parser.add_argument(
        "--order", action="store", type=int, required=False, help="truncation order N"
    )
    parser.add_argument(
        "--backend",
        action="store",
        choices=("exact", "float"),
        default="exact",
        help="coefficient arithmetic",
    )
    parser.add_argument(
        "--precision",
        action="store",
        type=int,
        required=False,
        help="bits of the float backend; defaults to $SERIESLAB_PRECISION",
    )
    parser.add_argument(
        "--kappa", action="store", type=float, default=5.0, help="divergence factor"
    )
    parser.add_argument(
        "--delta", action="store", type=float, default=0.05, help="closeness to 1"
    )
    parser.add_argument(
        "--format",
        action="store",
        dest="output_format",
        choices=(serieslab.JSON, serieslab.CSV),
        default=serieslab.JSON,
        help="report format",
    )
    parser.add_argument(
        "--output", action="store", default="-", help="report path, - for stdout"
    )
    parser.add_argument(
        "--jobs",
        action="store",
        type=int,
        required=False,
        help="number of workers for grid commands",
    )
    parser.add_argument(
        "--debug", action="store_true", default=False, help="log at DEBUG level"
    )
    parser.add_argument(
        "--selftest",
        action="store_true",
        default=False,
        help="run the command's example table against the golden values",
    )


def parse_args(args):
    parser = _Parser(prog="serieslab")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    for command, flags in COMMAND_FLAGS.items():
        sub = subparsers.add_parser(command, help="run the %s pipeline" % command)
        _add_common(sub)
        for flag, dest, kind, help_text in flags:
            sub.add_argument(
                flag, action="store", dest=dest, type=kind, required=False, help=help_text
            )
        if command == "oracle":
            sub.add_argument(
                "--components",
                action="store_true",
                default=False,
                help="count connected structures only",
            )

    parsed = parser.parse_args(args)
    if parsed.command is None:
        parser.error("a command is required")
    if parsed.jobs is not None and parsed.jobs < 1:
        parser.error("--jobs must be >= 1")
    return parsed


def make_config(opts):
    inputs = {}
    for _, dest, _, _ in COMMAND_FLAGS[opts.command]:
        value = getattr(opts, dest)
        if value is not None:
            inputs[dest] = value
    if getattr(opts, "components", False):
        inputs["components"] = True
    return serieslab.RunConfig(
        command=opts.command,
        order=opts.order,
        backend=opts.backend,
        precision=opts.precision,
        kappa=opts.kappa,
        delta=opts.delta,
        output_format=opts.output_format,
        output=opts.output,
        jobs=opts.jobs,
        inputs=inputs,
    )


def main(args):
    logging.basicConfig(format=DEFAULT_LOG_FMT, datefmt=DEFAULT_DATE_FMT)
    opts = parse_args(args)
    _LOG.setLevel(logging.DEBUG if opts.debug else logging.INFO)

    if opts.selftest:
        failures = run_selftest(opts.command)
        return EXIT_COMPUTATION if failures else EXIT_OK

    try:
        serieslab.SeriesLab(make_config(opts)).run()
    except UsageError as exc:
        _LOG.error("%s", exc)
        return EXIT_USAGE
    except SeriesLabError as exc:
        _LOG.error("%s failed: %s", opts.command, exc)
        return EXIT_COMPUTATION
    return EXIT_OK


def entry_point():
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    entry_point()
