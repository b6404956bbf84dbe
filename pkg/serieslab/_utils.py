import csv
import io
import json
import math
import os
import sys

from fractions import Fraction
from functools import reduce

import mpmath

from more_executors import Executors
from more_executors.futures import f_sequence

from serieslab._errors import EmptySupport, UsageError

# significant digits used whenever a big float lands in a report
REPORT_DIGITS = int(os.getenv("SERIESLAB_REPORT_DIGITS", "30"))

# threads used for independent grid work (saddle grids, oracle tables)
WORKERS = int(os.getenv("SERIESLAB_WORKERS", "4"))


def is_bigfloat(value):
    return hasattr(value, "_mpf_")


def format_rational(value):
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return "%d/%d" % (value.numerator, value.denominator)


def format_value(value, digits=REPORT_DIGITS):
    """
    Render a coefficient for reports: rationals as "p/q", big floats as a
    fixed number of significant digits so reports are byte-stable.
    """
    if value is None:
        return None
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, Fraction)):
        return format_rational(value)
    if is_bigfloat(value):
        return mpmath.nstr(value, digits, strip_zeros=False)
    if isinstance(value, float):
        return mpmath.nstr(mpmath.mpf(value), digits, strip_zeros=False)
    return str(value)


def parse_rational(text, where="value"):
    if isinstance(text, bool):
        raise UsageError("%s: expected a rational, got a boolean" % where)
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError("%s: %r is not a rational of the form p/q" % (where, text))


def gcd_of(numbers):
    numbers = list(numbers)
    if not numbers:
        raise EmptySupport("gcd of an empty support")
    return reduce(math.gcd, numbers)


def frobenius_bound(support):
    """
    Largest integer that is not a nonnegative integer combination of the
    elements of support. Returns -1 when every integer >= 0 is representable
    and None when gcd(support) != 1.
    """
    support = sorted(set(support))
    if not support:
        raise EmptySupport("Frobenius bound of an empty support")
    if gcd_of(support) != 1:
        return None
    if support[0] == 1:
        return -1

    # every n >= (min-1)(max-1) is representable for any gcd-1 set
    limit = (support[0] - 1) * (support[-1] - 1) + support[-1]
    representable = representable_table(support, limit)
    return max(n for n, ok in enumerate(representable) if not ok)


def representable_table(support, limit):
    table = [False] * (limit + 1)
    table[0] = True
    for n in range(1, limit + 1):
        table[n] = any(s <= n and table[n - s] for s in support)
    return table


def write_text(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w") as f:
        f.write(text)


def dump_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def dump_csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def run_grid(fn, items, jobs=None):
    """
    Apply fn to every item on a thread pool and return the results in input
    order. jobs=1 runs inline.
    """
    items = list(items)
    jobs = WORKERS if jobs is None else jobs
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with Executors.thread_pool(max_workers=jobs) as executor:
        return f_sequence([executor.submit(fn, item) for item in items]).result()
