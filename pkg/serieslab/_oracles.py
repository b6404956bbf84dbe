"""
Brute-force counts of small structures, used as ground truth for the series
computations. Nothing here touches the series module: labelled structures
are built by walking every set partition of {0, ..., n-1} and every
connected structure on each block; unlabelled structures are multisets of
component isomorphism types.
"""
import logging

from collections import namedtuple
from itertools import combinations, permutations, product

from serieslab._errors import CapExceeded, InvalidArgument, NotApplicable, UnknownClass
from serieslab._utils import dump_csv, run_grid

_LOG = logging.getLogger("serieslab.oracles")

LABELLED = "labelled"
UNLABELLED = "unlabelled"

OracleCount = namedtuple("OracleCount", ["class_name", "n", "side", "count", "method"])


def set_partitions(items):
    """Every partition of ``items`` into nonempty blocks, as lists of tuples."""
    items = tuple(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in set_partitions(rest):
        yield [(first,)] + partition
        for i, block in enumerate(partition):
            yield partition[:i] + [(first,) + block] + partition[i + 1 :]


class ComponentFamily:
    """
    Connected structures of one class. ``on_block`` yields
    (structure, iso_type) for every connected structure on the given labels;
    ``types`` lists the iso types of a given size.
    """

    labelled_cap = 8
    unlabelled_cap = 25

    def on_block(self, block):
        raise NotImplementedError()

    def types(self, size):
        raise NotImplementedError()


class Blocks(ComponentFamily):
    labelled_cap = 10
    unlabelled_cap = 30

    def on_block(self, block):
        yield block, ("block", len(block))

    def types(self, size):
        return [("block", size)]


class Points(ComponentFamily):
    labelled_cap = 12
    unlabelled_cap = 30

    def on_block(self, block):
        if len(block) == 1:
            yield block, ("point",)

    def types(self, size):
        return [("point",)] if size == 1 else []


class Stars(ComponentFamily):
    """Rooted trees of height <= 1: a root with every other element below it."""

    labelled_cap = 8
    unlabelled_cap = 30

    def on_block(self, block):
        for root in block:
            yield (root, block), ("star", len(block))

    def types(self, size):
        return [("star", size)]


class SelectionBlocks(ComponentFamily):
    """A block carrying a nonempty distinguished subset."""

    labelled_cap = 7
    unlabelled_cap = 20

    def on_block(self, block):
        for k in range(1, len(block) + 1):
            for chosen in combinations(block, k):
                yield (block, chosen), ("selection", len(block), k)

    def types(self, size):
        return [("selection", size, k) for k in range(1, size + 1)]


class Brooms(ComponentFamily):
    """
    The one-element tree, and for m >= 1 a 2-colored chain of m nodes above
    an antichain of 2m leaves.
    """

    labelled_cap = 6
    unlabelled_cap = 15

    def on_block(self, block):
        if len(block) == 1:
            yield block, ("point",)
            return
        if len(block) % 3:
            return
        m = len(block) // 3
        for chain in permutations(block, m):
            for colors in product((0, 1), repeat=m):
                yield (chain, colors), ("broom", m, colors)

    def types(self, size):
        if size == 1:
            return [("point",)]
        if size % 3:
            return []
        m = size // 3
        return [("broom", m, colors) for colors in product((0, 1), repeat=m)]


class Cliques(ComponentFamily):
    """Finitely many components: sizes may repeat, each repeat is a new type."""

    labelled_cap = 12
    unlabelled_cap = 30

    def __init__(self, sizes=(1, 2)):
        self.counts = {}
        for size in sizes:
            self.counts[size] = self.counts.get(size, 0) + 1

    def on_block(self, block):
        for t in range(self.counts.get(len(block), 0)):
            yield block, ("clique", len(block), t)

    def types(self, size):
        return [("clique", size, t) for t in range(self.counts.get(size, 0))]


class Colored(ComponentFamily):
    """Every element of a labelled component gets one of r colors."""

    def __init__(self, inner, r):
        self.inner = inner
        self.r = r
        self.labelled_cap = min(inner.labelled_cap, 6)
        self.unlabelled_cap = -1

    def on_block(self, block):
        for structure, iso in self.inner.on_block(block):
            for coloring in product(range(self.r), repeat=len(block)):
                yield (structure, coloring), (iso, coloring)

    def types(self, size):
        raise NotApplicable("unlabelled colored counts are not enumerated")


FAMILIES = {
    "unary-predicates": Points,
    "height1-forests": Stars,
    "finitely-many-components": Cliques,
    "equivalence-relations": Blocks,
    "integer-partitions": Blocks,
    "selection-partitions": SelectionBlocks,
    "broom": Brooms,
}

# unlabelled-only aliases
UNLABELLED_ONLY = {"integer-partitions"}


def family(name, colors=1, sizes=None):
    if name not in FAMILIES:
        raise UnknownClass("no oracle for class %r" % name)
    if sizes is not None and name != "finitely-many-components":
        raise InvalidArgument("component sizes only apply to finitely-many-components")
    base = FAMILIES[name](sizes) if sizes is not None else FAMILIES[name]()
    if colors < 1:
        raise InvalidArgument("color count must be >= 1")
    return Colored(base, colors) if colors > 1 else base


def caps(name, colors=1, sizes=None):
    """(labelled cap, unlabelled cap) for a class."""
    fam = family(name, colors, sizes)
    labelled = -1 if name in UNLABELLED_ONLY else fam.labelled_cap
    return labelled, fam.unlabelled_cap


def _check_side(side):
    if side not in (LABELLED, UNLABELLED):
        raise InvalidArgument("side must be labelled or unlabelled, got %r" % side)


def _check_cap(name, n, side, colors, sizes):
    if n < 0:
        raise InvalidArgument("size must be >= 0")
    labelled_cap, unlabelled_cap = caps(name, colors, sizes)
    cap = labelled_cap if side == LABELLED else unlabelled_cap
    if cap < 0:
        raise NotApplicable("class %s has no %s oracle" % (name, side))
    if n > cap:
        raise CapExceeded("%s %s oracle is capped at n=%d, got %d" % (name, side, cap, n))


def labelled_structures(fam, n):
    """Yield (structure, canonical key) for every labelled structure on n points."""
    for partition in set_partitions(range(n)):
        choices = [list(fam.on_block(block)) for block in partition]
        for combo in product(*choices):
            structure = tuple(s for s, _ in combo)
            key = tuple(sorted(iso for _, iso in combo))
            yield structure, key


def component_multisets(fam, n):
    """Yield every multiset of component types of total size n."""
    types = [(size, key) for size in range(1, n + 1) for key in fam.types(size)]

    def extend(start, remaining, chosen):
        if remaining == 0:
            yield tuple(chosen)
            return
        for i in range(start, len(types)):
            size, key = types[i]
            if size <= remaining:
                chosen.append(key)
                yield from extend(i, remaining - size, chosen)
                chosen.pop()

    return extend(0, n, [])


def oracle_count(name, n, side, colors=1, sizes=None):
    _check_side(side)
    _check_cap(name, n, side, colors, sizes)
    fam = family(name, colors, sizes)
    if side == LABELLED:
        count = sum(1 for _ in labelled_structures(fam, n))
        method = "set partitions x connected structures per block"
    else:
        count = sum(1 for _ in component_multisets(fam, n))
        method = "multisets of component isomorphism types"
    _LOG.debug("Oracle %s n=%d %s: %d", name, n, side, count)
    return OracleCount(name, n, side, count, method)


def oracle_components(name, n, side, colors=1, sizes=None):
    """Connected structures only: reproduces p_L(n) or p_U(n)."""
    _check_side(side)
    _check_cap(name, n, side, colors, sizes)
    fam = family(name, colors, sizes)
    if n == 0:
        count = 0
    elif side == LABELLED:
        count = sum(1 for _ in fam.on_block(tuple(range(n))))
    else:
        count = len(fam.types(n))
    return OracleCount(name, n, side, count, "connected structures only")


def canonical_unlabelled_count(name, n, colors=1, sizes=None):
    """
    Unlabelled count obtained by canonicalizing every labelled structure on
    n points to its sorted multiset of component types.
    """
    if colors > 1:
        raise NotApplicable("colored classes have no canonical unlabelled count")
    _check_cap(name, n, LABELLED, colors, sizes)
    fam = family(name, colors, sizes)
    keys = {key for _, key in labelled_structures(fam, n)}
    return OracleCount(name, n, UNLABELLED, len(keys), "canonical forms of labelled structures")


def oracle_table(name, ns, side, jobs=None, colors=1, sizes=None):
    return run_grid(lambda n: oracle_count(name, n, side, colors, sizes), ns, jobs)


def oracle_csv(counts):
    return dump_csv(
        ["class", "n", "side", "count"],
        ((c.class_name, c.n, c.side, c.count) for c in counts),
    )
