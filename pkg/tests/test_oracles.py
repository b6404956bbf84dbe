import pytest

from serieslab._classes import builtin_class, labelled_totals, unlabelled_totals
from serieslab._coeffbox import Backend, eval_rule
from serieslab._errors import CapExceeded, InvalidArgument, NotApplicable, UnknownClass
from serieslab._oracles import (
    LABELLED,
    UNLABELLED,
    caps,
    canonical_unlabelled_count,
    oracle_components,
    oracle_count,
    oracle_csv,
    oracle_table,
    set_partitions,
)


@pytest.mark.parametrize("n, expected", [(0, 1), (1, 1), (3, 5), (5, 52)])
def test_set_partitions(n, expected):
    partitions = list(set_partitions(range(n)))
    assert len(partitions) == expected
    for partition in partitions:
        assert sorted(x for block in partition for x in block) == list(range(n))


@pytest.mark.parametrize(
    "name, N",
    [
        ("equivalence-relations", 10),
        ("height1-forests", 8),
        ("selection-partitions", 7),
        ("unary-predicates", 8),
        ("finitely-many-components", 8),
        ("broom", 6),
    ],
)
def test_labelled_oracle_matches_series(name, N):
    expected = labelled_totals(builtin_class(name), N).counts
    assert [oracle_count(name, n, LABELLED).count for n in range(N + 1)] == expected


@pytest.mark.parametrize(
    "name, N",
    [
        ("equivalence-relations", 20),
        ("integer-partitions", 30),
        ("height1-forests", 15),
        ("selection-partitions", 12),
        ("finitely-many-components", 20),
        ("broom", 9),
    ],
)
def test_unlabelled_oracle_matches_series(name, N):
    spec_name = "equivalence-relations" if name == "integer-partitions" else name
    expected = list(unlabelled_totals(builtin_class(spec_name), N))
    assert [oracle_count(name, n, UNLABELLED).count for n in range(N + 1)] == expected


def test_colored_labelled_oracle():
    expected = labelled_totals(builtin_class("equivalence-relations", colors=2), 4).counts
    counts = [oracle_count("equivalence-relations", n, LABELLED, colors=2).count for n in range(5)]
    assert counts == expected


def test_component_sizes():
    # cliques of size 1 and 3: a(3) = 1 + 1
    assert oracle_count("finitely-many-components", 3, LABELLED, sizes=(1, 3)).count == 2
    assert oracle_count("finitely-many-components", 6, UNLABELLED, sizes=(1, 3)).count == 3


@pytest.mark.parametrize(
    "name", ["equivalence-relations", "selection-partitions", "broom", "height1-forests"]
)
@pytest.mark.parametrize("n", [3, 6])
def test_canonical_forms_count_unlabelled(name, n):
    assert (
        canonical_unlabelled_count(name, n).count == oracle_count(name, n, UNLABELLED).count
    )


@pytest.mark.parametrize(
    "name", ["equivalence-relations", "selection-partitions", "broom", "height1-forests"]
)
def test_components_reproduce_rules(name):
    spec = builtin_class(name)
    backend = Backend.exact()
    for n in range(1, 7):
        assert oracle_components(name, n, LABELLED).count == eval_rule(
            spec.labelled_rule(), n, backend
        )
        assert oracle_components(name, n, UNLABELLED).count == eval_rule(
            spec.unlabelled_rule(), n, backend
        )


def test_components_of_empty_set():
    assert oracle_components("broom", 0, LABELLED).count == 0


def test_caps():
    assert caps("integer-partitions") == (-1, 30)
    assert caps("broom") == (6, 15)
    assert caps("equivalence-relations", colors=2) == (6, -1)


def test_cap_exceeded():
    with pytest.raises(CapExceeded):
        oracle_count("broom", 7, LABELLED)


@pytest.mark.parametrize(
    "name, side, colors",
    [
        ("integer-partitions", LABELLED, 1),
        ("equivalence-relations", UNLABELLED, 2),
    ],
)
def test_no_oracle_for_side(name, side, colors):
    with pytest.raises(NotApplicable):
        oracle_count(name, 3, side, colors=colors)


def test_canonical_count_rejects_colors():
    with pytest.raises(NotApplicable):
        canonical_unlabelled_count("equivalence-relations", 3, colors=2)


def test_unknown_oracle():
    with pytest.raises(UnknownClass):
        oracle_count("graphs", 3, LABELLED)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"name": "broom", "n": -1, "side": LABELLED},
        {"name": "broom", "n": 3, "side": "both"},
        {"name": "broom", "n": 3, "side": LABELLED, "sizes": (1, 2)},
        {"name": "broom", "n": 3, "side": LABELLED, "colors": 0},
    ],
)
def test_oracle_argument_errors(kwargs):
    with pytest.raises(InvalidArgument):
        oracle_count(**kwargs)


def test_oracle_table_keeps_order():
    counts = oracle_table("equivalence-relations", [5, 2, 4], LABELLED, jobs=2)
    assert [(c.n, c.count) for c in counts] == [(5, 52), (2, 2), (4, 15)]


def test_oracle_csv():
    counts = oracle_table("broom", [1, 3], UNLABELLED, jobs=1)
    assert oracle_csv(counts).splitlines() == [
        "class,n,side,count",
        "broom,1,unlabelled,1",
        "broom,3,unlabelled,3",
    ]


def test_colored_blocks():
    for n in range(1, 5):
        count = oracle_components("equivalence-relations", n, LABELLED, colors=2).count
        assert count == 2**n
