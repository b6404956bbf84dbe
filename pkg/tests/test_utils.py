import json

from fractions import Fraction

import mock
import mpmath
import pytest

from more_executors import Executors

from serieslab._errors import EmptySupport, UsageError
from serieslab._utils import (
    dump_csv,
    dump_json,
    format_value,
    frobenius_bound,
    gcd_of,
    parse_rational,
    representable_table,
    run_grid,
    write_text,
)


@pytest.mark.parametrize(
    "value, expected",
    [
        (None, None),
        (True, True),
        (7, "7"),
        (Fraction(6, 4), "3/2"),
        (Fraction(-1, 3), "-1/3"),
        ("diverging", "diverging"),
    ],
)
def test_format_value(value, expected):
    assert format_value(value) == expected


def test_format_bigfloat():
    assert format_value(mpmath.mpf(2) / 3, digits=5) == "0.66667"
    assert format_value(0.5, digits=3) == "0.500"


@pytest.mark.parametrize(
    "text, expected",
    [("3/4", Fraction(3, 4)), (" 2 ", Fraction(2)), (5, Fraction(5)), ("0.25", Fraction(1, 4))],
)
def test_parse_rational(text, expected):
    assert parse_rational(text) == expected


@pytest.mark.parametrize("text", ["x/2", "1/0", True])
def test_parse_rational_rejects(text):
    with pytest.raises(UsageError) as e_info:
        parse_rational(text, where="--theta")
    assert str(e_info.value).startswith("--theta")


def test_gcd_of():
    assert gcd_of([6, 10, 15]) == 1
    assert gcd_of([4, 6]) == 2
    with pytest.raises(EmptySupport):
        gcd_of([])


@pytest.mark.parametrize(
    "support, expected",
    [([6, 10, 15], 29), ([3, 5], 7), ([2, 3], 1), ([1], -1), ([1, 7], -1), ([2, 4], None)],
)
def test_frobenius_bound(support, expected):
    assert frobenius_bound(support) == expected


def test_frobenius_bound_empty():
    with pytest.raises(EmptySupport):
        frobenius_bound([])


def test_representable_table():
    assert representable_table([3, 5], 8) == [
        True,
        False,
        False,
        True,
        False,
        True,
        True,
        False,
        True,
    ]


def test_dump_json_is_stable():
    text = dump_json({"b": [1], "a": "x"})
    assert text == '{\n  "a": "x",\n  "b": [\n    1\n  ]\n}\n'
    assert json.loads(text) == {"a": "x", "b": [1]}


def test_dump_csv():
    text = dump_csv(["n", "f(n)"], [(1, Fraction(1, 2)), (2, None)])
    assert text == "n,f(n)\n1,1/2\n2,\n"


def test_write_text_to_file(tmpdir):
    path = tmpdir.join("out.csv")
    write_text(str(path), "n\n1\n")
    assert path.read() == "n\n1\n"


@pytest.mark.parametrize("path", [None, "-"])
def test_write_text_to_stdout(path, capsys):
    write_text(path, "hello\n")
    assert capsys.readouterr().out == "hello\n"


def test_run_grid_keeps_order():
    assert run_grid(lambda n: n * n, [3, 1, 2], jobs=3) == [9, 1, 4]


def test_run_grid_uses_thread_pool():
    with mock.patch(
        "serieslab._utils.Executors.thread_pool", wraps=Executors.thread_pool
    ) as pool:
        assert run_grid(str, [1, 2], jobs=2) == ["1", "2"]
    pool.assert_called_once_with(max_workers=2)


def test_run_grid_inline():
    with mock.patch("serieslab._utils.Executors.thread_pool") as pool:
        assert run_grid(str, [1, 2], jobs=1) == ["1", "2"]
        assert run_grid(str, [], jobs=4) == []
    pool.assert_not_called()
