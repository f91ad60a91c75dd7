import random
from decimal import Decimal

import pytest
from hypothesis import given, strategies as st

from chartfaith.tables import (
    Cell,
    EmptyInput,
    MalformedTitle,
    NumericValue,
    Table,
    TableSource,
    Unit,
    normalize_number,
    parse_linearized,
    render_number,
    serialize,
)


def test_parse_with_title():
    t = parse_linearized(
        "title | Access to water\nservice | urban | rural\nwater | 95 | 62"
    )
    assert t.title == "Access to water"
    assert t.headers == ("service", "urban", "rural")
    assert len(t.rows) == 1
    assert [c.raw for c in t.rows[0]] == ["water", "95", "62"]


def test_parse_without_title():
    t = parse_linearized("a | b\n1 | 2")
    assert t.title == ""
    assert t.headers == ("a", "b")
    assert [c.raw for c in t.rows[0]] == ["1", "2"]


def test_trailing_blank_line_is_not_a_row():
    t = parse_linearized("title | X\ncol\n")
    assert t.title == "X"
    assert t.headers == ("col",)
    assert t.rows == ()
    assert serialize(t) == "title | X\ncol"


def test_empty_input_raises():
    with pytest.raises(EmptyInput):
        parse_linearized("   \n  \n")


def test_malformed_title_raises():
    with pytest.raises(MalformedTitle):
        parse_linearized("title | a | b\nx | y")


def test_ragged_rows_pad_with_warning():
    t = parse_linearized("a | b | c\n1 | 2")
    assert len(t.rows[0]) == 3
    assert t.rows[0][2].raw == ""
    assert t.warnings


def test_pipe_escape_round_trip():
    t = Table(title="", headers=("h",), rows=((Cell.of("a|b"),),))
    text = serialize(t)
    assert "a\\|b" in text
    back = parse_linearized(text)
    assert back.rows[0][0].raw == "a|b"


def test_round_trip_water_table():
    text = "title | Access to water\nservice | urban | rural\nwater | 95 | 62"
    assert serialize(parse_linearized(text)) == text


def test_tsv_format():
    t = parse_linearized("title\tX\na\tb\n1\t2", fmt="tsv")
    assert t.title == "X"
    assert t.headers == ("a", "b")
    assert serialize(t, fmt="tsv") == "title\tX\na\tb\n1\t2"


cell_text = st.text(
    alphabet=st.characters(whitelist_categories=("L", "N"), max_codepoint=0x2FF),
    min_size=0,
    max_size=8,
).map(str.strip) | st.sampled_from(["95", "3 million", "45.3%", "a|b", "x y"])


@st.composite
def tables(draw):
    n_cols = draw(st.integers(1, 4))
    n_rows = draw(st.integers(0, 5))
    headers = tuple(
        draw(st.text(alphabet="abcdefgh", min_size=1, max_size=5)) for _ in range(n_cols)
    )
    rows = []
    for _ in range(n_rows):
        row = [draw(cell_text) for _ in range(n_cols)]
        if not any(c for c in row):
            row[0] = "x"  # an all-empty row serializes to a blank line
        rows.append(tuple(Cell.of(c) for c in row))
    rows = tuple(rows)
    title = draw(st.text(alphabet="xyz ", max_size=8)).strip()
    return Table(title=title, headers=headers, rows=rows, source=TableSource.GOLD)


@given(tables())
def test_round_trip_property(table):
    # Skip degenerate serializations: no title, no headers, no rows.
    text = serialize(table)
    if not text.strip():
        return
    back = parse_linearized(text)
    assert back.title == table.title
    assert back.headers == table.headers
    assert [[c.raw for c in row] for row in back.rows] == [
        [c.raw for c in row] for row in table.rows
    ]


@given(tables())
def test_rectangular_after_parse(table):
    text = serialize(table)
    if not text.strip():
        return
    back = parse_linearized(text)
    for row in back.rows:
        assert len(row) == len(back.headers)


@pytest.mark.parametrize(
    "raw,value,unit",
    [
        ("2.51k", Decimal("2510"), Unit.THOUSAND),
        ("45.3%", Decimal("45.3"), Unit.PERCENT),
        ("1,234,567", Decimal("1234567"), Unit.NONE),
        ("1,234.5", Decimal("1234.5"), Unit.NONE),
        ("3 million", Decimal("3000000"), Unit.MILLION),
        ("$12.4", Decimal("12.4"), Unit.CURRENCY),
        ("7bn", Decimal("7000000000"), Unit.BILLION),
        ("-4.2", Decimal("-4.2"), Unit.NONE),
    ],
)
def test_normalize_number_forms(raw, value, unit):
    num = normalize_number(raw)
    assert num is not None
    assert num.value == value
    assert num.unit == unit


@pytest.mark.parametrize("raw", ["", "water", "n/a", "12 apples and 3", "3-4"])
def test_normalize_number_rejects_non_numeric(raw):
    assert normalize_number(raw) is None


def test_normalize_against_digit_filter_oracle():
    # Brute-force cross-check on plain comma-grouped integers: strip all
    # non-digits and compare.
    rng = random.Random(7)
    for _ in range(100):
        n = rng.randrange(0, 10**9)
        raw = f"{n:,}"
        expected = Decimal(int("".join(ch for ch in raw if ch.isdigit())))
        num = normalize_number(raw)
        assert num is not None and num.value == expected and num.unit == Unit.NONE


def test_normalization_idempotent():
    for raw in ["2.51k", "45.3%", "1,234.5", "3 million", "$12.4", "95"]:
        num = normalize_number(raw)
        again = normalize_number(render_number(num))
        assert again == num


def test_numeric_cell_round_trip_invariant():
    # value x unit-multiplier re-rendered and re-parsed gives the same value
    for raw in ["2.51k", "7 billion", "45.3%"]:
        num = normalize_number(raw)
        assert normalize_number(render_number(num)).value == num.value
