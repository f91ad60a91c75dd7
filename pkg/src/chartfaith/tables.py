"""Parsing, validation and serialization of linearized data tables.

Tables arrive as plain text emitted by chart de-rendering models: one row
per line, cells separated by " | ", with an optional leading
"title | <text>" line. A TSV variant with the same title convention is
supported through a format flag.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from enum import Enum
from typing import Optional


class TableError(Exception):
    """Base class for table parsing failures."""


class EmptyInput(TableError):
    """Raised when the input contains no non-blank lines."""


class MalformedTitle(TableError):
    """Raised when a title line has more than two segments."""


class Unit(str, Enum):
    NONE = "none"
    PERCENT = "percent"
    THOUSAND = "thousand"
    MILLION = "million"
    BILLION = "billion"
    CURRENCY = "currency"


UNIT_MULTIPLIER = {
    Unit.NONE: Decimal(1),
    Unit.PERCENT: Decimal(1),
    Unit.THOUSAND: Decimal(1000),
    Unit.MILLION: Decimal(1_000_000),
    Unit.BILLION: Decimal(1_000_000_000),
    Unit.CURRENCY: Decimal(1),
}

# Cell values use exact decimal arithmetic, 12 significant digits.
_DECIMAL_PRECISION = 12


@dataclass(frozen=True)
class NumericValue:
    """A parsed numeric cell value in base units plus its unit tag."""

    value: Decimal
    unit: Unit = Unit.NONE


@dataclass(frozen=True)
class Cell:
    raw: str
    numeric: Optional[NumericValue] = None

    @staticmethod
    def of(raw: str) -> "Cell":
        return Cell(raw=raw, numeric=normalize_number(raw))


class TableSource(str, Enum):
    GOLD = "gold"
    DERENDERED = "derendered"


@dataclass(frozen=True)
class Table:
    title: str
    headers: tuple[str, ...]
    rows: tuple[tuple[Cell, ...], ...]
    source: TableSource = TableSource.GOLD
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        for i, row in enumerate(self.rows):
            if len(row) != len(self.headers):
                raise TableError(
                    f"row {i} has {len(row)} cells, expected {len(self.headers)}"
                )

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.headers)


_NUMBER_RE = re.compile(
    r"""^\s*
    (?P<currency>[$€£¥])?\s*
    (?P<sign>[-+])?\s*
    (?P<digits>\d{1,3}(?:,\d{3})+(?:\.\d+)?|\d+(?:\.\d+)?|\.\d+)
    \s*
    (?P<suffix>%|k|K|m(?!\w)|M(?!\w)|b(?!\w)|B(?!\w)|
       thousand|million|billion|mn|bn|percent)?
    \s*$""",
    re.VERBOSE,
)

_SUFFIX_UNIT = {
    "%": Unit.PERCENT,
    "percent": Unit.PERCENT,
    "k": Unit.THOUSAND,
    "thousand": Unit.THOUSAND,
    "m": Unit.MILLION,
    "mn": Unit.MILLION,
    "million": Unit.MILLION,
    "b": Unit.BILLION,
    "bn": Unit.BILLION,
    "billion": Unit.BILLION,
}


def normalize_number(raw: str) -> Optional[NumericValue]:
    """Parse a cell text into a base-unit value and unit tag.

    Recognized forms include "1,234.5", "45.3%", "2.51k", "3 million" and
    "$12.4". Returns None for non-numeric text.
    """
    if not raw or not raw.strip():
        return None
    m = _NUMBER_RE.match(raw)
    if m is None:
        return None
    digits = m.group("digits").replace(",", "")
    with localcontext() as ctx:
        ctx.prec = _DECIMAL_PRECISION
        value = +Decimal(digits)
        if m.group("sign") == "-":
            value = -value
        suffix = m.group("suffix")
        if m.group("currency"):
            unit = Unit.CURRENCY
            if suffix and suffix.lower() != "%":
                value = +(value * UNIT_MULTIPLIER[_SUFFIX_UNIT[suffix.lower()]])
        elif suffix:
            unit = _SUFFIX_UNIT[suffix.lower()]
            value = +(value * UNIT_MULTIPLIER[unit])
        else:
            unit = Unit.NONE
    return NumericValue(value=value, unit=unit)


def render_number(num: NumericValue) -> str:
    """Canonical text rendering of a normalized value; re-parses to itself."""
    scaled = num.value / UNIT_MULTIPLIER[num.unit]
    text = format(scaled.normalize(), "f")
    if num.unit is Unit.PERCENT:
        return text + "%"
    if num.unit is Unit.THOUSAND:
        return text + "k"
    if num.unit is Unit.MILLION:
        return text + " million"
    if num.unit is Unit.BILLION:
        return text + " billion"
    if num.unit is Unit.CURRENCY:
        return "$" + text
    return text


_ESCAPED_PIPE = "\\|"


def _split_cells(line: str, sep: str) -> list[str]:
    if sep == "\t":
        return line.split("\t")
    # Split on " | " but honor the "\|" escape.
    parts: list[str] = []
    buf: list[str] = []
    i = 0
    while i < len(line):
        if line.startswith(_ESCAPED_PIPE, i):
            buf.append("|")
            i += 2
        elif line.startswith(" | ", i):
            parts.append("".join(buf))
            buf = []
            i += 3
        else:
            buf.append(line[i])
            i += 1
    parts.append("".join(buf))
    return parts


def _escape_cell(text: str, sep: str) -> str:
    if sep == "\t":
        return text.replace("\t", " ")
    return text.replace("|", _ESCAPED_PIPE)


def parse_linearized(
    text: str,
    source: TableSource = TableSource.GOLD,
    fmt: str = "pipe",
) -> Table:
    """Parse linearized table text into a Table.

    Ragged rows are padded with empty cells and reported through the
    table's warning list rather than raised.
    """
    sep = "\t" if fmt == "tsv" else " | "
    lines = [ln for ln in text.split("\n") if ln.strip()]
    if not lines:
        raise EmptyInput("no non-blank lines in input")

    title = ""
    first = _split_cells(lines[0], sep)
    if first and first[0].strip().lower() == "title":
        if len(first) > 2:
            raise MalformedTitle(f"title line has {len(first)} segments")
        title = first[1].strip() if len(first) == 2 else ""
        lines = lines[1:]

    warnings: list[str] = []
    if not lines:
        return Table(title=title, headers=(), rows=(), source=source)

    headers = tuple(h.strip() for h in _split_cells(lines[0], sep))
    rows: list[tuple[Cell, ...]] = []
    for idx, line in enumerate(lines[1:]):
        cells = [c.strip() for c in _split_cells(line, sep)]
        if len(cells) != len(headers):
            warnings.append(
                f"row {idx} has {len(cells)} cells, expected {len(headers)}; padded/truncated"
            )
            if len(cells) < len(headers):
                cells = cells + [""] * (len(headers) - len(cells))
            else:
                cells = cells[: len(headers)]
        rows.append(tuple(Cell.of(c) for c in cells))
    return Table(
        title=title,
        headers=headers,
        rows=tuple(rows),
        source=source,
        warnings=tuple(warnings),
    )


def serialize(table: Table, fmt: str = "pipe") -> str:
    """Serialize a Table back to linearized text; inverse of parse_linearized."""
    sep = "\t" if fmt == "tsv" else " | "
    lines: list[str] = []
    if table.title:
        lines.append(sep.join(["title", _escape_cell(table.title, sep)]))
    if table.headers:
        lines.append(sep.join(_escape_cell(h, sep) for h in table.headers))
    for row in table.rows:
        lines.append(sep.join(_escape_cell(c.raw, sep) for c in row))
    return "\n".join(lines)
