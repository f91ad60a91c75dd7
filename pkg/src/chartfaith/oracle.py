"""Deterministic rule-based entailment oracle.

Verifies a sentence against a table using a controlled claim grammar:
point values, pairwise comparisons, extrema, aggregates and deltas.
Numeric matching follows the annotation tolerance policy: a claimed
number agrees with a table value when the table value, rounded to the
claim's written precision (at most 2 decimals), equals the claim.

The grammar is documented in docs/claim_grammar.ebnf.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from decimal import Decimal, ROUND_HALF_UP
from enum import Enum
from typing import Optional

from .segment import Sentence
from .tables import Table, NumericValue, Unit, UNIT_MULTIPLIER

MAX_CLAIM_DECIMALS = 2


class ClaimKind(str, Enum):
    POINT = "point"
    COMPARISON = "comparison"
    EXTREMUM = "extremum"
    AGGREGATE = "aggregate"
    DELTA = "delta"
    UNPARSEABLE = "unparseable"


@dataclass(frozen=True)
class ClaimNumber:
    """A numeric mention as written in a claim."""

    text: str
    display_value: Decimal
    decimals: int
    unit: Unit


@dataclass
class ClaimParse:
    kind: ClaimKind
    numbers: list[ClaimNumber] = field(default_factory=list)
    anchors: list[str] = field(default_factory=list)
    verified: Optional[bool] = None
    detail: str = ""


_CLAIM_NUMBER_RE = re.compile(
    r"""(?<![\w.])
    (?P<currency>[$€£¥])?
    (?P<digits>\d{1,3}(?:,\d{3})+(?:\.\d+)?|\d+(?:\.\d+)?|\.\d+)
    \s*
    (?P<suffix>%|k\b|K\b|thousand\b|million\b|billion\b|mn\b|bn\b|percent\b)?
    """,
    re.VERBOSE,
)

_SUFFIX_UNIT = {
    "%": Unit.PERCENT,
    "percent": Unit.PERCENT,
    "k": Unit.THOUSAND,
    "thousand": Unit.THOUSAND,
    "million": Unit.MILLION,
    "mn": Unit.MILLION,
    "billion": Unit.BILLION,
    "bn": Unit.BILLION,
}

_HIGHER = r"higher|greater|larger|bigger|more"
_LOWER = r"lower|smaller|less|fewer"
_COMPARISON_RE = re.compile(
    rf"\b(?P<cmp>{_HIGHER}|{_LOWER})\b.*\bthan\b", re.IGNORECASE | re.DOTALL
)
_EXTREMUM_RE = re.compile(
    r"\b(?P<ext>highest|largest|greatest|maximum|max|peak|lowest|smallest|minimum|min)\b",
    re.IGNORECASE,
)
_AGGREGATE_RE = re.compile(
    r"\b(?P<agg>average|mean|total|sum|combined)\b", re.IGNORECASE
)
_DELTA_RE = re.compile(
    r"\b(?P<dir>increased|decreased|rose|fell|grew|dropped|declined|gained|lost)\b"
    r"\s+by\b",
    re.IGNORECASE,
)


def extract_claim_numbers(text: str) -> list[ClaimNumber]:
    numbers = []
    for m in _CLAIM_NUMBER_RE.finditer(text):
        digits = m.group("digits").replace(",", "")
        decimals = len(digits.split(".")[1]) if "." in digits else 0
        suffix = m.group("suffix")
        if m.group("currency"):
            unit = Unit.CURRENCY
        elif suffix:
            unit = _SUFFIX_UNIT[suffix.lower()]
        else:
            unit = Unit.NONE
        numbers.append(
            ClaimNumber(
                text=m.group(0).strip(),
                display_value=Decimal(digits),
                decimals=decimals,
                unit=unit,
            )
        )
    return numbers


def value_matches(cell_value: Decimal, claim: ClaimNumber) -> bool:
    """Tolerance rule: round the table value at the claim's display scale
    to the claim's written precision (capped at 2 decimals) and compare."""
    scale = UNIT_MULTIPLIER[claim.unit]
    display = cell_value / scale
    d = min(claim.decimals, MAX_CLAIM_DECIMALS)
    quantum = Decimal(1).scaleb(-d)
    rounded = display.quantize(quantum, rounding=ROUND_HALF_UP)
    return rounded == claim.display_value


class OracleBackend:
    """EntailmentBackend with bit-exact deterministic scores.

    strict mode scores out-of-grammar sentences 0.0; permissive mode 1.0.
    """

    deterministic = True
    supports_rationale = True

    def __init__(self, strict: bool = True):
        self.strict = strict

    def score(self, sentence: Sentence, table: Table, title: str = "") -> float:
        value, _ = self.score_with_parse(sentence, table)
        return value

    def score_with_parse(
        self, sentence: Sentence, table: Table
    ) -> tuple[float, ClaimParse]:
        parse = verify_claim(sentence.text, table)
        if parse.kind is ClaimKind.UNPARSEABLE:
            return (1.0 if not self.strict else 0.0), parse
        return (1.0 if parse.verified else 0.0), parse


def _numeric_cells(table: Table) -> list[Decimal]:
    return [
        cell.numeric.value
        for row in table.rows
        for cell in row
        if cell.numeric is not None
    ]


def _find_anchors(text: str, table: Table) -> tuple[list[str], set[int], set[int]]:
    """Header and label-cell texts mentioned in the claim, with the row and
    column index sets they anchor."""
    lowered = text.lower()
    anchors: list[str] = []
    row_idx: set[int] = set()
    col_idx: set[int] = set()

    def mentioned(label: str) -> bool:
        label = label.strip().lower()
        if len(label) < 2:
            return False
        return re.search(rf"(?<!\w){re.escape(label)}(?!\w)", lowered) is not None

    for j, header in enumerate(table.headers):
        if mentioned(header):
            anchors.append(header)
            col_idx.add(j)
    for i, row in enumerate(table.rows):
        for cell in row:
            if cell.numeric is None and mentioned(cell.raw):
                anchors.append(cell.raw)
                row_idx.add(i)
    return anchors, row_idx, col_idx


def _candidate_values(table: Table, row_idx: set[int], col_idx: set[int]) -> list[Decimal]:
    values: list[Decimal] = []
    for i, row in enumerate(table.rows):
        for j, cell in enumerate(row):
            if cell.numeric is None:
                continue
            if (row_idx or col_idx) and not (i in row_idx or j in col_idx):
                continue
            values.append(cell.numeric.value)
    return values


def _literal_mention(claim: ClaimNumber, table: Table) -> bool:
    """A claim number that reproduces a header or label verbatim (e.g. a
    year used as a column name) counts as a reference, not a data claim."""
    token = claim.text.strip()
    if token in table.headers:
        return True
    for row in table.rows:
        for cell in row:
            if cell.numeric is None and cell.raw == token:
                return True
    return False


def _match_any(claim: ClaimNumber, values: list[Decimal]) -> bool:
    return any(value_matches(v, claim) for v in values)


def _exact_mention(claim: ClaimNumber, values: list[Decimal]) -> bool:
    """Exact (unrounded) equality against any table value; lets dates and
    other verbatim cell mentions outside the anchored rows pass. Claims
    written with more decimals than the tolerance cap are still rejected
    as over-precise."""
    if claim.decimals > MAX_CLAIM_DECIMALS:
        return False
    scale = UNIT_MULTIPLIER[claim.unit]
    return any(v / scale == claim.display_value for v in values)


def verify_claim(text: str, table: Table) -> ClaimParse:
    numbers = extract_claim_numbers(text)
    anchors, row_idx, col_idx = _find_anchors(text, table)
    candidates = _candidate_values(table, row_idx, col_idx)
    all_values = _numeric_cells(table)
    data_numbers = [n for n in numbers if not _literal_mention(n, table)]

    comparison = _COMPARISON_RE.search(text)
    extremum = _EXTREMUM_RE.search(text)
    aggregate = _AGGREGATE_RE.search(text)
    delta = _DELTA_RE.search(text)

    # Prefer the numbers that are not verbatim cell references (years etc.)
    # as the asserted quantity.
    asserted = [n for n in data_numbers if not _exact_mention(n, all_values)]
    primary = asserted or data_numbers

    if comparison and len(data_numbers) >= 2:
        return _verify_comparison(comparison, data_numbers, candidates, anchors)
    if delta and data_numbers:
        return _verify_delta(delta, primary[0], table, row_idx, col_idx, anchors)
    if aggregate and data_numbers:
        return _verify_aggregate(
            aggregate, primary[0], candidates or all_values, anchors
        )
    if extremum and data_numbers:
        return _verify_extremum(
            extremum, primary[0], candidates or all_values, anchors
        )
    if data_numbers:
        pool = candidates or all_values
        ok = all(
            _match_any(n, pool) or _exact_mention(n, all_values)
            for n in data_numbers
        )
        return ClaimParse(
            kind=ClaimKind.POINT,
            numbers=data_numbers,
            anchors=anchors,
            verified=ok,
            detail="all numbers matched" if ok else "unmatched number present",
        )
    return ClaimParse(kind=ClaimKind.UNPARSEABLE, numbers=numbers, anchors=anchors)


def _verify_comparison(
    match: re.Match, numbers: list[ClaimNumber], candidates: list[Decimal], anchors
) -> ClaimParse:
    first, second = numbers[0], numbers[1]
    greater = re.fullmatch(_HIGHER, match.group("cmp"), re.IGNORECASE) is not None
    ok = False
    for a in candidates:
        if not value_matches(a, first):
            continue
        for b in candidates:
            if not value_matches(b, second):
                continue
            if (greater and a > b) or (not greater and a < b):
                ok = True
    return ClaimParse(
        kind=ClaimKind.COMPARISON,
        numbers=numbers[:2],
        anchors=anchors,
        verified=ok,
        detail=f"direction={'>' if greater else '<'}",
    )


def _verify_extremum(
    match: re.Match, number: ClaimNumber, values: list[Decimal], anchors
) -> ClaimParse:
    word = match.group("ext").lower()
    wants_max = word in {"highest", "largest", "greatest", "maximum", "max", "peak"}
    ok = False
    if values:
        target = max(values) if wants_max else min(values)
        ok = value_matches(target, number)
    return ClaimParse(
        kind=ClaimKind.EXTREMUM,
        numbers=[number],
        anchors=anchors,
        verified=ok,
        detail=f"{'max' if wants_max else 'min'} over {len(values)} cells",
    )


def _verify_aggregate(
    match: re.Match, number: ClaimNumber, values: list[Decimal], anchors
) -> ClaimParse:
    word = match.group("agg").lower()
    ok = False
    if values:
        total = sum(values, Decimal(0))
        if word in {"average", "mean"}:
            target = total / Decimal(len(values))
        else:
            target = total
        ok = value_matches(target, number)
    return ClaimParse(
        kind=ClaimKind.AGGREGATE,
        numbers=[number],
        anchors=anchors,
        verified=ok,
        detail=f"{word} over {len(values)} cells",
    )


def _verify_delta(
    match: re.Match,
    number: ClaimNumber,
    table: Table,
    row_idx: set[int],
    col_idx: set[int],
    anchors,
) -> ClaimParse:
    word = match.group("dir").lower()
    upward = word in {"increased", "rose", "grew", "gained"}

    def series() -> list[list[Decimal]]:
        out = []
        rows = row_idx or range(len(table.rows))
        for i in rows:
            out.append(
                [c.numeric.value for c in table.rows[i] if c.numeric is not None]
            )
        cols = col_idx or range(len(table.headers))
        for j in cols:
            out.append(
                [
                    row[j].numeric.value
                    for row in table.rows
                    if j < len(row) and row[j].numeric is not None
                ]
            )
        return out

    ok = False
    for seq in series():
        for a, b in zip(seq, seq[1:]):
            change = b - a
            if upward and change > 0 and value_matches(change, number):
                ok = True
            if not upward and change < 0 and value_matches(-change, number):
                ok = True
    return ClaimParse(
        kind=ClaimKind.DELTA,
        numbers=[number],
        anchors=anchors,
        verified=ok,
        detail=f"direction={'up' if upward else 'down'}",
    )
