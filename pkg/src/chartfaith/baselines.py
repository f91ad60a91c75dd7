"""Reference-based comparison metrics: BLEU and a word-overlap PARENT.

Tokenization is deterministic: lowercased, split on whitespace with
punctuation as separate tokens. Scores are therefore comparable only
within this codebase.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .tables import Table

SMOOTH_EPS = 1e-9


class EmptyCandidate(ValueError):
    pass


class Granularity(str, Enum):
    SENTENCE = "sentence"
    SUMMARY = "summary"
    CORPUS = "corpus"


@dataclass(frozen=True)
class MetricScore:
    name: str
    value: float
    granularity: Granularity


_TOKEN_RE = re.compile(r"\w+|[^\w\s]")


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidate: str, references: list[str], max_order: int = 4) -> float:
    """Clipped n-gram precision BLEU with add-epsilon smoothing and the
    standard brevity penalty. Orders with no candidate n-grams are skipped."""
    cand = tokenize(candidate)
    if not cand:
        raise EmptyCandidate("candidate has no tokens")
    refs = [tokenize(r) for r in references]
    log_precision_sum = 0.0
    orders = 0
    for n in range(1, max_order + 1):
        cand_ngrams = _ngrams(cand, n)
        total = sum(cand_ngrams.values())
        if total == 0:
            continue
        max_ref: Counter = Counter()
        for ref in refs:
            for gram, count in _ngrams(ref, n).items():
                max_ref[gram] = max(max_ref[gram], count)
        clipped = sum(min(count, max_ref[gram]) for gram, count in cand_ngrams.items())
        if clipped == 0:
            clipped = SMOOTH_EPS
        log_precision_sum += math.log(clipped / total)
        orders += 1
    geo_mean = math.exp(log_precision_sum / orders)
    c = len(cand)
    r = min((abs(len(ref) - c), len(ref)) for ref in refs)[1] if refs else c
    bp = 1.0 if c >= r else math.exp(1.0 - r / c)
    return bp * geo_mean


def table_tokens(table: Table) -> set[str]:
    tokens: set[str] = set()
    if table.title:
        tokens.update(tokenize(table.title))
    for header in table.headers:
        tokens.update(tokenize(header))
    for row in table.rows:
        for cell in row:
            tokens.update(tokenize(cell.raw))
    return tokens


def parent(
    candidate: str,
    reference: str,
    table: Table,
    lam: float = 0.5,
    max_order: int = 4,
) -> float:
    """Word-overlap PARENT: entailed precision (n-grams backed by the
    reference or fully by table tokens) combined with a recall blending
    reference recall and table-token recall geometrically by lam."""
    cand = tokenize(candidate)
    if not cand:
        return 0.0
    ref = tokenize(reference)
    tbl = table_tokens(table)

    log_sum = 0.0
    orders = 0
    for n in range(1, max_order + 1):
        cand_ngrams = _ngrams(cand, n)
        total = sum(cand_ngrams.values())
        if total == 0:
            continue
        ref_ngrams = _ngrams(ref, n)
        entailed = 0.0
        for gram, count in cand_ngrams.items():
            if all(tok in tbl for tok in gram):
                entailed += count
            else:
                entailed += min(count, ref_ngrams[gram])
        if entailed == 0:
            entailed = SMOOTH_EPS
        log_sum += math.log(min(entailed, total) / total)
        orders += 1
    entailed_precision = math.exp(log_sum / orders)

    cand_set = set(cand)
    ref_recall = (
        sum(1 for tok in set(ref) if tok in cand_set) / len(set(ref)) if ref else 0.0
    )
    tbl_recall = sum(1 for tok in tbl if tok in cand_set) / len(tbl) if tbl else 1.0
    if lam == 0.0:
        recall = ref_recall
    elif ref_recall == 0.0 or tbl_recall == 0.0:
        recall = 0.0
    else:
        recall = math.exp((1 - lam) * math.log(ref_recall) + lam * math.log(tbl_recall))
    if entailed_precision + recall == 0.0:
        return 0.0
    return 2 * entailed_precision * recall / (entailed_precision + recall)
