"""Deterministic rule-based sentence segmentation.

Summaries are split into the sentence units that get scored individually.
Splits happen after '.', '!' or '?' followed by whitespace and an
uppercase letter or digit; decimal numbers, a fixed abbreviation list and
ellipses are protected. Newlines always end a sentence.
"""

from __future__ import annotations

from dataclasses import dataclass

# Abbreviations that may end in '.' without ending a sentence.
ABBREVIATIONS = frozenset(
    {
        "u.s.",
        "u.k.",
        "u.n.",
        "e.g.",
        "i.e.",
        "etc.",
        "vs.",
        "fig.",
        "figs.",
        "no.",
        "dr.",
        "mr.",
        "mrs.",
        "ms.",
        "prof.",
        "st.",
        "jr.",
        "sr.",
        "inc.",
        "ltd.",
        "co.",
        "corp.",
        "dept.",
        "est.",
        "approx.",
        "avg.",
        "jan.",
        "feb.",
        "mar.",
        "apr.",
        "jun.",
        "jul.",
        "aug.",
        "sep.",
        "sept.",
        "oct.",
        "nov.",
        "dec.",
    }
)


@dataclass(frozen=True)
class Sentence:
    text: str
    index: int
    char_span: tuple[int, int]


@dataclass(frozen=True)
class Summary:
    text: str
    sentences: tuple[Sentence, ...]

    def __len__(self) -> int:
        return len(self.sentences)


def _trailing_token(text: str, end: int) -> str:
    """The whitespace-delimited token ending at position end (inclusive)."""
    start = end
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    return text[start : end + 1]


def _is_boundary(text: str, i: int) -> bool:
    """Whether the terminator at index i ends a sentence."""
    ch = text[i]
    if ch in "!?":
        pass
    elif ch == ".":
        # Inside a decimal number or an ellipsis.
        if i + 1 < len(text) and text[i + 1] in ".0123456789":
            return False
        if i > 0 and text[i - 1] == ".":
            return False
        token = _trailing_token(text, i).lower()
        if token in ABBREVIATIONS:
            return False
    else:
        return False
    # Must be followed by whitespace then an uppercase letter or digit
    # (or end of text).
    j = i + 1
    if j >= len(text):
        return True
    if not text[j].isspace():
        return False
    while j < len(text) and text[j].isspace():
        j += 1
    if j >= len(text):
        return True
    return text[j].isupper() or text[j].isdigit()


def segment(summary_text: str) -> Summary:
    """Split summary text into sentences with character spans.

    Concatenating the spans in order, together with the gaps between
    them, reconstructs the input exactly.
    """
    sentences: list[Sentence] = []
    start = 0
    i = 0
    n = len(summary_text)
    while i < n:
        ch = summary_text[i]
        if ch == "\n" or (ch in ".!?" and _is_boundary(summary_text, i)):
            end = i if ch == "\n" else i + 1
            piece = summary_text[start:end]
            if piece.strip():
                a = start + (len(piece) - len(piece.lstrip()))
                b = start + len(piece.rstrip())
                sentences.append(
                    Sentence(
                        text=summary_text[a:b],
                        index=len(sentences),
                        char_span=(a, b),
                    )
                )
            start = end
            i = end + 1 if ch == "\n" else end
        else:
            i += 1
    piece = summary_text[start:]
    if piece.strip():
        a = start + (len(piece) - len(piece.lstrip()))
        b = start + len(piece.rstrip())
        sentences.append(
            Sentence(text=summary_text[a:b], index=len(sentences), char_span=(a, b))
        )
    return Summary(text=summary_text, sentences=tuple(sentences))
