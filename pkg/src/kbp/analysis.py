"""Tokenisation and sentence splitting shared by the index and the taggers."""

from __future__ import annotations

import re
from typing import NamedTuple

from .resources import stopwords

_INDEX_TOKEN = re.compile(r"[^\W_]+")
# Sentence end: terminal punctuation followed by whitespace + uppercase, or end of text.
_SENTENCE_END = re.compile(r"[.!?](?=\s+[A-Z]|\s*$)")
# Word tokens keep internal hyphens/apostrophes/periods ("U.S.", "O'Neil").
_WORD_TOKEN = re.compile(r"[^\W_]+(?:['.\-][^\W_]+)*|[^\w\s]")
_ABBREVIATIONS = frozenset(
    "mr mrs ms dr st jr sr inc corp co ltd gen gov sen rep prof lt col capt mt".split()
)


def index_tokens(text: str, remove_stopwords: bool = False) -> list[str]:
    """Lowercase and split on non-alphanumerics, optionally dropping stopwords."""
    tokens = _INDEX_TOKEN.findall(text.lower())
    if remove_stopwords:
        stop = stopwords()
        tokens = [t for t in tokens if t not in stop]
    return tokens


def split_sentences(text: str) -> list[tuple[int, int]]:
    """Character spans of sentences; leading whitespace is excluded from each span."""
    spans = []
    start = 0
    for m in _SENTENCE_END.finditer(text):
        if text[m.start()] == "." and _ends_with_abbreviation(text, m.start()):
            continue
        end = m.end()
        _append_span(spans, text, start, end)
        start = end
    _append_span(spans, text, start, len(text))
    return spans


def _ends_with_abbreviation(text: str, dot: int) -> bool:
    j = dot
    while j > 0 and text[j - 1].isalpha():
        j -= 1
    word = text[j:dot]
    # "U.S." style: the word is preceded by another dot.
    return _is_abbreviation(word) or (j > 0 and text[j - 1] == ".")


def _append_span(spans, text, start, end):
    while start < end and text[start].isspace():
        start += 1
    while end > start and text[end - 1].isspace():
        end -= 1
    if end > start:
        spans.append((start, end))


class Token(NamedTuple):
    text: str
    start: int
    end: int

    @property
    def is_word(self) -> bool:
        return self.text[0].isalnum()


def word_tokens(text: str, offset: int = 0) -> list[Token]:
    """Surface tokens with character offsets (shifted by ``offset``)."""
    out = []
    for m in _WORD_TOKEN.finditer(text):
        tok, start, end = m.group(), m.start(), m.end()
        if tok == "." and out and out[-1].end == start + offset and _is_abbreviation(out[-1].text):
            prev = out.pop()
            out.append(Token(prev.text + ".", prev.start, end + offset))
            continue
        out.append(Token(tok, start + offset, end + offset))
    return out


def _is_abbreviation(tok: str) -> bool:
    return tok.lower() in _ABBREVIATIONS or (len(tok) == 1 and tok.isupper()) or "." in tok
