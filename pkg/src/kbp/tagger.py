"""Entity tagging for slot filling.

The built-in :class:`RuleTagger` stands in for a trained sequence tagger.
Passes run in order and earlier claims win: org-suffix names, gazetteers,
regular expressions for numeric and temporal types, religion list matching,
then a capitalised-sequence heuristic for PER/ORG/LOC. Anything
implementing :class:`Tagger` can replace it.
:func:`tag_document` always finishes with a pass that marks every
occurrence of the target entity (or a variant) with the declared type.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterable, Protocol

from . import dates
from .analysis import Token, word_tokens
from .corpus import Document
from .resources import word_list

ENTITY_TYPES = (
    "PER", "ORG", "LOC", "COUNTRY", "STATE", "CITY", "DATE", "TIME", "MONEY", "PERCENT",
    "NUMBER", "ORDINAL", "TITLE", "NATIONALITY", "RELIGION", "CAUSE_OF_DEATH",
)
LOCATION_TYPES = frozenset({"LOC", "COUNTRY", "STATE", "CITY"})

HONORIFICS_MALE = frozenset({"mr.", "mr", "sir", "lord", "king", "prince"})
HONORIFICS_FEMALE = frozenset({"mrs.", "mrs", "ms.", "ms", "miss", "lady", "queen", "princess", "dame"})
HONORIFICS = HONORIFICS_MALE | HONORIFICS_FEMALE | {"dr.", "dr", "prof.", "president", "senator", "gen."}
_LOCATION_CUES = frozenset({"in", "at", "from", "near", "to"})
_SKIP_CAPS = frozenset({
    "the", "a", "an", "he", "she", "it", "his", "her", "they", "their", "we", "i", "you",
    "in", "on", "at", "by", "for", "of", "to", "from", "with", "and", "but", "or",
    "this", "that", "these", "those", "after", "before", "when", "while", "as", "if",
    "its", "our", "my", "there", "then", "also", "however", "meanwhile", "according",
})
_CAPS_CONNECTORS = frozenset({"of", "de", "&", "du", "van", "von", "der", "la"})

_TIME = re.compile(r"\b\d{1,2}:\d{2}(?::\d{2})?(?:\s*[ap]\.?m\.?)?|\b\d{1,2}\s*[ap]\.m\.", re.IGNORECASE)
_MONEY = re.compile(
    r"\$\s?\d[\d,]*(?:\.\d+)?(?:\s(?:million|billion|thousand))?"
    r"|\b\d[\d,]*(?:\.\d+)?\s(?:million\s|billion\s)?(?:dollars|pounds|euros|yen)\b",
    re.IGNORECASE,
)
_PERCENT = re.compile(r"\b\d+(?:\.\d+)?\s?(?:%|percent\b|per cent\b)", re.IGNORECASE)
_ORDINAL = re.compile(
    r"\b\d+(?:st|nd|rd|th)\b|\b(?:first|second|third|fourth|fifth|sixth|seventh|eighth|ninth|tenth)\b",
    re.IGNORECASE,
)
_NUMBER = re.compile(
    r"\b\d[\d,]*(?:\.\d+)?\b"
    r"|\b(?:one|two|three|four|five|six|seven|eight|nine|ten|eleven|twelve|twenty|hundred|thousand|million)\b",
    re.IGNORECASE,
)


@dataclass(frozen=True)
class TaggedMention:
    doc_id: str
    sentence_index: int
    field_index: int
    span: tuple[int, int]  # character offsets within the field text
    surface: str
    etype: str
    is_target: bool = False


@dataclass
class Sentence:
    index: int
    field_index: int
    start: int
    text: str
    tokens: list[Token]  # offsets within the field text

    @property
    def end(self) -> int:
        return self.start + len(self.text)

    def token_range(self, span: tuple[int, int]) -> tuple[int, int]:
        """Indices ``[i, j)`` of tokens overlapping a character span."""
        idx = [k for k, t in enumerate(self.tokens) if t.start < span[1] and t.end > span[0]]
        if not idx:
            return (0, 0)
        return idx[0], idx[-1] + 1


@dataclass
class TaggedDocument:
    doc: Document
    sentences: list[Sentence]
    mentions: list[TaggedMention]

    def sentence_mentions(self, index: int) -> list[TaggedMention]:
        return [m for m in self.mentions if m.sentence_index == index]


class Tagger(Protocol):
    def tag_sentence(self, text: str) -> list[tuple[int, int, str]]:
        """Non-overlapping ``(start, end, etype)`` spans, offsets within ``text``."""
        ...


def _alternation(terms: Iterable[str], ignore_case: bool) -> re.Pattern:
    alts = sorted(set(terms), key=lambda t: (-len(t), t))
    body = "|".join(re.escape(t) for t in alts)
    return re.compile(r"(?<![\w])(?:" + body + r")(?![\w])", re.IGNORECASE if ignore_case else 0)


class RuleTagger:
    """Deterministic gazetteer/regex/heuristic tagger."""

    # (list name, etype, case-insensitive)
    GAZETTEERS = (
        ("countries", "COUNTRY", False),
        ("states", "STATE", False),
        ("cities", "CITY", False),
        ("nationalities", "NATIONALITY", False),
        ("causes_of_death", "CAUSE_OF_DEATH", True),
        ("titles", "TITLE", True),
    )

    @cached_property
    def _gazetteers(self):
        return [(_alternation(word_list(name), ci), etype) for name, etype, ci in self.GAZETTEERS]

    @cached_property
    def _religions(self):
        return _alternation(word_list("religions"), False)

    @cached_property
    def _org_words(self) -> frozenset[str]:
        return frozenset(w.rstrip(".").lower() for w in word_list("org_suffixes"))

    @cached_property
    def _first_names(self) -> frozenset[str]:
        return frozenset(word_list("male_names")) | frozenset(word_list("female_names"))

    def tag_sentence(self, text: str) -> list[tuple[int, int, str]]:
        spans: list[tuple[int, int, str]] = []
        self._capitalised(text, spans, org_only=True)
        found = []
        for priority, (pattern, etype) in enumerate(self._gazetteers):
            for m in pattern.finditer(text):
                found.append((m.start(), -(m.end() - m.start()), priority, m.end(), etype))
        for start, _, _, end, etype in sorted(found):
            _claim(spans, start, end, etype)
        for pattern, etype in self._regexes():
            for m in pattern.finditer(text):
                _claim(spans, m.start(), m.end(), etype)
        for m in self._religions.finditer(text):
            _claim(spans, m.start(), m.end(), "RELIGION")
        self._capitalised(text, spans)
        return sorted(spans)

    @staticmethod
    def _regexes():
        return (
            (dates.ISO_DAY, "DATE"), (dates.MONTH_DAY_YEAR, "DATE"), (dates.DAY_MONTH_YEAR, "DATE"),
            (dates.SEASON_YEAR, "DATE"), (dates.MONTH_YEAR, "DATE"), (dates.MONTH_DAY, "DATE"),
            (dates.WEEKDAY, "DATE"), (_TIME, "TIME"), (_MONEY, "MONEY"), (_PERCENT, "PERCENT"),
            (dates.YEAR, "DATE"), (dates.LONE_MONTH, "DATE"), (_ORDINAL, "ORDINAL"), (_NUMBER, "NUMBER"),
        )

    def _capitalised(self, text: str, spans: list, org_only: bool = False) -> None:
        tokens = word_tokens(text)
        covered = [any(s < t.end and e > t.start for s, e, _ in spans) for t in tokens]
        i = 0
        while i < len(tokens):
            if covered[i] or not _is_cap(tokens[i].text) or tokens[i].text.lower() in _SKIP_CAPS:
                i += 1
                continue
            j = i + 1
            while j < len(tokens) and not covered[j]:
                tj = tokens[j].text
                if _is_cap(tj) and tj.lower() not in _SKIP_CAPS:
                    j += 1
                elif (tj.lower() in _CAPS_CONNECTORS and j + 1 < len(tokens) and not covered[j + 1]
                      and _is_cap(tokens[j + 1].text)):
                    j += 2
                else:
                    break
            seq = tokens[i:j]
            prev = tokens[i - 1].text.lower() if i > 0 else None
            etype = self._classify(seq, prev)
            if etype and (not org_only or etype == "ORG" and len(seq) > 1):
                _claim(spans, seq[0].start, seq[-1].end, etype)
            i = j

    def _classify(self, seq: list[Token], prev: str | None) -> str | None:
        words = [t.text for t in seq]
        if any(w.rstrip(".").lower() in self._org_words for w in words):
            return "ORG"
        if words[0].lower() in HONORIFICS or words[0] in self._first_names:
            return "PER"
        if prev in _LOCATION_CUES and len(words) == 1:
            return "LOC"
        if prev is None and len(words) == 1:
            return None  # sentence-initial capital alone is no evidence
        return "PER" if len(words) >= 2 else "ORG"


def _is_cap(tok: str) -> bool:
    return tok[:1].isupper() and tok[:1].isalpha()


def _claim(spans: list, start: int, end: int, etype: str) -> bool:
    if any(s < end and e > start for s, e, _ in spans):
        return False
    spans.append((start, end, etype))
    return True


_DEFAULT_TAGGER = RuleTagger()


def _target_pattern(names: Iterable[str]) -> re.Pattern | None:
    names = [n for n in names if n and n.strip()]
    if not names:
        return None
    return _alternation(names, ignore_case=False)


def tag_document(doc: Document, target: str | None = None, variants: Iterable[str] = (),
                 target_type: str = "PER", tagger: Tagger | None = None) -> TaggedDocument:
    tagger = tagger or _DEFAULT_TAGGER
    pattern = _target_pattern([target, *variants]) if target else None
    sentences, mentions = [], []
    for k, fi, start, text in doc.iter_sentences():
        sent = Sentence(k, fi, start, text, word_tokens(text, offset=start))
        sentences.append(sent)
        spans = list(tagger.tag_sentence(text))
        if pattern is not None:
            hits = [(m.start(), m.end()) for m in pattern.finditer(text)]
            spans = [s for s in spans if not any(s[0] < e and s[1] > b for b, e in hits)]
            spans += [(b, e, "TARGET") for b, e in hits]
        for s, e, etype in sorted(spans):
            is_target = etype == "TARGET"
            mentions.append(TaggedMention(
                doc.doc_id, k, fi, (start + s, start + e), text[s:e],
                target_type if is_target else etype, is_target,
            ))
    return TaggedDocument(doc, sentences, mentions)


def tag_entities(doc: Document, target: str | None = None, variants: Iterable[str] = (),
                 target_type: str = "PER", tagger: Tagger | None = None) -> list[TaggedMention]:
    return tag_document(doc, target, variants, target_type, tagger).mentions


def with_target(m: TaggedMention, etype: str) -> TaggedMention:
    return replace(m, etype=etype, is_target=True)
