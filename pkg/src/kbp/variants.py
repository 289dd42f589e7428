"""Name-variant dictionary from a wiki dump subset, and retrieval query formulation."""

from __future__ import annotations

import enum
import json
import logging
import re
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .query import And, Or, Query, Term
from .resources import json_table

log = logging.getLogger(__name__)

NAME_ATTRIBUTES = ("name", "nickname", "birth_name", "stage_name", "alias")
MAX_REDIRECT_DEPTH = 5

_BOLD = re.compile(r"'''(.+?)'''")
_LINK = re.compile(r"\[\[(?:[^\]|]*\|)?([^\]]*)\]\]")
_DISAMBIG_SUFFIX = re.compile(r"\s*\(disambiguation\)\s*$", re.IGNORECASE)


@dataclass
class WikiPage:
    title: str
    kind: str = "article"  # article | redirect | disambig
    first_para: str = ""
    infobox: list[tuple[str, str]] = field(default_factory=list)
    redirect_to: str | None = None
    targets: list[str] = field(default_factory=list)
    links: list[tuple[str, str]] = field(default_factory=list)

    @classmethod
    def from_json(cls, obj: dict) -> "WikiPage":
        infobox = obj.get("infobox") or []
        if isinstance(infobox, dict):
            infobox = list(infobox.items())
        return cls(
            title=obj["title"],
            kind=obj.get("kind", "article"),
            first_para=obj.get("first_para", ""),
            infobox=[(str(k), str(v)) for k, v in infobox],
            redirect_to=obj.get("redirect_to"),
            targets=list(obj.get("targets") or []),
            links=[tuple(link) for link in obj.get("links") or []],
        )


def read_dump(path: Path) -> list[WikiPage]:
    with open(path, encoding="utf-8") as fh:
        return [WikiPage.from_json(json.loads(line)) for line in fh if line.strip()]


def _clean_markup(text: str) -> str:
    text = _LINK.sub(r"\1", text)
    text = text.replace("'''", "").replace("''", "")
    text = re.sub(r"<[^>]+>", " ", text)
    return " ".join(text.split())


def extract_variants(page: WikiPage) -> set[str]:
    """Variant names found on an article page (always includes its title)."""
    if page.kind == "redirect":
        raise ValueError("extract_variants expects an article, got a redirect")
    out = {page.title}
    for attr, value in page.infobox:
        if any(key in attr.lower() for key in NAME_ATTRIBUTES):
            for part in re.split(r"<br\s*/?>|;", value):
                cleaned = _clean_markup(part)
                if cleaned:
                    out.add(cleaned)
    bold = [_clean_markup(b) for b in _BOLD.findall(page.first_para)]
    out.update(b for b in bold if b)
    plain = _clean_markup(page.first_para)
    for name in {page.title, *bold}:
        if not name:
            continue
        for m in re.finditer(re.escape(name) + r",?\s*\(\s*([A-Z]{2,})\s*\)", plain):
            out.add(m.group(1))
    return out


class VariantDictionary:
    """canonical title -> variants, with the exact inverse multimap."""

    def __init__(self):
        self.entries: dict[str, set[str]] = {}
        self.reverse: dict[str, set[str]] = {}
        self._folded: dict[str, set[str]] = defaultdict(set)

    def add(self, canonical: str, variant: str) -> None:
        for title, v in ((canonical, canonical), (canonical, variant)):
            self.entries.setdefault(title, set()).add(v)
            self.reverse.setdefault(v, set()).add(title)
            self._folded[v.casefold()].add(v)

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, VariantDictionary) and self.entries == other.entries

    def variants_of(self, title: str) -> set[str]:
        return set(self.entries.get(title, ()))

    def titles_for(self, name: str) -> set[str]:
        """Canonical titles that list ``name`` as a variant (exact, else case-folded)."""
        if name in self.reverse:
            return set(self.reverse[name])
        out = set()
        for v in self._folded.get(name.casefold(), ()):
            out |= self.reverse[v]
        return out

    def pairs(self) -> list[tuple[str, str]]:
        return sorted((t, v) for t, vs in self.entries.items() for v in vs)

    def save_tsv(self, path: Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for t, v in self.pairs():
                fh.write(f"{t}\t{v}\n")

    @classmethod
    def load_tsv(cls, path: Path) -> "VariantDictionary":
        d = cls()
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if line:
                    t, v = line.split("\t", 1)
                    d.add(t, v)
        return d


def _resolve_redirect(title: str, redirects: dict[str, str]) -> str | None:
    seen = {title}
    cur = title
    for _ in range(MAX_REDIRECT_DEPTH):
        nxt = redirects.get(cur)
        if nxt is None:
            return cur
        if nxt in seen:
            return None
        seen.add(nxt)
        cur = nxt
    return cur if cur not in redirects else None


def build_dictionary(dump: Iterable[WikiPage]) -> VariantDictionary:
    pages = list(dump)
    redirects = {p.title: p.redirect_to for p in pages if p.kind == "redirect" and p.redirect_to}
    d = VariantDictionary()
    for page in pages:
        if page.kind == "article":
            for v in sorted(extract_variants(page)):
                d.add(page.title, v)
            for anchor, target in page.links:
                anchor = _clean_markup(anchor)
                resolved = _resolve_redirect(target, redirects)
                if anchor and resolved and anchor != resolved:
                    d.add(resolved, anchor)
        elif page.kind == "redirect":
            if not page.redirect_to:
                continue
            target = _resolve_redirect(page.title, redirects)
            if target is None:
                log.warning("dropping redirect %r: chain deeper than %d or cyclic",
                            page.title, MAX_REDIRECT_DEPTH)
                continue
            d.add(target, page.title)
        elif page.kind == "disambig":
            name = _DISAMBIG_SUFFIX.sub("", page.title)
            for t in page.targets:
                resolved = _resolve_redirect(t, redirects)
                if resolved:
                    d.add(resolved, name)
        else:
            log.warning("unknown page kind %r for %r", page.kind, page.title)
    return d


# -- query formulation -------------------------------------------------------


class ELStrategy(str, enum.Enum):
    MENTION_ONLY = "mention_only"
    VARIANTS = "variants"
    VARIANTS_PLUS_DOC_ENTITIES = "variants_plus_doc_entities"


def _has_tokens(text: str) -> bool:
    return bool(Term(text).tokens())


def _mention_query(mention: str) -> list[Query]:
    """Mention both as one phrase and as the conjunction of its tokens."""
    term = Term(mention)
    toks = term.tokens()
    if not toks:
        return []
    return [term, And(tuple(Term(t) for t in toks))]


def formulate_el_queries(mention: str, doc_entities: list[str], dictionary: VariantDictionary,
                         strategy: ELStrategy | str, body_field: str = "wiki_text") -> list[Query]:
    """Candidate-generation queries; their results are merged by per-node max score."""
    strategy = ELStrategy(strategy)
    if not mention:
        raise ValueError("mention must be non-empty")
    disjuncts = _mention_query(mention)
    if not disjuncts:
        raise ValueError(f"mention {mention!r} has no indexable tokens")
    if strategy in (ELStrategy.VARIANTS, ELStrategy.VARIANTS_PLUS_DOC_ENTITIES):
        for title in sorted(dictionary.titles_for(mention)):
            if title != mention and _has_tokens(title):
                disjuncts.append(Term(title))
    queries: list[Query] = [Or(tuple(disjuncts))]
    if strategy is ELStrategy.VARIANTS_PLUS_DOC_ENTITIES:
        ents = sorted({e for e in doc_entities if e != mention and _has_tokens(e)})
        if ents:
            queries.append(And((Term(mention), Or(tuple(Term(e, body_field) for e in ents)))))
    return queries


class UnknownSlotError(KeyError):
    def __str__(self):
        return f"unknown slot {self.args[0]!r}"


class SlotKeywordTable(dict):
    """slot name -> keyword phrases."""

    @classmethod
    def default(cls) -> "SlotKeywordTable":
        return cls(json_table("slot_keywords"))

    @classmethod
    def load(cls, path: Path) -> "SlotKeywordTable":
        return cls(json.loads(Path(path).read_text(encoding="utf-8")))

    def keywords(self, slot: str) -> list[str]:
        if slot not in self:
            raise UnknownSlotError(slot)
        kws = self[slot]
        if not kws:
            log.warning("slot %s has an empty keyword list", slot)
        return list(kws)


def formulate_sf_query(entity: str, slot: str, dictionary: VariantDictionary,
                       keywords: SlotKeywordTable) -> Query:
    """And(Or(entity, variants...), Or(keywords...)); the keyword part is dropped if empty."""
    kws = [k for k in keywords.keywords(slot) if _has_tokens(k)]
    names = [entity] + sorted(dictionary.variants_of(entity) - {entity})
    names = [n for n in names if _has_tokens(n)]
    if not names:
        raise ValueError(f"entity {entity!r} has no indexable tokens")
    entity_part = Or(tuple(Term(n) for n in names))
    if not kws:
        return entity_part
    return And((entity_part, Or(tuple(Term(k) for k in kws))))
