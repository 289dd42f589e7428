"""Inverted index with classic TF-IDF scoring, document and two-stage passage search.

Scoring, for a query ``q`` and retrieval unit ``d``::

    score(q, d) = coord(q, d) * sum(sqrt(tf(t, d)) * idf(t) ** 2 for matched leaves t)
    idf(t)      = 1 + ln(N / (df(t) + 1))
    coord(q, d) = matched leaves / all leaves

A leaf only counts as matched if every ``And`` above it is satisfied. Phrase
leaves behave as pseudo-terms: ``tf`` is the phrase occurrence count and
``df`` the number of units containing the phrase.
"""

from __future__ import annotations

import json
import math
import struct
from collections import defaultdict
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Hashable, Iterable

from .analysis import index_tokens
from .corpus import Corpus, Document
from .query import And, Or, Query, Term, leaves

# Scores are rounded to this many decimals for ordering only, so that
# mathematically equal scores tie regardless of float summation noise.
SORT_DECIMALS = 9


@dataclass(frozen=True)
class RetrievalConfig:
    top_n_documents: int = 20
    top_n_passages: int = 20
    remove_stopwords: bool = True

    def __post_init__(self):
        if self.top_n_documents < 1 or self.top_n_passages < 1:
            raise ValueError("top_n values must be >= 1")


@dataclass(frozen=True)
class Passage:
    """Location of one field element of a document (text is not copied)."""

    doc_id: str
    field_index: int
    field_name: str
    span: tuple[int, int]

    def text(self, doc: Document) -> str:
        f = doc.fields[self.field_index]
        return f.text[self.span[0]:self.span[1]]


@dataclass(frozen=True)
class RankedHit:
    target: Any  # doc_id (str) or Passage
    score: float


@dataclass
class Posting:
    unit: int
    field: str
    tf: int
    positions: tuple[int, ...]


class InvertedIndex:
    """Postings over retrieval units (documents, or passages for a mini-index).

    ``unit_keys`` hold the tie-break sort key for each unit; for a document
    index the key is the ``doc_id``.
    """

    def __init__(self, config: RetrievalConfig):
        self.config = config
        self.unit_keys: list[Hashable] = []
        self.postings: dict[str, list[Posting]] = {}
        self.field_lengths: dict[tuple[Hashable, str], int] = {}
        self.documents: dict[str, Document] = {}

    @property
    def doc_count(self) -> int:
        return len(self.unit_keys)

    def document_frequency(self, term: str, field: str | None = None) -> int:
        units = {p.unit for p in self.postings.get(term, ()) if field is None or p.field == field}
        return len(units)

    def _add_unit(self, key: Hashable, fields: Iterable[tuple[str, str]]) -> None:
        unit = len(self.unit_keys)
        self.unit_keys.append(key)
        per_field: dict[str, dict[str, list[int]]] = defaultdict(lambda: defaultdict(list))
        next_pos: dict[str, int] = defaultdict(int)
        for name, text in fields:
            toks = index_tokens(text, self.config.remove_stopwords)
            base = next_pos[name]
            for i, tok in enumerate(toks):
                per_field[name][tok].append(base + i)
            # A one-position gap keeps phrases from spanning two elements.
            next_pos[name] = base + len(toks) + 1
            self.field_lengths[(key, name)] = self.field_lengths.get((key, name), 0) + len(toks)
        for name in sorted(per_field):
            for tok, pos in per_field[name].items():
                self.postings.setdefault(tok, []).append(Posting(unit, name, len(pos), tuple(pos)))

    # -- leaf statistics ---------------------------------------------------

    def leaf_frequencies(self, term: Term) -> dict[int, int]:
        """Map unit -> occurrence count of ``term`` (restricted to its field)."""
        toks = term.tokens(self.config.remove_stopwords)
        if not toks:
            return {}
        if len(toks) == 1:
            out: dict[int, int] = defaultdict(int)
            for p in self.postings.get(toks[0], ()):
                if term.field is None or p.field == term.field:
                    out[p.unit] += p.tf
            return dict(out)
        return self._phrase_frequencies(toks, term.field)

    def _phrase_frequencies(self, toks: tuple[str, ...], field: str | None) -> dict[int, int]:
        lists = []
        for tok in toks:
            by_key = {}
            for p in self.postings.get(tok, ()):
                if field is None or p.field == field:
                    by_key[(p.unit, p.field)] = p.positions
            if not by_key:
                return {}
            lists.append(by_key)
        out: dict[int, int] = defaultdict(int)
        for key, first in lists[0].items():
            if not all(key in other for other in lists[1:]):
                continue
            rest = [set(other[key]) for other in lists[1:]]
            n = sum(1 for p in first if all(p + i + 1 in s for i, s in enumerate(rest)))
            if n:
                out[key[0]] += n
        return dict(out)


def _idf(df: int, n: int) -> float:
    return 1.0 + math.log(n / (df + 1))


def score_units(index: InvertedIndex, query: Query) -> dict[int, float]:
    """Score every unit that satisfies ``query``; non-matching units are absent."""
    leaf_list = list(leaves(query))
    stats = []
    for leaf in leaf_list:
        freqs = index.leaf_frequencies(leaf)
        stats.append((freqs, _idf(len(freqs), index.doc_count) if freqs else 0.0))
    candidates = set()
    for freqs, _ in stats:
        candidates.update(freqs)
    n_leaves = len(leaf_list)
    scores = {}
    for unit in candidates:
        counter = iter(range(n_leaves))
        matched, contrib = _evaluate(query, unit, stats, counter)
        if not matched:
            continue
        total = 0.0
        n_matched = 0
        for i in sorted(contrib):
            freqs, idf = stats[i]
            total += math.sqrt(freqs[unit]) * idf * idf
            n_matched += 1
        scores[unit] = (n_matched / n_leaves) * total
    return scores


def _evaluate(node: Query, unit: int, stats, counter) -> tuple[bool, list[int]]:
    """Return (matched, indices of contributing leaves) for ``node`` on ``unit``."""
    if isinstance(node, Term):
        i = next(counter)
        return (unit in stats[i][0]), ([i] if unit in stats[i][0] else [])
    results = [_evaluate(c, unit, stats, counter) for c in node.children]
    if isinstance(node, And):
        if all(m for m, _ in results):
            return True, [i for _, c in results for i in c]
        return False, []
    assert isinstance(node, Or)
    hits = [i for m, c in results if m for i in c]
    return bool(hits), hits


def _ranked(index: InvertedIndex, scores: dict[int, float], k: int) -> list[tuple[int, float]]:
    order = sorted(scores.items(), key=lambda kv: (-round(kv[1], SORT_DECIMALS), index.unit_keys[kv[0]]))
    return order[:k]


def build_index(corpus: Corpus, config: RetrievalConfig = RetrievalConfig(),
                fields: Iterable[str] | None = None) -> InvertedIndex:
    """Index every document; ``fields`` restricts which field names are indexed."""
    if len(corpus) == 0:
        raise ValueError("cannot index an empty corpus")
    keep = set(fields) if fields is not None else None
    index = InvertedIndex(config)
    for doc in corpus:
        index.documents[doc.doc_id] = doc
        index._add_unit(doc.doc_id, [(f.name, f.text) for f in doc.fields
                                     if keep is None or f.name in keep])
    return index


def search_documents(index: InvertedIndex, query: Query, k: int) -> list[RankedHit]:
    if k < 1:
        raise ValueError("k must be >= 1")
    scores = score_units(index, query)
    return [RankedHit(index.unit_keys[u], s) for u, s in _ranked(index, scores, k)]


def split_passages(doc: Document) -> list[Passage]:
    return [Passage(doc.doc_id, i, f.name, (0, len(f.text))) for i, f in enumerate(doc.fields)]


def search_passages(index: InvertedIndex, query: Query,
                    config: RetrievalConfig | None = None) -> list[RankedHit]:
    """Two-stage retrieval: top documents, then a private mini-index over their passages."""
    config = config or index.config
    docs = search_documents(index, query, config.top_n_documents)
    mini = passage_index([index.documents[h.target] for h in docs], config)
    scores = score_units(mini, query)
    return [RankedHit(mini.passages[u], s) for u, s in _ranked(mini, scores, config.top_n_passages)]


class _PassageIndex(InvertedIndex):
    def __init__(self, config):
        super().__init__(config)
        self.passages: list[Passage] = []


def passage_index(docs: Iterable[Document], config: RetrievalConfig) -> _PassageIndex:
    mini = _PassageIndex(config)
    for doc in docs:
        for p in split_passages(doc):
            mini.passages.append(p)
            mini._add_unit((p.doc_id, p.span[0], p.field_index), [(p.field_name, p.text(doc))])
    return mini


# -- persistence -----------------------------------------------------------

_U32 = struct.Struct("<I")


def save_index(index: InvertedIndex, out_dir: Path) -> None:
    """Write ``meta.json``, ``postings.bin`` and ``docs.jsonl`` deterministically."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    field_names = sorted({p.field for plist in index.postings.values() for p in plist})
    field_id = {name: i for i, name in enumerate(field_names)}
    meta = {
        "format": 1,
        "doc_count": index.doc_count,
        "config": asdict(index.config),
        "fields": field_names,
    }
    (out_dir / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    buf = bytearray()
    for term in sorted(index.postings):
        raw = term.encode("utf-8")
        plist = sorted(index.postings[term], key=lambda p: (p.unit, p.field))
        buf += _U32.pack(len(raw)) + raw + _U32.pack(len(plist))
        for p in plist:
            buf += struct.pack("<III", p.unit, field_id[p.field], p.tf)
            buf += struct.pack(f"<{len(p.positions)}I", *p.positions)
    (out_dir / "postings.bin").write_bytes(bytes(buf))
    with open(out_dir / "docs.jsonl", "w", encoding="utf-8") as fh:
        for key in index.unit_keys:
            rec = index.documents[key].to_json()
            rec["field_lengths"] = {
                name: index.field_lengths[(key, name)]
                for name in dict.fromkeys(f[0] for f in rec["fields"])
                if (key, name) in index.field_lengths
            }
            fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")


def load_index(in_dir: Path) -> InvertedIndex:
    in_dir = Path(in_dir)
    meta = json.loads((in_dir / "meta.json").read_text(encoding="utf-8"))
    index = InvertedIndex(RetrievalConfig(**meta["config"]))
    with open(in_dir / "docs.jsonl", encoding="utf-8") as fh:
        for line in fh:
            rec = json.loads(line)
            doc = Document.from_json(rec)
            index.documents[doc.doc_id] = doc
            index.unit_keys.append(doc.doc_id)
            for name, n in rec["field_lengths"].items():
                index.field_lengths[(doc.doc_id, name)] = n
    if index.doc_count != meta["doc_count"]:
        raise ValueError("docs.jsonl does not match meta.json doc_count")
    data = (in_dir / "postings.bin").read_bytes()
    fields = meta["fields"]
    off = 0
    while off < len(data):
        (n,) = _U32.unpack_from(data, off)
        off += 4
        term = data[off:off + n].decode("utf-8")
        off += n
        (count,) = _U32.unpack_from(data, off)
        off += 4
        plist = []
        for _ in range(count):
            unit, fid, tf = struct.unpack_from("<III", data, off)
            off += 12
            positions = struct.unpack_from(f"<{tf}I", data, off)
            off += 4 * tf
            plist.append(Posting(unit, fields[fid], tf, tuple(positions)))
        index.postings[term] = plist
    return index
