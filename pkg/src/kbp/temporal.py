"""Temporal bounding of slot fills.

Annotated documents carry events, timexes and TLinks (a TimeML subset).
Each TLink is decomposed into constraints between interval endpoints over
the point algebra {<, =}; the constraint graph is closed, and the closed
order bounds an anchor event by the calendar dates of timex endpoints.
"""

from __future__ import annotations

import calendar
import datetime as dt
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import dates
from .analysis import split_sentences, word_tokens
from .naive_bayes import NaiveBayesModel, classify_nb, train_nb
from .resources import stopwords

RELATIONS = ("BEFORE", "AFTER", "INCLUDES", "IS_INCLUDED", "SIMULTANEOUS",
             "BEGINS", "ENDS", "BEGUN_BY", "ENDED_BY")
INVERSE = {
    "BEFORE": "AFTER", "AFTER": "BEFORE", "INCLUDES": "IS_INCLUDED", "IS_INCLUDED": "INCLUDES",
    "SIMULTANEOUS": "SIMULTANEOUS", "BEGINS": "BEGUN_BY", "BEGUN_BY": "BEGINS",
    "ENDS": "ENDED_BY", "ENDED_BY": "ENDS",
}
SEASON_MONTHS = {"SP": (3, 5), "SU": (6, 8), "FA": (9, 11), "WI": (12, 2)}
EVENT_WINDOW = 3  # max sentence distance for event-event pairs

_VALUE = re.compile(r"^(\d{4})(?:-(\d{2})(?:-(\d{2}))?|-(SP|SU|FA|WI))?$")


# -- annotations ---------------------------------------------------------------------


def granularity(value: str) -> str:
    m = _VALUE.match(value)
    if not m:
        raise ValueError(f"unparseable timex value {value!r}")
    if m.group(4):
        return "season"
    if m.group(3):
        return "day"
    if m.group(2):
        return "month"
    return "year"


@dataclass(frozen=True)
class Timex:
    id: str
    value: str
    span: tuple[int, int] = (0, 0)
    text: str = ""
    doc_id: str = ""

    def __post_init__(self):
        resolve_timex_bounds(self.value)  # validates

    @property
    def granularity(self) -> str:
        return granularity(self.value)


@dataclass(frozen=True)
class TemporalEvent:
    id: str
    text: str
    span: tuple[int, int] = (0, 0)
    sentence_index: int = 0


@dataclass(frozen=True)
class TLink:
    source: str
    target: str
    relation: str

    def __post_init__(self):
        if self.source == self.target:
            raise ValueError("a TLink cannot relate an interval to itself")
        if self.relation not in INVERSE:
            raise ValueError(f"unknown TLink relation {self.relation!r}")

    def inverse(self) -> "TLink":
        return TLink(self.target, self.source, INVERSE[self.relation])


@dataclass
class AnnotatedDocument:
    doc_id: str
    text: str
    dct: dt.date | None = None
    events: list[TemporalEvent] = field(default_factory=list)
    timexes: list[Timex] = field(default_factory=list)
    tlinks: list[TLink] = field(default_factory=list)

    def __post_init__(self):
        self.sentence_spans = split_sentences(self.text)
        n = len(self.text)
        for x in [*self.events, *self.timexes]:
            if not 0 <= x.span[0] <= x.span[1] <= n:
                raise ValueError(f"span of {x.id} outside the document")

    def sentence_of(self, offset: int) -> int:
        for i, (s, e) in enumerate(self.sentence_spans):
            if offset < e:
                return i
        return max(len(self.sentence_spans) - 1, 0)

    @classmethod
    def from_json(cls, obj: dict) -> "AnnotatedDocument":
        text = obj["text"]
        dct = dt.date.fromisoformat(obj["dct"]) if obj.get("dct") else None
        timexes = [Timex(t["id"], t["value"], tuple(t.get("span", (0, 0))), t.get("text", ""), obj["doc_id"])
                   for t in obj.get("timexes", [])]
        spans = split_sentences(text)

        def sentence(offset):
            return next((i for i, (_, e) in enumerate(spans) if offset < e), max(len(spans) - 1, 0))

        events = [TemporalEvent(e["id"], e["text"], tuple(e.get("span", (0, 0))),
                                e.get("sentence_index", sentence(e.get("span", (0, 0))[0])))
                  for e in obj.get("events", [])]
        tlinks = [TLink(t["source"], t["target"], t["relation"]) for t in obj.get("tlinks", [])]
        return cls(obj["doc_id"], text, dct, events, timexes, tlinks)

    def to_json(self) -> dict:
        return {
            "doc_id": self.doc_id, "text": self.text,
            "dct": self.dct.isoformat() if self.dct else None,
            "events": [{"id": e.id, "text": e.text, "span": list(e.span), "sentence_index": e.sentence_index}
                       for e in self.events],
            "timexes": [{"id": t.id, "value": t.value, "span": list(t.span), "text": t.text}
                        for t in self.timexes],
            "tlinks": [{"source": l.source, "target": l.target, "relation": l.relation} for l in self.tlinks],
        }


def load_annotated(path: Path) -> AnnotatedDocument:
    return AnnotatedDocument.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


# -- timex recognition and calendar bounds -------------------------------------------------


def _shift_month(year: int, month: int, delta: int) -> tuple[int, int]:
    k = year * 12 + (month - 1) + delta
    return k // 12, k % 12 + 1


def _relative_value(word: str, dct: dt.date) -> str:
    w = " ".join(word.lower().split())
    if w == "today":
        return dct.isoformat()
    if w == "yesterday":
        return (dct - dt.timedelta(days=1)).isoformat()
    if w == "tomorrow":
        return (dct + dt.timedelta(days=1)).isoformat()
    step = -1 if w.startswith("last") else 1
    if w.endswith("month"):
        y, m = _shift_month(dct.year, dct.month, step)
        return f"{y:04d}-{m:02d}"
    return f"{dct.year + step:04d}"


_RELATIVE = re.compile(r"\b(?:today|yesterday|tomorrow|(?:last|next)\s+(?:month|year))\b", re.IGNORECASE)


def _absolute_value(kind: str, m: re.Match) -> str | None:
    if kind == "iso":
        d = dates.safe_date(*m.groups())
        return d.isoformat() if d else None
    if kind == "mdy":
        d = dates.safe_date(m.group(3), dates.month_number(m.group(1)), m.group(2))
        return d.isoformat() if d else None
    if kind == "dmy":
        d = dates.safe_date(m.group(3), dates.month_number(m.group(2)), m.group(1))
        return d.isoformat() if d else None
    if kind == "season":
        return f"{m.group(2)}-{dates.SEASONS[m.group(1).lower()]}"
    if kind == "month_year":
        return f"{m.group(2)}-{dates.month_number(m.group(1)):02d}"
    if kind == "iso_month":
        return m.group(0) if 1 <= int(m.group(2)) <= 12 else None
    return m.group(1)  # year


def recognize_timexes(text: str, dct: dt.date | None = None, doc_id: str = "",
                      prefix: str = "t") -> list[Timex]:
    """Calendar expressions in ``text``; relative ones need ``dct`` and are skipped without it."""
    patterns = (
        (dates.ISO_DAY, "iso"), (dates.MONTH_DAY_YEAR, "mdy"), (dates.DAY_MONTH_YEAR, "dmy"),
        (dates.SEASON_YEAR, "season"), (dates.MONTH_YEAR, "month_year"), (dates.ISO_MONTH, "iso_month"),
        (dates.YEAR, "year"), (_RELATIVE, "relative"),
    )
    found: list[tuple[int, int, str]] = []
    for pattern, kind in patterns:
        for m in pattern.finditer(text):
            if any(s < m.end() and e > m.start() for s, e, _ in found):
                continue
            if kind == "relative":
                value = _relative_value(m.group(0), dct) if dct else None
            else:
                value = _absolute_value(kind, m)
            if value:
                found.append((m.start(), m.end(), value))
    found.sort()
    return [Timex(f"{prefix}{i + 1}", v, (s, e), text[s:e], doc_id) for i, (s, e, v) in enumerate(found)]


def resolve_timex_bounds(t: Timex | str) -> tuple[dt.date, dt.date]:
    """First and last calendar day covered by a timex value."""
    value = t.value if isinstance(t, Timex) else t
    m = _VALUE.match(value)
    if not m:
        raise ValueError(f"unparseable timex value {value!r}")
    year, month, day, season = m.groups()
    y = int(year)
    if season:
        first, last = SEASON_MONTHS[season]
        end_year = y + 1 if last < first else y
        return dt.date(y, first, 1), dt.date(end_year, last, calendar.monthrange(end_year, last)[1])
    if day:
        d = dates.safe_date(y, month, day)
        if d is None:
            raise ValueError(f"invalid day {value!r}")
        return d, d
    if month:
        mo = int(month)
        if not 1 <= mo <= 12:
            raise ValueError(f"invalid month {value!r}")
        return dt.date(y, mo, 1), dt.date(y, mo, calendar.monthrange(y, mo)[1])
    return dt.date(y, 1, 1), dt.date(y, 12, 31)


# -- point algebra ----------------------------------------------------------------------------

Point = tuple[str, str]  # (interval id, "start" | "end")


def start(x: str) -> Point:
    return (x, "start")


def end(x: str) -> Point:
    return (x, "end")


@dataclass(frozen=True)
class PointOrder:
    """Endpoint constraints. ``equal`` pairs are stored sorted; ``closed`` marks a closure."""

    nodes: frozenset[Point]
    less: frozenset[tuple[Point, Point]]
    equal: frozenset[tuple[Point, Point]] = frozenset()
    closed: bool = False

    def relation(self, a: Point, b: Point) -> str | None:
        """``"<"``, ``">"``, ``"="`` or None (unknown), read from the stored edges."""
        if a == b or (min(a, b), max(a, b)) in self.equal:
            return "="
        if (a, b) in self.less:
            return "<"
        if (b, a) in self.less:
            return ">"
        return None

    def intervals(self) -> set[str]:
        return {x for x, _ in self.nodes}


class _Inconsistent:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INCONSISTENT"

    def __bool__(self) -> bool:
        return False


INCONSISTENT = _Inconsistent()


def _eq(a: Point, b: Point) -> tuple[Point, Point]:
    return (min(a, b), max(a, b))


def relation_constraints(a: str, relation: str, b: str) -> tuple[list, list]:
    """``(less, equal)`` endpoint pairs for ``a relation b``."""
    if relation not in INVERSE:
        raise ValueError(f"unknown TLink relation {relation!r}")
    if relation in ("AFTER", "IS_INCLUDED", "BEGUN_BY", "ENDED_BY"):
        return relation_constraints(b, INVERSE[relation], a)
    if relation == "BEFORE":
        return [(end(a), start(b))], []
    if relation == "INCLUDES":
        return [(start(a), start(b)), (end(b), end(a))], []
    if relation == "SIMULTANEOUS":
        return [], [_eq(start(a), start(b)), _eq(end(a), end(b))]
    if relation == "BEGINS":
        return [(end(a), end(b))], [_eq(start(a), start(b))]
    return [(start(b), start(a))], [_eq(end(a), end(b))]  # ENDS


def _ids(items: Iterable) -> list[str]:
    return [x if isinstance(x, str) else x.id for x in items]


def decompose(events: Iterable, timexes: Iterable, tlinks: Iterable[TLink]) -> PointOrder:
    """Endpoint graph; every interval also gets ``start < end``."""
    ids = set(_ids(events)) | set(_ids(timexes))
    less, equal = set(), set()
    for x in ids:
        less.add((start(x), end(x)))
    for link in tlinks:
        for x in (link.source, link.target):
            if x not in ids:
                raise ValueError(f"TLink endpoint {x!r} is not a known event or timex")
        lt, eq = relation_constraints(link.source, link.relation, link.target)
        less.update(lt)
        equal.update(eq)
    nodes = frozenset(p for x in ids for p in (start(x), end(x)))
    return PointOrder(nodes, frozenset(less), frozenset(equal))


def _classes(po: PointOrder) -> dict[Point, Point]:
    parent = {n: n for n in po.nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in po.equal:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    return {n: find(n) for n in po.nodes}


def close(po: PointOrder) -> PointOrder | _Inconsistent:
    """Transitive closure, or INCONSISTENT when some point must precede itself."""
    rep = _classes(po)
    reps = sorted(set(rep.values()))
    index = {r: i for i, r in enumerate(reps)}
    succ: list[set[int]] = [set() for _ in reps]
    for a, b in po.less:
        ia, ib = index[rep[a]], index[rep[b]]
        if ia == ib:
            return INCONSISTENT
        succ[ia].add(ib)
    # Kahn ordering; leftover classes lie on a strict cycle.
    indeg = [0] * len(reps)
    for s in succ:
        for j in s:
            indeg[j] += 1
    order, queue = [], [i for i, d in enumerate(indeg) if d == 0]
    while queue:
        i = queue.pop()
        order.append(i)
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                queue.append(j)
    if len(order) != len(reps):
        return INCONSISTENT
    reach = [0] * len(reps)  # bitset of strictly later classes
    for i in reversed(order):
        bits = 0
        for j in succ[i]:
            bits |= (1 << j) | reach[j]
        reach[i] = bits
    members: dict[int, list[Point]] = {}
    for n, r in rep.items():
        members.setdefault(index[r], []).append(n)
    less = set()
    for i in range(len(reps)):
        bits, j = reach[i], 0
        while bits:
            if bits & 1:
                less.update((a, b) for a in members[i] for b in members[j])
            bits >>= 1
            j += 1
    equal = {_eq(a, b) for ms in members.values() for a in ms for b in ms if a < b}
    return PointOrder(po.nodes, frozenset(less), frozenset(equal), closed=True)


def isolate_subgraphs(po: PointOrder) -> list[PointOrder]:
    """Weakly connected components, ordered by their smallest point."""
    parent = {n: n for n in po.nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in [*po.less, *po.equal]:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict[Point, set[Point]] = {}
    for n in po.nodes:
        groups.setdefault(find(n), set()).add(n)
    out = []
    for root in sorted(groups):
        g = groups[root]
        out.append(PointOrder(
            frozenset(g),
            frozenset(e for e in po.less if e[0] in g),
            frozenset(e for e in po.equal if e[0] in g),
            po.closed,
        ))
    return out


def component_of(po: PointOrder, interval: str) -> PointOrder:
    for comp in isolate_subgraphs(po):
        if start(interval) in comp.nodes:
            return comp
    raise KeyError(f"interval {interval!r} not in graph")


# -- bounds ---------------------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundQuadruple:
    t1: dt.date | None = None
    t2: dt.date | None = None
    t3: dt.date | None = None
    t4: dt.date | None = None

    def as_tuple(self) -> tuple:
        return (self.t1, self.t2, self.t3, self.t4)

    def violations(self) -> list[str]:
        out = []
        for a, b in (("t1", "t2"), ("t3", "t4"), ("t1", "t4")):
            x, y = getattr(self, a), getattr(self, b)
            if x is not None and y is not None and x > y:
                out.append(f"{a} > {b}")
        return out

    def cells(self) -> list[str]:
        return [d.isoformat() if d else "" for d in self.as_tuple()]


def point_dates(timexes: Iterable[Timex]) -> dict[Point, dt.date]:
    """Each timex's start point carries its first day, its end point its last day."""
    out = {}
    for t in timexes:
        first, last = resolve_timex_bounds(t)
        out[start(t.id)] = first
        out[end(t.id)] = last
    return out


def bound_event(po: PointOrder, anchor: str, timexes: Iterable[Timex]) -> BoundQuadruple:
    """T1..T4: latest/earliest timex dates before/after the anchor's start and end.

    A timex point equal to an anchor point counts on both sides.
    """
    if start(anchor) not in po.nodes:
        raise KeyError(f"anchor {anchor!r} not in graph")
    if not po.closed:
        closed = close(po)
        if closed is INCONSISTENT:
            raise ValueError("inconsistent temporal graph")
        po = closed
    known = point_dates(timexes)

    def around(p: Point) -> tuple[dt.date | None, dt.date | None]:
        before = [d for q, d in known.items() if q in po.nodes and po.relation(q, p) in ("<", "=")]
        after = [d for q, d in known.items() if q in po.nodes and po.relation(q, p) in (">", "=")]
        return (max(before) if before else None, min(after) if after else None)

    t1, t2 = around(start(anchor))
    t3, t4 = around(end(anchor))
    return BoundQuadruple(t1, t2, t3, t4)


def timex_quadruple(t: Timex) -> BoundQuadruple:
    """Bounds when the filler resolves to a timex rather than an event."""
    first, last = resolve_timex_bounds(t)
    return BoundQuadruple(first, last, first, last)


# -- event selection ----------------------------------------------------------------------------


@dataclass(frozen=True)
class Selection:
    kind: str  # "event" | "timex" | "not_found"
    id: str | None = None
    step: int = 5


NOT_FOUND = Selection("not_found")

_PUNCT = re.compile(r"[^\w\s]")


def simplify(text: str) -> list[str]:
    """Lowercase word tokens with punctuation and stopwords removed."""
    sw = stopwords()
    return [w for w in _PUNCT.sub(" ", text.lower()).split() if w not in sw]


class _TokenMap:
    def __init__(self, text: str):
        self.tokens = [t for t in word_tokens(text) if t.is_word]

    def range(self, span: tuple[int, int]) -> tuple[int, int]:
        idx = [i for i, t in enumerate(self.tokens) if t.start < span[1] and t.end > span[0]]
        if not idx:  # empty or punctuation-only span: position of the next token
            k = next((i for i, t in enumerate(self.tokens) if t.start >= span[0]), len(self.tokens))
            return k, k
        return idx[0], idx[-1] + 1

    def distance(self, a: tuple[int, int], b: tuple[int, int]) -> int:
        (i, j), (k, l) = self.range(a), self.range(b)
        return max(0, k - j, i - l)


def _nearest(tm: _TokenMap, items: Sequence, spans: Sequence[tuple[int, int]]):
    """Item closest in tokens to any span; ties go to the earlier item."""
    best = None
    for item in sorted(items, key=lambda x: x.span):
        d = min(tm.distance(item.span, s) for s in spans)
        if best is None or d < best[0]:
            best = (d, item)
    return best[1] if best else None


def _occurrences(text: str, filler: str) -> list[tuple[int, int]]:
    if not filler.strip():
        return []
    return [(m.start(), m.end()) for m in re.finditer(re.escape(filler), text, re.IGNORECASE)]


def _simplified_occurrences(text: str, filler: str, tm: _TokenMap) -> list[tuple[int, int]]:
    target = simplify(filler)
    if not target:
        return []
    sw = stopwords()
    stream = [(t, _PUNCT.sub("", t.text.lower())) for t in tm.tokens]
    stream = [(t, w) for t, w in stream if w and w not in sw]
    out = []
    for i in range(len(stream) - len(target) + 1):
        if [w for _, w in stream[i:i + len(target)]] == target:
            out.append((stream[i][0].start, stream[i + len(target) - 1][0].end))
    return out


def select_event(doc: AnnotatedDocument, filler: str) -> Selection:
    """Five-step cascade from exact event text down to giving up."""
    key = filler.strip().lower()
    for e in sorted(doc.events, key=lambda e: e.span):
        if key and e.text.strip().lower() == key:
            return Selection("event", e.id, 1)
    tm = _TokenMap(doc.text)
    occ = _occurrences(doc.text, filler)
    by_sentence: dict[int, list[tuple[int, int]]] = {}
    for span in occ:
        by_sentence.setdefault(doc.sentence_of(span[0]), []).append(span)
    same = [(min(tm.distance(e.span, s) for s in by_sentence[e.sentence_index]), e.span, e)
            for e in doc.events if e.sentence_index in by_sentence]
    if same:
        return Selection("event", min(same, key=lambda c: c[:2])[2].id, 2)
    simple = _simplified_occurrences(doc.text, filler, tm)
    mentions = occ + simple
    if simple and doc.events:
        return Selection("event", _nearest(tm, doc.events, simple).id, 3)
    if mentions and doc.timexes:
        return Selection("timex", _nearest(tm, doc.timexes, mentions).id, 4)
    return NOT_FOUND


# -- link candidates and labelling ----------------------------------------------------------------

_CLAUSE_BREAK = re.compile(r"[,;:()\u2014]|\bbut\b|\band\b|\bwhile\b", re.IGNORECASE)


@dataclass(frozen=True)
class LinkCandidate:
    source: str
    target: str
    link_class: str  # "event-timex" | "event-event"


def link_candidates(doc: AnnotatedDocument) -> list[LinkCandidate]:
    """Event-timex pairs sharing a sentence, event-event pairs at most three sentences apart."""
    out = []
    events = sorted(doc.events, key=lambda e: e.span)
    for e in events:
        for t in sorted(doc.timexes, key=lambda t: t.span):
            if doc.sentence_of(t.span[0]) == e.sentence_index:
                out.append(LinkCandidate(e.id, t.id, "event-timex"))
    for i, a in enumerate(events):
        for b in events[i + 1:]:
            if abs(a.sentence_index - b.sentence_index) <= EVENT_WINDOW:
                out.append(LinkCandidate(a.id, b.id, "event-event"))
    return out


def _items(doc: AnnotatedDocument) -> dict:
    return {x.id: x for x in [*doc.events, *doc.timexes]}


def heuristic_relation(doc: AnnotatedDocument, cand: LinkCandidate) -> str:
    """Fallback labels: event-timex by clause and order, event-event by narrative order."""
    items = _items(doc)
    a, b = items[cand.source], items[cand.target]
    if cand.link_class == "event-event":
        return "BEFORE" if a.span <= b.span else "AFTER"
    lo, hi = sorted([a.span, b.span])
    if not _CLAUSE_BREAK.search(doc.text[lo[1]:hi[0]]):
        return "IS_INCLUDED"
    return "BEFORE" if b.span[0] >= a.span[1] else "AFTER"


def _tense(word: str) -> str:
    w = word.lower()
    for suffix in ("ed", "ing", "s"):
        if w.endswith(suffix):
            return suffix
    return "none"


def pair_features(doc: AnnotatedDocument, cand: LinkCandidate) -> list[str]:
    """Surface features of a candidate pair for the relation classifier."""
    items = _items(doc)
    a, b = items[cand.source], items[cand.target]
    a_text = a.text or doc.text[a.span[0]:a.span[1]]
    b_text = b.text or doc.text[b.span[0]:b.span[1]]
    sa, sb = doc.sentence_of(a.span[0]), doc.sentence_of(b.span[0])
    lo, hi = sorted([a.span, b.span])
    return [
        f"class={cand.link_class}",
        f"src={a_text.lower()}",
        f"tgt={b_text.lower()}",
        f"order={'src_first' if a.span <= b.span else 'tgt_first'}",
        f"sent_dist={min(abs(sa - sb), EVENT_WINDOW)}",
        f"src_tense={_tense(a_text.split()[-1]) if a_text.split() else 'none'}",
        f"tgt_tense={_tense(b_text.split()[-1]) if b_text.split() else 'none'}",
        f"clause_break={int(bool(_CLAUSE_BREAK.search(doc.text[lo[1]:hi[0]])))}",
    ]


def train_relation_classifier(docs: Iterable[AnnotatedDocument]) -> NaiveBayesModel:
    """Fit on the gold TLinks of annotated documents, restricted to candidate pairs."""
    data = []
    for doc in docs:
        gold = {}
        for link in doc.tlinks:
            gold[(link.source, link.target)] = link.relation
            gold[(link.target, link.source)] = INVERSE[link.relation]
        for cand in link_candidates(doc):
            rel = gold.get((cand.source, cand.target))
            if rel is not None:
                data.append((pair_features(doc, cand), rel))
    return train_nb(data)


def label_links(doc: AnnotatedDocument, model: NaiveBayesModel | None = None) -> list[TLink]:
    out = []
    for cand in link_candidates(doc):
        if model is None:
            rel = heuristic_relation(doc, cand)
        else:
            rel = classify_nb(model, pair_features(doc, cand))[0]
        out.append(TLink(cand.source, cand.target, rel))
    return out


# -- pipeline -------------------------------------------------------------------------------------


@dataclass(frozen=True)
class TemporalAnswer:
    selection: Selection
    bounds: BoundQuadruple
    consistent: bool = True


def temporal_bounds(doc: AnnotatedDocument, filler: str, model: NaiveBayesModel | None = None,
                    use_gold_links: bool = True) -> TemporalAnswer:
    """Select the filler's event, close its component and bound it.

    Gold TLinks are used when present (and allowed); otherwise links are
    labelled by ``model`` or the heuristic. Inconsistent graphs give blanks.
    """
    sel = select_event(doc, filler)
    if sel.kind == "timex":
        t = next(t for t in doc.timexes if t.id == sel.id)
        return TemporalAnswer(sel, timex_quadruple(t))
    if sel.kind != "event":
        return TemporalAnswer(sel, BoundQuadruple())
    links = doc.tlinks if (use_gold_links and doc.tlinks) else label_links(doc, model)
    po = decompose(doc.events, doc.timexes, links)
    closed = close(component_of(po, sel.id))
    if closed is INCONSISTENT:
        return TemporalAnswer(sel, BoundQuadruple(), consistent=False)
    return TemporalAnswer(sel, bound_event(closed, sel.id, doc.timexes))
