"""Entity linking: candidate generation, NIL prediction, selection and NIL clustering."""

from __future__ import annotations

import enum
import json
import logging
import math
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import Corpus
from .index import InvertedIndex, search_documents
from .tagger import Tagger, tag_entities
from .variants import ELStrategy, VariantDictionary, formulate_el_queries

log = logging.getLogger(__name__)

NIL = "NIL"
KB_FIELDS = ("title", "wiki_text")
CONTEXT_TYPES = frozenset({"PER", "ORG", "LOC", "COUNTRY", "STATE", "CITY"})


@dataclass(frozen=True)
class ELQuery:
    query_id: str
    mention: str
    doc_id: str


def read_queries(path: Path) -> list[ELQuery]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                obj = json.loads(line)
                out.append(ELQuery(obj["query_id"], obj["mention"], obj.get("doc_id", "")))
    return out


@dataclass(frozen=True)
class CandidateList:
    query_id: str
    candidates: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        ids = [c for c, _ in self.candidates]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate node ids in candidate list")
        scores = [s for _, s in self.candidates]
        if any(a < b for a, b in zip(scores, scores[1:])):
            raise ValueError("candidate scores must be descending")

    @classmethod
    def ranked(cls, query_id: str, scores: dict[str, float], k: int | None = None) -> "CandidateList":
        """Sorted by score descending, then node id ascending."""
        order = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
        return cls(query_id, tuple(order[:k] if k is not None else order))

    def __len__(self) -> int:
        return len(self.candidates)


class NilStrategy(str, enum.Enum):
    TOP_SCORE = "top_score"
    SCORE_GAP = "score_gap"


@dataclass(frozen=True)
class NilPredictorConfig:
    strategy: NilStrategy = NilStrategy.TOP_SCORE
    alpha: float = 5.9
    beta: float = 0.16

    def __post_init__(self):
        object.__setattr__(self, "strategy", NilStrategy(self.strategy))
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValueError("alpha and beta must be finite")


@dataclass(frozen=True)
class LinkDecision:
    query_id: str
    link: str  # KB node id, or NIL
    cluster_id: str | None = None
    error: str | None = None

    def __post_init__(self):
        if (self.link == NIL) != (self.cluster_id is not None):
            raise ValueError("cluster_id must be set exactly when link is NIL")

    @property
    def label(self) -> str:
        """Output column: the node id, or the NIL cluster id."""
        return self.cluster_id if self.link == NIL else self.link


@dataclass(frozen=True)
class ClusterSet:
    clusters: tuple[frozenset[str], ...] = ()

    def __post_init__(self):
        seen: set[str] = set()
        for c in self.clusters:
            if not c or seen & c:
                raise ValueError("clusters must be non-empty and disjoint")
            seen |= c

    @classmethod
    def from_labels(cls, labels: dict[str, str]) -> "ClusterSet":
        groups: dict[str, set[str]] = {}
        for item, lab in labels.items():
            groups.setdefault(lab, set()).add(item)
        return cls(tuple(frozenset(g) for g in groups.values()))

    def items(self) -> set[str]:
        return set().union(*self.clusters) if self.clusters else set()

    def labels(self) -> dict[str, int]:
        return {item: i for i, c in enumerate(self.clusters) for item in c}


# -- candidate generation -------------------------------------------------------------


def generate_candidates(q: ELQuery, kb_index: InvertedIndex, dictionary: VariantDictionary,
                        strategy: ELStrategy | str = ELStrategy.VARIANTS, k: int = 10,
                        doc_entities: Sequence[str] = ()) -> CandidateList:
    """Run every formulated query against the KB and keep each node's best score."""
    best: dict[str, float] = {}
    for query in formulate_el_queries(q.mention, list(doc_entities), dictionary, strategy):
        for hit in search_documents(kb_index, query, k):
            if hit.score > best.get(hit.target, -math.inf):
                best[hit.target] = hit.score
    return CandidateList.ranked(q.query_id, best, k)


def document_entities(corpus: Corpus, doc_id: str, tagger: Tagger | None = None) -> list[str]:
    """Named-entity surfaces of the query document, used as context for strategy 3."""
    mentions = tag_entities(corpus[doc_id], tagger=tagger)
    return sorted({m.surface for m in mentions if m.etype in CONTEXT_TYPES})


# -- NIL prediction ----------------------------------------------------------------------


def predict_nil(c: CandidateList, cfg: NilPredictorConfig = NilPredictorConfig()) -> bool:
    """True when the query should be linked to NIL."""
    if not c.candidates:
        return True
    top = c.candidates[0][1]
    if cfg.strategy is NilStrategy.TOP_SCORE:
        return top < cfg.alpha
    gap = top - c.candidates[1][1] if len(c.candidates) > 1 else top
    return gap < cfg.beta


@dataclass(frozen=True)
class GaussianClass:
    prior: float
    mean: float
    var: float

    def log_density(self, x: float) -> float:
        return -0.5 * math.log(2 * math.pi * self.var) - (x - self.mean) ** 2 / (2 * self.var)


@dataclass(frozen=True)
class ThresholdModel:
    correct: GaussianClass
    incorrect: GaussianClass

    def posterior_correct(self, s: float) -> float:
        a = math.log(self.correct.prior) + self.correct.log_density(s)
        b = math.log(self.incorrect.prior) + self.incorrect.log_density(s)
        return 1.0 / (1.0 + math.exp(b - a)) if b - a < 700 else 0.0


def fit_threshold_model(training: Iterable[tuple[float, bool]], tied: bool = True) -> ThresholdModel:
    """Gaussian class-conditional densities with empirical priors.

    With ``tied`` the two classes share one pooled MLE variance, so the
    posterior is monotone in the score and crosses 0.5 exactly once.
    """
    data = list(training)
    pos = [float(s) for s, ok in data if ok]
    neg = [float(s) for s, ok in data if not ok]
    if not pos or not neg:
        raise ValueError("threshold learning needs both correct and incorrect examples")
    var_p, var_n = statistics.pvariance(pos), statistics.pvariance(neg)
    if tied:
        var_p = var_n = (var_p * len(pos) + var_n * len(neg)) / (len(pos) + len(neg))
    top = max(var_p, var_n)
    if top == 0.0:
        raise ValueError("all scores identical within each class; boundary undefined")
    floor = 1e-9 * top
    n = len(pos) + len(neg)
    return ThresholdModel(
        GaussianClass(len(pos) / n, statistics.fmean(pos), max(var_p, floor)),
        GaussianClass(len(neg) / n, statistics.fmean(neg), max(var_n, floor)),
    )


def learn_threshold(training: Iterable[tuple[float, bool]], tol: float = 1e-9, tied: bool = True) -> float:
    """Smallest score between the class means where P(correct | score) >= 0.5.

    Sorted training scores and their midpoints are scanned to bracket the
    crossing, which is then refined by bisection.
    """
    data = [(float(s), bool(ok)) for s, ok in training]
    model = fit_threshold_model(data, tied)
    lo_mean, hi_mean = model.incorrect.mean, model.correct.mean
    if not hi_mean > lo_mean:
        raise ValueError("correct scores must exceed incorrect scores on average; boundary undefined")
    post = model.posterior_correct
    scores = sorted({s for s, _ in data})
    grid = sorted({*scores, *((a + b) / 2 for a, b in zip(scores, scores[1:])), lo_mean, hi_mean})
    grid = [g for g in grid if lo_mean <= g <= hi_mean]
    if post(grid[0]) >= 0.5:
        return grid[0]
    prev = grid[0]
    for g in grid[1:]:
        if post(g) >= 0.5:
            lo, hi = prev, g
            while hi - lo > tol:
                mid = (lo + hi) / 2
                lo, hi = (lo, mid) if post(mid) >= 0.5 else (mid, hi)
            return hi
        prev = g
    raise ValueError("posterior never reaches 0.5 between the class means")


def select_candidate(c: CandidateList) -> str:
    """Top candidate; equal scores resolve to the smaller node id."""
    if not c.candidates:
        raise ValueError("empty candidate list; predict NIL first")
    top = c.candidates[0][1]
    return min(node for node, s in c.candidates if s == top)


# -- NIL clustering -----------------------------------------------------------------------


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def cluster_nils(nil_queries: Sequence[ELQuery], threshold: int = 0) -> ClusterSet:
    """Single-link clusters: an edge joins mentions within ``threshold`` edits.

    Clusters are ordered by their earliest query in the input.
    """
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    strings = sorted({q.mention for q in nil_queries})
    uf = _UnionFind(len(strings))
    for i in range(len(strings)):
        for j in range(i + 1, len(strings)):
            if abs(len(strings[i]) - len(strings[j])) <= threshold and \
                    levenshtein(strings[i], strings[j]) <= threshold:
                uf.union(i, j)
    slot = {s: uf.find(i) for i, s in enumerate(strings)}
    groups: dict[int, list[str]] = {}
    for q in nil_queries:
        groups.setdefault(slot[q.mention], []).append(q.query_id)
    return ClusterSet(tuple(frozenset(g) for g in groups.values()))


# -- pipeline --------------------------------------------------------------------------------


@dataclass
class LinkerConfig:
    strategy: ELStrategy = ELStrategy.VARIANTS
    top_k: int = 10
    nil: NilPredictorConfig = field(default_factory=NilPredictorConfig)
    cluster_threshold: int = 0


@dataclass
class Linker:
    kb_index: InvertedIndex
    dictionary: VariantDictionary
    source: Corpus | None = None  # query documents, needed for strategy 3
    config: LinkerConfig = field(default_factory=LinkerConfig)
    tagger: Tagger | None = None

    def candidates(self, q: ELQuery) -> CandidateList:
        strategy = ELStrategy(self.config.strategy)
        entities: list[str] = []
        if strategy is ELStrategy.VARIANTS_PLUS_DOC_ENTITIES:
            if self.source is None:
                raise ValueError("the document-entity strategy needs the source corpus")
            entities = document_entities(self.source, q.doc_id, self.tagger)
        elif self.source is not None and q.doc_id not in self.source:
            raise KeyError(f"query document {q.doc_id!r} not in corpus")
        return generate_candidates(q, self.kb_index, self.dictionary, strategy, self.config.top_k, entities)


def nil_cluster_name(n: int) -> str:
    return f"NIL{n:03d}"


def link_all(queries: Sequence[ELQuery], linker: Linker) -> list[LinkDecision]:
    """Link each query or mark it NIL; NIL queries are then clustered by mention."""
    links: dict[str, str] = {}
    errors: dict[str, str] = {}
    for q in queries:
        try:
            c = linker.candidates(q)
            links[q.query_id] = NIL if predict_nil(c, linker.config.nil) else select_candidate(c)
        except Exception as exc:  # a failed query is answered NIL and the batch continues
            log.warning("query %s failed: %s", q.query_id, exc)
            links[q.query_id] = NIL
            errors[q.query_id] = str(exc)
    nil_queries = [q for q in queries if links[q.query_id] == NIL]
    clusters = cluster_nils(nil_queries, linker.config.cluster_threshold)
    names = {qid: nil_cluster_name(i + 1) for i, c in enumerate(clusters.clusters) for qid in c}
    return [LinkDecision(q.query_id, links[q.query_id], names.get(q.query_id), errors.get(q.query_id))
            for q in queries]


def write_decisions_tsv(decisions: Iterable[LinkDecision], path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for d in decisions:
            fh.write(f"{d.query_id}\t{d.label}\n")


def read_link_tsv(path: Path) -> dict[str, str]:
    """``query_id -> label`` from a link TSV (system output or gold)."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.rstrip("\n").split("\t")
            if len(parts) >= 2 and parts[0]:
                out[parts[0]] = parts[1]
    return out
