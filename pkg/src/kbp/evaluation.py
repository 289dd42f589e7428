"""Scoring: clustering agreement, linking accuracy, retrieval coverage, temporal bounds."""

from __future__ import annotations

import datetime as dt
import json
from collections import Counter
from dataclasses import asdict, dataclass
from math import comb
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .linking import ClusterSet, LinkDecision
from .temporal import BoundQuadruple

NIL_PREFIX = "NIL"


def is_nil(label: str) -> bool:
    return label.startswith(NIL_PREFIX)


# -- clustering -------------------------------------------------------------------------


@dataclass(frozen=True)
class PairCounts:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


def pair_counts(system: ClusterSet, gold: ClusterSet) -> PairCounts:
    """Pair agreement from the contingency table of the two partitions."""
    items = system.items()
    if items != gold.items():
        raise ValueError("system and gold clusterings cover different items")
    s_lab, g_lab = system.labels(), gold.labels()
    joint = Counter((s_lab[i], g_lab[i]) for i in items)
    tp = sum(comb(k, 2) for k in joint.values())
    same_sys = sum(comb(len(c), 2) for c in system.clusters)
    same_gold = sum(comb(len(c), 2) for c in gold.clusters)
    fp, fn = same_sys - tp, same_gold - tp
    return PairCounts(tp, comb(len(items), 2) - tp - fp - fn, fp, fn)


def rand_index(system: ClusterSet, gold: ClusterSet) -> float:
    """Fraction of item pairs on which the clusterings agree; 1.0 below two items."""
    pc = pair_counts(system, gold)
    return 1.0 if pc.total == 0 else (pc.tp + pc.tn) / pc.total


# -- linking ----------------------------------------------------------------------------


def _labels(system: Iterable[LinkDecision] | Mapping[str, str]) -> dict[str, str]:
    if isinstance(system, Mapping):
        return dict(system)
    return {d.query_id: d.label for d in system}


def _link_correct(sys_label: str, gold_label: str) -> bool:
    return (is_nil(sys_label) and is_nil(gold_label)) or sys_label == gold_label


@dataclass(frozen=True)
class BCubed:
    precision: float
    recall: float
    f1: float


def bcubed_plus(system: Iterable[LinkDecision] | Mapping[str, str], gold: Mapping[str, str]) -> BCubed:
    """B-cubed+ over gold queries.

    Labels are KB node ids or NIL cluster ids, so queries sharing a label form
    one cluster. A pair counts when both queries share a system cluster and a
    gold cluster and both are correctly linked. Unanswered queries become
    singleton NIL clusters.
    """
    sys = _labels(system)
    if not gold:
        return BCubed(1.0, 1.0, 1.0)
    sys = {q: sys.get(q, f"{NIL_PREFIX}<missing:{q}>") for q in gold}
    by_sys: dict[str, list[str]] = {}
    by_gold: dict[str, list[str]] = {}
    for q in gold:
        by_sys.setdefault(sys[q], []).append(q)
        by_gold.setdefault(gold[q], []).append(q)
    ok = {q: _link_correct(sys[q], gold[q]) for q in gold}

    def agree(a: str, b: str) -> bool:
        return ok[a] and ok[b] and sys[a] == sys[b] and gold[a] == gold[b]

    p = sum(sum(agree(q, o) for o in by_sys[sys[q]]) / len(by_sys[sys[q]]) for q in gold) / len(gold)
    r = sum(sum(agree(q, o) for o in by_gold[gold[q]]) / len(by_gold[gold[q]]) for q in gold) / len(gold)
    f = 0.0 if p + r == 0 else 2 * p * r / (p + r)
    return BCubed(p, r, f)


def micro_average(system: Iterable[LinkDecision] | Mapping[str, str], gold: Mapping[str, str]) -> float:
    """Fraction of gold queries linked correctly; any NIL answer to a NIL query counts."""
    sys = _labels(system)
    if not gold:
        return 1.0
    return sum(q in sys and _link_correct(sys[q], g) for q, g in gold.items()) / len(gold)


# -- retrieval coverage -------------------------------------------------------------------


@dataclass(frozen=True)
class RetrievedItem:
    doc_id: str
    text: str


def _norm(s: str) -> str:
    return " ".join(s.split())


def answer_bearing(item: RetrievedItem, answers: Iterable[tuple[str, str]], mode: str) -> bool:
    """Strict needs the gold doc id and the answer string; lenient only the string."""
    text = _norm(item.text)
    for doc_id, answer in answers:
        if _norm(answer) and _norm(answer) in text and (mode == "lenient" or item.doc_id == doc_id):
            return True
    return False


def coverage_redundancy(runs: Mapping[str, Sequence[RetrievedItem]], gold: Mapping[str, set[tuple[str, str]]],
                        n: int, mode: str = "strict") -> tuple[float, float]:
    """(coverage, redundancy) at cutoff ``n`` over the gold questions."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if mode not in ("strict", "lenient"):
        raise ValueError(f"unknown mode {mode!r}")
    if not gold:
        return 0.0, 0.0
    counts = [sum(answer_bearing(it, gold[q], mode) for it in runs.get(q, ())[:n]) for q in gold]
    return sum(c > 0 for c in counts) / len(counts), sum(counts) / len(counts)


# -- temporal ----------------------------------------------------------------------------------


@dataclass(frozen=True)
class TemporalScoring:
    """Per-bound credit ``c / (c + |days off|)``; ``c = 365`` gives 1/(1 + years off)."""

    constant_days: float = 365.0
    both_blank: float = 1.0
    one_blank: float = 0.0


def temporal_score(system: BoundQuadruple, gold: BoundQuadruple,
                   scoring: TemporalScoring = TemporalScoring()) -> float:
    total = 0.0
    for s, g in zip(system.as_tuple(), gold.as_tuple()):
        if s is None and g is None:
            total += scoring.both_blank
        elif s is None or g is None:
            total += scoring.one_blank
        else:
            c = scoring.constant_days
            total += c / (c + abs((s - g).days))
    return total / 4


# -- file formats and reports -------------------------------------------------------------------


def read_tsv_rows(path: Path) -> list[list[str]]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line and not line.startswith("#"):
                rows.append(line.split("\t"))
    return rows


def read_link_labels(path: Path) -> dict[str, str]:
    return {r[0]: r[1] for r in read_tsv_rows(path) if len(r) >= 2}


def read_slot_gold(path: Path) -> dict[str, set[tuple[str, str]]]:
    """Gold answers ``question<TAB>doc_id<TAB>answer`` grouped by question."""
    out: dict[str, set[tuple[str, str]]] = {}
    for r in read_tsv_rows(path):
        if len(r) >= 3:
            out.setdefault(r[0], set()).add((r[1], r[2]))
    return out


def read_runs(path: Path) -> dict[str, list[RetrievedItem]]:
    """JSON lines ``{question, items: [{doc_id, text}]}`` in rank order."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                obj = json.loads(line)
                out[obj["question"]] = [RetrievedItem(i["doc_id"], i["text"]) for i in obj["items"]]
    return out


def _date(cell: str) -> dt.date | None:
    return dt.date.fromisoformat(cell) if cell.strip() else None


def read_temporal_tsv(path: Path) -> dict[tuple[str, str, str], BoundQuadruple]:
    """``entity slot value T1 T2 T3 T4`` rows; blank cells are missing bounds."""
    out = {}
    for r in read_tsv_rows(path):
        r = r + [""] * (7 - len(r))
        out[(r[0], r[1], r[2])] = BoundQuadruple(*(_date(c) for c in r[3:7]))
    return out


def evaluate_links(system: Mapping[str, str], gold: Mapping[str, str]) -> dict:
    b = bcubed_plus(system, gold)
    return {"queries": len(gold), "micro_average": micro_average(system, gold), "bcubed_plus": asdict(b)}


def evaluate_clusters(system: Mapping[str, str], gold: Mapping[str, str]) -> dict:
    """Rand index over NIL queries of the gold standard."""
    nil = [q for q, g in gold.items() if is_nil(g)]
    sys_c = ClusterSet.from_labels({q: system.get(q, f"{NIL_PREFIX}<missing:{q}>") for q in nil})
    gold_c = ClusterSet.from_labels({q: gold[q] for q in nil})
    pc = pair_counts(sys_c, gold_c)
    return {"nil_queries": len(nil), "rand_index": rand_index(sys_c, gold_c), "pairs": asdict(pc)}


def evaluate_coverage(runs: Mapping[str, Sequence[RetrievedItem]], gold: Mapping[str, set],
                      cutoffs: Iterable[int]) -> dict:
    rows = []
    for n in cutoffs:
        for mode in ("strict", "lenient"):
            cov, red = coverage_redundancy(runs, gold, n, mode)
            rows.append({"n": n, "mode": mode, "coverage": cov, "redundancy": red})
    return {"questions": len(gold), "rows": rows}


def evaluate_temporal(system: Mapping[tuple, BoundQuadruple], gold: Mapping[tuple, BoundQuadruple],
                      scoring: TemporalScoring = TemporalScoring()) -> dict:
    scores = [temporal_score(system.get(k, BoundQuadruple()), g, scoring) for k, g in gold.items()]
    return {"answers": len(gold), "temporal_score": sum(scores) / len(scores) if scores else 1.0,
            "constants": asdict(scoring)}


def format_report(report: dict) -> str:
    """Plain two-column text rendering of a (possibly nested) report."""
    lines = []

    def walk(prefix: str, obj):
        if isinstance(obj, dict):
            for k, v in obj.items():
                walk(f"{prefix}.{k}" if prefix else str(k), v)
        elif isinstance(obj, list):
            for i, v in enumerate(obj):
                walk(f"{prefix}[{i}]", v)
        else:
            lines.append(f"{prefix:<40} {obj:.4f}" if isinstance(obj, float) else f"{prefix:<40} {obj}")

    walk("", report)
    return "\n".join(lines) + "\n"
