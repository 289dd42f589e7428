"""Independent reference implementations used as test oracles.

Each oracle recomputes a quantity from its definition by a different route
than the package code (brute force, enumeration or plain recursion).
"""

from __future__ import annotations

import datetime as dt
import itertools
import math
import re
from functools import lru_cache
from importlib import resources

_TOKEN = re.compile(r"[^\W_]+")


def stoplist() -> frozenset[str]:
    text = resources.files("kbp").joinpath("data").joinpath("stopwords.txt").read_text(encoding="utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


def tokenize(text: str, remove_stopwords: bool) -> list[str]:
    toks = _TOKEN.findall(text.lower())
    if remove_stopwords:
        sw = stoplist()
        toks = [t for t in toks if t not in sw]
    return toks


# -- retrieval scoring -----------------------------------------------------------------


def _occurrences(units_fields, leaf, remove_stopwords):
    """Occurrences of a (possibly fielded) word or phrase in one unit."""
    needle = tokenize(leaf.text, remove_stopwords)
    if not needle:
        return 0
    count = 0
    for name, text in units_fields:
        if leaf.field is not None and name != leaf.field:
            continue
        hay = tokenize(text, remove_stopwords)
        for i in range(len(hay) - len(needle) + 1):
            if hay[i:i + len(needle)] == needle:
                count += 1
    return count


def _leaves(q):
    if hasattr(q, "children"):
        for c in q.children:
            yield from _leaves(c)
    else:
        yield q


def _satisfied(q, counts, pos):
    """(matched, contributing leaf positions) walking leaves left to right."""
    if not hasattr(q, "children"):
        i = next(pos)
        return counts[i] > 0, ([i] if counts[i] > 0 else [])
    parts = [_satisfied(c, counts, pos) for c in q.children]
    if type(q).__name__ == "And":
        ok = all(m for m, _ in parts)
        return ok, ([i for _, c in parts for i in c] if ok else [])
    contrib = [i for m, c in parts if m for i in c]
    return bool(contrib), contrib


def brute_force_ranking(units: dict, query, remove_stopwords: bool = True) -> list[tuple]:
    """``units`` maps a sort key to its list of (field_name, text); returns [(key, score)] ranked."""
    leaf_list = list(_leaves(query))
    counts = {k: [_occurrences(f, leaf, remove_stopwords) for leaf in leaf_list] for k, f in units.items()}
    n = len(units)
    idf = []
    for i in range(len(leaf_list)):
        df = sum(1 for k in units if counts[k][i] > 0)
        idf.append(1 + math.log(n / (df + 1)))
    scored = []
    for k in units:
        ok, contrib = _satisfied(query, counts[k], iter(range(len(leaf_list))))
        if not ok:
            continue
        s = sum(math.sqrt(counts[k][i]) * idf[i] ** 2 for i in contrib)
        scored.append((k, len(contrib) / len(leaf_list) * s))
    scored.sort(key=lambda kv: (-round(kv[1], 9), kv[0]))
    return scored


# -- clustering ---------------------------------------------------------------------------


def rand_index_pairs(sys_labels: dict, gold_labels: dict) -> float:
    items = sorted(gold_labels)
    agree = total = 0
    for a, b in itertools.combinations(items, 2):
        total += 1
        agree += (sys_labels[a] == sys_labels[b]) == (gold_labels[a] == gold_labels[b])
    return 1.0 if total == 0 else agree / total


@lru_cache(maxsize=None)
def edit_distance(a: str, b: str) -> int:
    if not a:
        return len(b)
    if not b:
        return len(a)
    return min(edit_distance(a[1:], b) + 1, edit_distance(a, b[1:]) + 1,
               edit_distance(a[1:], b[1:]) + (a[0] != b[0]))


def components_by_threshold(mentions: dict[str, str], threshold: int) -> set[frozenset[str]]:
    """Connected components of the ``distance <= threshold`` graph by repeated BFS."""
    ids = sorted(mentions)
    unseen, comps = set(ids), set()
    while unseen:
        frontier = [min(unseen)]
        comp = set(frontier)
        unseen -= comp
        while frontier:
            x = frontier.pop()
            for y in list(unseen):
                if edit_distance(mentions[x], mentions[y]) <= threshold:
                    unseen.discard(y)
                    comp.add(y)
                    frontier.append(y)
        comps.add(frozenset(comp))
    return comps


# -- point algebra --------------------------------------------------------------------------


def reachability(nodes, less, equal):
    """Entailed (<) and (=) pairs by breadth-first search over the raw edges.

    ``a < b`` holds when a path a -> b uses at least one strict edge, with
    equality edges walkable in both directions.
    """
    adj = {n: [] for n in nodes}
    for a, b in less:
        adj[a].append((b, True))
    for a, b in equal:
        adj[a].append((b, False))
        adj[b].append((a, False))
    strict, eq = set(), set()
    for s in nodes:
        seen = {(s, False)}
        queue = [(s, False)]
        while queue:
            x, used = queue.pop()
            for y, is_strict in adj[x]:
                state = (y, used or is_strict)
                if state not in seen:
                    seen.add(state)
                    queue.append(state)
        for y, used in seen:
            if used:
                strict.add((s, y))
            elif y != s:
                eq.add((min(s, y), max(s, y)))
    return strict, eq


def has_strict_cycle(nodes, less, equal) -> bool:
    strict, _ = reachability(nodes, less, equal)
    return any((n, n) in strict for n in nodes)


def downset_masks(nodes, less, equal):
    """Every subset (as a bitmask over sorted ``nodes``) closed under predecessors.

    These are exactly the prefixes of consistent weak orders.
    """
    pos = {n: i for i, n in enumerate(nodes)}
    preds = [0] * len(nodes)
    for a, b in less:
        preds[pos[b]] |= 1 << pos[a]
    for a, b in equal:
        preds[pos[a]] |= 1 << pos[b]
        preds[pos[b]] |= 1 << pos[a]
    for mask in range(1 << len(nodes)):
        if all(not (mask >> i & 1) or not (preds[i] & ~mask) for i in range(len(nodes))):
            yield mask


def entailed_not_after(nodes, less, equal):
    """Pairs (p, s) with p <= s in every consistent weak order.

    p can end up strictly after s exactly when some order ideal contains s
    but not p; pairs never separated that way are entailed.
    """
    nodes = sorted(nodes)
    full = (1 << len(nodes)) - 1
    separable = [0] * len(nodes)  # separable[s]: points that can lie strictly after s
    for mask in downset_masks(nodes, less, equal):
        outside = full & ~mask
        for i in range(len(nodes)):
            if mask >> i & 1:
                separable[i] |= outside
    return {(p, s) for j, s in enumerate(nodes) for i, p in enumerate(nodes) if not separable[j] >> i & 1}


def enumerated_bounds(nodes, less, equal, anchor, timex_dates):
    """T1..T4 from entailed orderings; ``timex_dates`` maps timex points to dates."""
    le = entailed_not_after(nodes, less, equal)
    out = []
    for p in ((anchor, "start"), (anchor, "end")):
        before = [d for q, d in timex_dates.items() if (q, p) in le]
        after = [d for q, d in timex_dates.items() if (p, q) in le]
        out += [max(before) if before else None, min(after) if after else None]
    return tuple(out)


# -- calendar ---------------------------------------------------------------------------------


def days_matching(year_lo: int, year_hi: int, pred):
    d = dt.date(year_lo, 1, 1)
    while d.year <= year_hi:
        if pred(d):
            yield d
        d += dt.timedelta(days=1)


def calendar_bounds(value: str) -> tuple[dt.date, dt.date]:
    """First and last day covered, by walking every day of the surrounding years."""
    year = int(value[:4])
    rest = value[5:]
    if rest in ("SP", "SU", "FA"):
        months = {"SP": (3, 4, 5), "SU": (6, 7, 8), "FA": (9, 10, 11)}[rest]
        days = list(days_matching(year, year, lambda d: d.month in months))
    elif rest == "WI":
        days = list(days_matching(year, year + 1, lambda d: (d.year == year and d.month == 12)
                                  or (d.year == year + 1 and d.month in (1, 2))))
    elif len(rest) == 2:
        days = list(days_matching(year, year, lambda d: d.month == int(rest)))
    elif rest:
        day = dt.date.fromisoformat(value)
        days = [day]
    else:
        days = list(days_matching(year, year, lambda d: True))
    return days[0], days[-1]
