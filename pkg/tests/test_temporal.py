import datetime as dt
import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from kbp.temporal import (
    INCONSISTENT, INVERSE, RELATIONS, AnnotatedDocument, BoundQuadruple, PointOrder, TemporalEvent, Timex,
    TLink, bound_event, close, component_of, decompose, end, granularity, isolate_subgraphs, label_links,
    link_candidates, point_dates, recognize_timexes, resolve_timex_bounds, select_event, start,
    temporal_bounds, timex_quadruple,
)

D = dt.date


def annotate(text, events=(), timexes=(), tlinks=(), dct=None):
    """Build a document; events are words (``word`` or ``word#n`` for the n-th occurrence)."""
    probe = AnnotatedDocument("doc", text)
    evs = []
    for i, spec in enumerate(events):
        word, _, nth = spec.partition("#")
        pos = -1
        for _ in range(int(nth or 1)):
            pos = text.index(word, pos + 1)
        evs.append(TemporalEvent(f"e{i + 1}", word, (pos, pos + len(word)), probe.sentence_of(pos)))
    txs = []
    for i, (surface, value) in enumerate(timexes):
        pos = text.index(surface)
        txs.append(Timex(f"t{i + 1}", value, (pos, pos + len(surface)), surface, "doc"))
    return AnnotatedDocument("doc", text, dct, evs, txs, [TLink(*l) for l in tlinks])


# -- recognition and calendar bounds ----------------------------------------------------------------


def test_recognize_month_year():
    (t,) = recognize_timexes("The plant closed in June 2006.")
    assert (t.value, t.granularity, t.text) == ("2006-06", "month", "June 2006")


def test_recognize_relative_with_dct():
    (t,) = recognize_timexes("He resigned yesterday.", dct=D(2006, 1, 2))
    assert t.value == "2006-01-01"
    assert recognize_timexes("He resigned yesterday.") == []


def test_recognize_season():
    (t,) = recognize_timexes("They met in the summer of 2006.")
    assert t.value == "2006-SU"


@given(st.dates(D(1950, 1, 2), D(2049, 12, 30)))
def test_relative_days_follow_calendar(dct):
    got = {t.text.lower(): t.value for t in recognize_timexes("today, yesterday and tomorrow", dct=dct)}
    assert got == {"today": dct.isoformat(), "yesterday": (dct - dt.timedelta(1)).isoformat(),
                   "tomorrow": (dct + dt.timedelta(1)).isoformat()}


@given(st.dates(D(1950, 1, 1), D(2049, 12, 31)))
def test_last_and_next_month(dct):
    got = {t.text.lower(): t.value for t in recognize_timexes("last month and next month", dct=dct)}
    prev = (dct.replace(day=1) - dt.timedelta(1))
    nxt = (dct.replace(day=28) + dt.timedelta(days=4)).replace(day=1)
    assert got == {"last month": f"{prev:%Y-%m}", "next month": f"{nxt:%Y-%m}"}


def test_bounds_examples():
    assert resolve_timex_bounds("2006-06") == (D(2006, 6, 1), D(2006, 6, 30))
    assert resolve_timex_bounds("2006") == (D(2006, 1, 1), D(2006, 12, 31))
    assert resolve_timex_bounds("2006-WI") == (D(2006, 12, 1), D(2007, 2, 28))
    assert resolve_timex_bounds("2006-03-04") == (D(2006, 3, 4), D(2006, 3, 4))


@pytest.mark.parametrize("value", ["2006-13", "06-06", "2006-XX", "June 2006", "2006-02-30"])
def test_unparseable_values_rejected(value):
    with pytest.raises(ValueError):
        resolve_timex_bounds(value)


values = st.one_of(
    st.integers(1900, 2100).map(str),
    st.tuples(st.integers(1900, 2100), st.integers(1, 12)).map(lambda p: f"{p[0]}-{p[1]:02d}"),
    st.tuples(st.integers(1900, 2100), st.sampled_from(["SP", "SU", "FA", "WI"])).map(lambda p: f"{p[0]}-{p[1]}"),
    st.dates(D(1900, 1, 1), D(2100, 12, 31)).map(dt.date.isoformat),
)


@given(values)
def test_bounds_ordered_and_granularity_matches(value):
    lo, hi = resolve_timex_bounds(value)
    assert lo <= hi
    shape = "season" if value[5:] in ("SP", "SU", "FA", "WI") else {4: "year", 7: "month", 10: "day"}[len(value)]
    assert granularity(value) == shape


@given(st.integers(1901, 2099))
def test_seasons_and_months_tile_the_year(year):
    days = list(oracles.days_matching(year, year, lambda d: True))
    blocks = [resolve_timex_bounds(f"{year - 1}-WI")] + [resolve_timex_bounds(f"{year}-{s}")
                                                         for s in ("SP", "SU", "FA", "WI")]
    for d in days:
        assert sum(lo <= d <= hi for lo, hi in blocks) == 1
    months = [resolve_timex_bounds(f"{year}-{m:02d}") for m in range(1, 13)]
    assert months[0][0] == D(year, 1, 1) and months[-1][1] == D(year, 12, 31)
    for (_, hi), (lo, _) in zip(months, months[1:]):
        assert lo - hi == dt.timedelta(1)


# -- decomposition and closure ------------------------------------------------------------------------


def test_before_is_end_less_than_start():
    po = decompose(["A", "B"], [], [TLink("A", "B", "BEFORE")])
    assert (end("A"), start("B")) in po.less
    assert (start("A"), end("A")) in po.less and (start("B"), end("B")) in po.less


def test_simultaneous_is_two_equalities():
    po = decompose(["A", "B"], [], [TLink("A", "B", "SIMULTANEOUS")])
    assert len(po.equal) == 2
    assert po.less == {(start("A"), end("A")), (start("B"), end("B"))}


@pytest.mark.parametrize("relation", RELATIONS)
def test_inverse_relation_same_point_order(relation):
    forward = decompose(["A", "B"], [], [TLink("A", "B", relation)])
    backward = decompose(["A", "B"], [], [TLink("B", "A", INVERSE[relation])])
    assert forward == backward


def test_bad_links_rejected():
    with pytest.raises(ValueError):
        TLink("A", "B", "DURING")
    with pytest.raises(ValueError):
        TLink("A", "A", "BEFORE")
    with pytest.raises(ValueError):
        decompose(["A"], [], [TLink("A", "Z", "BEFORE")])


def test_transitivity_and_two_cycle():
    a, b, c = "a", "b", "c"
    closed = close(PointOrder(frozenset({a, b, c}), frozenset({(a, b), (b, c)}), frozenset()))
    assert (a, c) in closed.less and closed.relation(c, a) == ">"
    assert close(PointOrder(frozenset({a, b}), frozenset({(a, b), (b, a)}), frozenset())) is INCONSISTENT
    assert not INCONSISTENT


def random_graph(rng, n, density, consistent=True):
    nodes = [f"n{i:02d}" for i in range(n)]
    rank = {x: rng.randint(0, n // 2) for x in nodes}
    less, equal = set(), set()
    for a, b in itertools.combinations(nodes, 2):
        if rng.random() < density:
            if not consistent and rng.random() < 0.1:
                less.add((b, a) if rank[a] < rank[b] else (a, b))
            elif rank[a] < rank[b]:
                less.add((a, b))
            elif rank[b] < rank[a]:
                less.add((b, a))
            else:
                equal.add((a, b))
    return PointOrder(frozenset(nodes), frozenset(less), frozenset(equal))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 15), st.sampled_from([0.1, 0.3, 0.7]), st.booleans())
def test_closure_vs_reachability_and_idempotent(seed, n, density, consistent):
    po = random_graph(random.Random(seed), n, density, consistent)
    closed = close(po)
    if oracles.has_strict_cycle(po.nodes, po.less, po.equal):
        assert closed is INCONSISTENT
        return
    strict, eq = oracles.reachability(po.nodes, po.less, po.equal)
    assert set(closed.less) == strict and set(closed.equal) == eq
    assert close(closed) == closed


# -- subgraphs -----------------------------------------------------------------------------------


def test_disjoint_chains_two_components():
    po = decompose(["A", "B", "C", "D"], [], [TLink("A", "B", "BEFORE"), TLink("C", "D", "AFTER")])
    assert len(isolate_subgraphs(po)) == 2
    assert component_of(po, "A").intervals() == {"A", "B"}


def test_connected_graph_one_component():
    ids = ["A", "B", "C"]
    po = decompose(ids, [], [TLink(a, b, "BEFORE") for a, b in itertools.combinations(ids, 2)])
    assert len(isolate_subgraphs(po)) == 1


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 15), st.sampled_from([0.05, 0.15, 0.4]))
def test_components_match_union_find_oracle(seed, n, density):
    po = random_graph(random.Random(seed), n, density)
    parent = {x: x for x in po.nodes}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for a, b in [*po.less, *po.equal]:
        parent[find(a)] = find(b)
    expected = {frozenset(x for x in po.nodes if find(x) == r) for r in {find(x) for x in po.nodes}}
    assert {frozenset(c.nodes) for c in isolate_subgraphs(po)} == expected


# -- bounding --------------------------------------------------------------------------------------


def test_bounded_between_two_timexes():
    tx = [Timex("t1", "2004-01-01"), Timex("t2", "2005-03-15")]
    po = decompose(["e"], tx, [TLink("t1", "e", "BEFORE"), TLink("e", "t2", "BEFORE")])
    quad = bound_event(close(po), "e", tx)
    expected = (D(2004, 1, 1), D(2005, 3, 15), D(2004, 1, 1), D(2005, 3, 15))
    assert quad.as_tuple() == expected
    assert oracles.enumerated_bounds(po.nodes, po.less, po.equal, "e", point_dates(tx)) == expected


def test_unrelated_event_all_blank():
    tx = [Timex("t1", "2004")]
    po = decompose(["e", "f"], tx, [TLink("f", "t1", "IS_INCLUDED")])
    assert bound_event(close(po), "e", tx) == BoundQuadruple()


def test_ended_by_month():
    tx = [Timex("t", "2006-06")]
    po = decompose(["e"], tx, [TLink("e", "t", "ENDED_BY")])
    quad = bound_event(close(po), "e", tx)
    expected = (None, D(2006, 6, 1), D(2006, 6, 30), D(2006, 6, 30))
    assert quad.as_tuple() == expected
    assert oracles.enumerated_bounds(po.nodes, po.less, po.equal, "e", point_dates(tx)) == expected


def test_missing_anchor():
    with pytest.raises(KeyError):
        bound_event(close(decompose(["e"], [], [])), "zzz", [])


def test_timex_quadruple_and_violations():
    assert timex_quadruple(Timex("t", "2006-06")).as_tuple() == (D(2006, 6, 1), D(2006, 6, 30),
                                                                 D(2006, 6, 1), D(2006, 6, 30))
    assert BoundQuadruple(D(2007, 1, 1), D(2006, 1, 1), None, None).violations()


def _allen(a, b):
    (s1, e1), (s2, e2) = a, b
    table = [
        (e1 < s2, "BEFORE"), (e2 < s1, "AFTER"), ((s1, e1) == (s2, e2), "SIMULTANEOUS"),
        (s1 == s2 and e1 < e2, "BEGINS"), (s1 == s2 and e1 > e2, "BEGUN_BY"),
        (e1 == e2 and s1 > s2, "ENDS"), (e1 == e2 and s1 < s2, "ENDED_BY"),
        (s1 < s2 and e2 < e1, "INCLUDES"), (s2 < s1 and e1 < e2, "IS_INCLUDED"),
    ]
    return next((rel for ok, rel in table if ok), None)


def random_timeline(rng):
    values = [rng.choice([f"{rng.randint(2000, 2003)}", f"{rng.randint(2000, 2003)}-{rng.randint(1, 12):02d}",
                          f"{rng.randint(2000, 2003)}-{rng.choice(['SP', 'SU', 'FA', 'WI'])}"])
              for _ in range(rng.randint(1, 4))]
    tx = [Timex(f"t{i}", v) for i, v in enumerate(values)]
    spans = {t.id: (resolve_timex_bounds(t)[0].toordinal(), resolve_timex_bounds(t)[1].toordinal() + 1)
             for t in tx}
    lo = D(1999, 6, 1).toordinal()
    for e in ("e", "f"):
        s = rng.randint(lo, lo + 1800)
        spans[e] = (s, s + rng.randint(1, 400))
    links = [TLink(a, b, rel) for a, b in itertools.combinations(sorted(spans), 2)
             if (rel := _allen(spans[a], spans[b])) and rng.random() < 0.6]
    return tx, links


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_bounds_ordered_on_consistent_graphs(seed):
    tx, links = random_timeline(random.Random(seed))
    closed = close(decompose(["e", "f"], tx, links))
    assert closed is not INCONSISTENT
    assert bound_event(closed, "e", tx).violations() == []


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_redundant_edge_leaves_bounds_unchanged(seed, pick):
    tx, links = random_timeline(random.Random(seed))
    po = decompose(["e", "f"], tx, links)
    closed = close(po)
    implied = sorted(closed.less - po.less)
    if not implied:
        return
    extra = PointOrder(po.nodes, po.less | {implied[pick % len(implied)]}, po.equal)
    assert bound_event(close(extra), "e", tx) == bound_event(closed, "e", tx)


# -- event selection ------------------------------------------------------------------------------


def test_step1_exact_event_text():
    doc = annotate("They married in Paris. Later they moved.", events=["married", "moved"])
    sel = select_event(doc, "married")
    assert (sel.kind, sel.id, sel.step) == ("event", "e1", 1)


def test_step2_only_event_in_sentence():
    doc = annotate("Smith joined Acme in 1990. Profits grew.", events=["joined", "grew"])
    sel = select_event(doc, "Acme")
    assert (sel.id, sel.step) == ("e1", 2)


def test_step3_simplified_match():
    doc = annotate("Shares of Acme Inc. rose after the long merger talks.", events=["rose", "talks"])
    sel = select_event(doc, "Acme, Inc.")
    assert (sel.id, sel.step) == ("e1", 3)


def test_step4_nearest_timex():
    doc = annotate("Paris hosted it in 1990 after a long wait. Rome 1995 followed.",
                   timexes=[("1990", "1990"), ("1995", "1995")])
    sel = select_event(doc, "Rome")
    assert (sel.kind, sel.id, sel.step) == ("timex", "t2", 4)


def test_step5_not_found():
    assert select_event(annotate("Nothing here.", events=["here"]), "Zanzibar").kind == "not_found"


# -- link candidates --------------------------------------------------------------------------------


def test_event_timex_same_sentence():
    doc = annotate("He resigned on June 5, 2006.", events=["resigned"], timexes=[("June 5, 2006", "2006-06-05")])
    assert [(c.source, c.target, c.link_class) for c in link_candidates(doc)] == [("e1", "t1", "event-timex")]


def test_event_pairs_beyond_window_skipped():
    doc = annotate("Ann sang. Rain fell. Wind blew. Snow came. Eve danced.", events=["sang", "danced"])
    assert link_candidates(doc) == []
    doc = annotate("Ann sang. Rain fell. Wind blew. Eve danced.", events=["sang", "danced"])
    assert len(link_candidates(doc)) == 1


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 2)), min_size=1, max_size=9))
def test_pair_count_matches_enumeration(layout):
    sentences, events, timexes = [], [], []
    for k, (n_ev, n_tx) in enumerate(layout):
        words = [f"ev{k}x{i}" for i in range(n_ev)]
        years = [str(1900 + 10 * k + i) for i in range(n_tx)]
        events += [(w, k) for w in words]
        timexes += [(y, k) for y in years]
        sentences.append(" ".join(["Then", *words, *years]) + ".")
    doc = annotate(" ".join(sentences), events=[w for w, _ in events], timexes=[(y, y) for y, _ in timexes])
    expected = sum(1 for (_, a), (_, b) in itertools.product(events, timexes) if a == b)
    expected += sum(1 for (_, a), (_, b) in itertools.combinations(events, 2) if abs(a - b) <= 3)
    assert len(link_candidates(doc)) == expected


def test_heuristic_labels():
    doc = annotate("He resigned on June 5, 2006. She arrived later, in 2007.",
                   events=["resigned", "arrived"], timexes=[("June 5, 2006", "2006-06-05"), ("2007", "2007")])
    rels = {(l.source, l.target): l.relation for l in label_links(doc)}
    assert rels[("e1", "t1")] == "IS_INCLUDED"
    assert rels[("e2", "t2")] == "BEFORE"
    assert rels[("e1", "e2")] == "BEFORE"


# -- pipeline ------------------------------------------------------------------------------------------


def test_temporal_bounds_with_gold_links():
    doc = annotate("He joined in 2004. He left in March 2005.", events=["joined", "left"],
                   timexes=[("2004", "2004"), ("March 2005", "2005-03")],
                   tlinks=[("e1", "t1", "IS_INCLUDED"), ("e1", "e2", "BEFORE"), ("e2", "t2", "IS_INCLUDED")])
    ans = temporal_bounds(doc, "joined")
    assert ans.consistent and ans.selection.id == "e1"
    assert ans.bounds.as_tuple() == (D(2004, 1, 1), D(2004, 12, 31), D(2004, 1, 1), D(2004, 12, 31))


def test_inconsistent_component_gives_blanks():
    doc = annotate("It began. It ended.", events=["began", "ended"],
                   tlinks=[("e1", "e2", "BEFORE"), ("e2", "e1", "BEFORE")])
    ans = temporal_bounds(doc, "began")
    assert not ans.consistent and ans.bounds == BoundQuadruple()


def test_document_json_roundtrip():
    doc = annotate("He resigned on June 5, 2006.", events=["resigned"],
                   timexes=[("June 5, 2006", "2006-06-05")], tlinks=[("e1", "t1", "IS_INCLUDED")], dct=D(2006, 6, 6))
    again = AnnotatedDocument.from_json(doc.to_json())
    assert again.to_json() == doc.to_json()


def test_span_outside_document_rejected():
    with pytest.raises(ValueError):
        AnnotatedDocument("d", "short", events=[TemporalEvent("e", "x", (3, 99))])
