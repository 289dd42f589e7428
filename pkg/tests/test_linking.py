import random

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from kbp.corpus import Corpus, make_document
from kbp.index import build_index
from kbp.linking import (
    NIL, CandidateList, ClusterSet, ELQuery, LinkDecision, Linker, LinkerConfig, NilPredictorConfig,
    cluster_nils, fit_threshold_model, generate_candidates, learn_threshold, levenshtein, link_all,
    predict_nil, read_link_tsv, select_candidate, write_decisions_tsv,
)
from kbp.synthetic import linking_fixture
from kbp.variants import VariantDictionary, build_dictionary, formulate_el_queries

scores = st.lists(st.floats(0, 20, allow_nan=False), max_size=6)


def clist(values):
    ordered = sorted(values, reverse=True)
    return CandidateList("q", tuple((f"E{i:02d}", s) for i, s in enumerate(ordered)))


# -- candidate lists --------------------------------------------------------------------------------


def test_candidate_list_validates_order():
    with pytest.raises(ValueError):
        CandidateList("q", (("A", 1.0), ("B", 2.0)))
    with pytest.raises(ValueError):
        CandidateList("q", (("A", 2.0), ("A", 1.0)))


def test_singleton_candidate_for_exact_title():
    kb = Corpus()
    for i, t in enumerate(["Norfolk", "Paris", "Berlin"]):
        kb.add(make_document(f"E{i}", [("title", t), ("wiki_text", f"{t} is a place.")]))
    c = generate_candidates(ELQuery("q", "Norfolk", ""), build_index(kb), VariantDictionary(), "mention_only")
    assert [n for n, _ in c.candidates] == ["E0"]


def test_absent_mention_no_candidates():
    kb = Corpus()
    kb.add(make_document("E0", [("title", "Paris"), ("wiki_text", "A city.")]))
    c = generate_candidates(ELQuery("q", "Zanzibar", ""), build_index(kb), VariantDictionary())
    assert c.candidates == ()


def test_candidate_scores_are_oracle_maxima():
    rng = random.Random(20)
    first, last = ["John", "Mary", "Paul", "Anne"], ["Smith", "Jones", "Brown", "Clark", "Young"]
    kb = Corpus()
    for i in range(20):
        name = f"{rng.choice(first)} {rng.choice(last)}"
        kb.add(make_document(f"E{i:02d}", [("title", name), ("wiki_text", f"{name} lived in {rng.choice(last)}ville.")]))
    d = VariantDictionary()
    d.add("John Smith", "JS")
    d.add("John Clark", "JS")
    units = {doc.doc_id: [(f.name, f.text) for f in doc.fields] for doc in kb}
    for mention in ["John Smith", "JS", "Smith", "Mary Young"]:
        expected = {}
        for q in formulate_el_queries(mention, [], d, "variants"):
            for node, s in oracles.brute_force_ranking(units, q):
                expected[node] = max(expected.get(node, 0.0), s)
        got = generate_candidates(ELQuery("q", mention, ""), build_index(kb), d, "variants", k=20)
        assert dict(got.candidates) == pytest.approx(expected, abs=1e-9)
        assert len(got.candidates) == len(expected)


# -- NIL prediction ---------------------------------------------------------------------------------


def test_nil_examples():
    assert predict_nil(clist([6.0]), NilPredictorConfig("top_score", alpha=5.9)) is False
    assert predict_nil(clist([5.8]), NilPredictorConfig("top_score", alpha=5.9)) is True
    assert predict_nil(clist([3.0, 2.9]), NilPredictorConfig("score_gap", beta=0.16)) is True


@given(scores, st.floats(0, 20), st.floats(0, 20))
def test_raising_alpha_never_turns_nil_into_link(values, a, b):
    lo, hi = sorted((a, b))
    c = clist(values)
    if predict_nil(c, NilPredictorConfig("top_score", alpha=lo)):
        assert predict_nil(c, NilPredictorConfig("top_score", alpha=hi))


@given(st.lists(st.integers(0, 2000), min_size=2, max_size=6), st.integers(-500, 500))
def test_gap_decision_shift_invariant(values, shift):
    # integer-valued scores keep the gap exact under the shift
    cfg = NilPredictorConfig("score_gap", beta=16)
    base = clist([float(v) for v in values])
    moved = clist([float(v + shift) for v in values])
    assert predict_nil(base, cfg) == predict_nil(moved, cfg)


def test_top_score_decision_is_not_shift_invariant():
    cfg = NilPredictorConfig("top_score", alpha=5.9)
    assert predict_nil(clist([5.0, 1.0]), cfg) is True
    assert predict_nil(clist([7.0, 3.0]), cfg) is False  # same gap, shifted by 2


def test_unknown_strategy_rejected():
    with pytest.raises(ValueError):
        NilPredictorConfig("median")


# -- learned threshold --------------------------------------------------------------------------------


def test_threshold_between_small_samples():
    data = [(s, True) for s in (9, 10, 11)] + [(s, False) for s in (1, 2, 3)]
    assert learn_threshold(data) == pytest.approx(6.0, abs=1e-6)


def test_threshold_separates_training_set():
    data = [(s, True) for s in (9, 10, 11)] + [(s, False) for s in (1, 2, 3)]
    alpha = learn_threshold(data)
    assert all((s >= alpha) == ok for s, ok in data)


@pytest.mark.parametrize("data", [
    [(5.0, True), (6.0, True)],
    [(4.0, True), (4.0, False), (4.0, True), (4.0, False)],
    [(1.0, True), (2.0, True), (8.0, False), (9.0, False)],
])
def test_degenerate_training_rejected(data):
    with pytest.raises(ValueError):
        learn_threshold(data)


def test_posterior_crosses_half_at_threshold():
    rng = random.Random(1)
    data = [(rng.gauss(3, 1.5), False) for _ in range(300)] + [(rng.gauss(8, 1.5), True) for _ in range(100)]
    alpha = learn_threshold(data)
    model = fit_threshold_model(data)
    assert model.posterior_correct(alpha) == pytest.approx(0.5, abs=1e-6)
    assert alpha > 5.5  # the rarer correct class pushes the boundary toward its mean


# -- candidate selection ------------------------------------------------------------------------------


def test_select_examples():
    assert select_candidate(CandidateList("q", (("A", 7.1), ("B", 6.9)))) == "A"
    assert select_candidate(CandidateList("q", (("A", 7.1),))) == "A"
    assert select_candidate(CandidateList.ranked("q", {"B": 5.0, "A": 5.0})) == "A"
    with pytest.raises(ValueError):
        select_candidate(CandidateList("q", ()))


@given(st.dictionaries(st.sampled_from(["E1", "E2", "E3", "E4"]), st.sampled_from([1.0, 2.0, 3.0]), min_size=1))
def test_select_is_lexicographic_argmax(scores_by_node):
    top = max(scores_by_node.values())
    assert select_candidate(CandidateList.ranked("q", scores_by_node)) == min(
        n for n, s in scores_by_node.items() if s == top)


# -- edit distance and NIL clustering -------------------------------------------------------------------


def test_levenshtein_examples():
    assert levenshtein("kitten", "sitting") == 3
    assert levenshtein("same", "same") == 0
    assert levenshtein("", "abc") == 3


words = st.text(alphabet="abcd", max_size=7)


@given(words, words, words)
def test_levenshtein_is_a_metric(a, b, c):
    assert levenshtein(a, b) == levenshtein(b, a) == oracles.edit_distance(a, b)
    assert (levenshtein(a, b) == 0) == (a == b)
    assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)


def test_cluster_examples():
    qs = [ELQuery("q1", "ABC", ""), ELQuery("q2", "ABC", ""), ELQuery("q3", "ABD", "")]
    assert set(cluster_nils(qs, 0).clusters) == {frozenset({"q1", "q2"}), frozenset({"q3"})}
    assert set(cluster_nils(qs, 1).clusters) == {frozenset({"q1", "q2", "q3"})}
    assert cluster_nils([], 0).clusters == ()


@settings(max_examples=100)
@given(st.lists(st.text(alphabet="ab ", min_size=1, max_size=5), max_size=12), st.integers(0, 3))
def test_clusters_partition_the_queries(mentions, threshold):
    qs = [ELQuery(f"q{i}", m, "") for i, m in enumerate(mentions)]
    clusters = cluster_nils(qs, threshold).clusters
    flat = [q for c in clusters for q in c]
    assert sorted(flat) == sorted(q.query_id for q in qs)
    assert all(clusters)


def test_cluster_set_from_labels():
    cs = ClusterSet.from_labels({"a": "X", "b": "X", "c": "Y"})
    assert set(cs.clusters) == {frozenset({"a", "b"}), frozenset({"c"})}
    assert cs.items() == {"a", "b", "c"}


# -- batch linking ---------------------------------------------------------------------------------------


@pytest.fixture(scope="module")
def fixture_linker():
    fx = linking_fixture()
    cfg = LinkerConfig(nil=NilPredictorConfig("top_score", alpha=1.0))
    return fx, Linker(build_index(fx.kb), build_dictionary(fx.dump), fx.source, cfg)


def test_fixture_links_match_gold(fixture_linker):
    fx, linker = fixture_linker
    decisions = link_all(fx.queries, linker)
    assert {d.query_id: d.label for d in decisions} == fx.gold
    assert sum(d.link != NIL for d in decisions) == 4


def test_all_nil_batch_has_cluster_ids(fixture_linker):
    fx, linker = fixture_linker
    qs = [ELQuery("n1", "Quux Zorp", "S5"), ELQuery("n2", "Quux Zorp", "S6"), ELQuery("n3", "Blorf", "S5")]
    decisions = link_all(qs, linker)
    assert all(d.link == NIL and d.cluster_id for d in decisions)
    assert [d.cluster_id for d in decisions] == ["NIL001", "NIL001", "NIL002"]


def test_empty_batch(fixture_linker):
    assert link_all([], fixture_linker[1]) == []


def test_failed_query_recorded(fixture_linker):
    _, linker = fixture_linker
    (d,) = link_all([ELQuery("bad", "IBM", "NO_SUCH_DOC")], linker)
    assert d.link == NIL and d.error


def test_document_entity_strategy_runs(fixture_linker):
    fx, linker = fixture_linker
    cfg = LinkerConfig(strategy="variants_plus_doc_entities", nil=NilPredictorConfig("top_score", alpha=1.0))
    l3 = Linker(linker.kb_index, linker.dictionary, fx.source, cfg)
    decisions = link_all(fx.queries[:1], l3)
    assert decisions[0].link == "E0001"


def test_decision_requires_cluster_iff_nil():
    with pytest.raises(ValueError):
        LinkDecision("q", NIL, None)
    with pytest.raises(ValueError):
        LinkDecision("q", "E1", "NIL001")


def test_decisions_tsv_roundtrip(tmp_path, fixture_linker):
    fx, linker = fixture_linker
    decisions = link_all(fx.queries, linker)
    write_decisions_tsv(decisions, tmp_path / "out.tsv")
    assert read_link_tsv(tmp_path / "out.tsv") == {d.query_id: d.label for d in decisions}
