"""Coverage and redundancy of document vs passage retrieval as the cutoff grows.

Each (entity, slot) pair in a planted corpus is one question. Gold answers
are the planted value paired with every document that mentions it.
"""

import argparse

from kbp.evaluation import RetrievedItem, coverage_redundancy
from kbp.index import RetrievalConfig, build_index, search_documents, search_passages
from kbp.synthetic import planted_slot_corpus
from kbp.variants import SlotKeywordTable, VariantDictionary, formulate_sf_query

CUTOFFS = (1, 2, 5, 10, 20)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--entities", type=int, default=10)
    ap.add_argument("--docs", type=int, default=6)
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args(argv)

    planted = planted_slot_corpus(args.entities, args.docs, seed=args.seed)
    index = build_index(planted.corpus)
    docs = {d.doc_id: d for d in planted.corpus}
    keywords, dictionary = SlotKeywordTable.default(), VariantDictionary()
    config = RetrievalConfig(top_n_documents=max(CUTOFFS), top_n_passages=max(CUTOFFS))

    gold, doc_runs, passage_runs = {}, {}, {}
    for (entity, slot), value in planted.facts.items():
        qid = f"{entity}|{slot}"
        gold[qid] = {(d.doc_id, value) for d in docs.values() if any(value in f.text for f in d.fields)}
        query = formulate_sf_query(entity, slot, dictionary, keywords)
        doc_runs[qid] = [RetrievedItem(h.target, " ".join(f.text for f in docs[h.target].fields))
                         for h in search_documents(index, query, max(CUTOFFS))]
        passage_runs[qid] = [RetrievedItem(h.target.doc_id, h.target.text(docs[h.target.doc_id]))
                             for h in search_passages(index, query, config)]

    print(f"{len(gold)} questions, {len(docs)} documents")
    print("unit      mode       n   coverage  redundancy")
    for unit, runs in (("document", doc_runs), ("passage", passage_runs)):
        for mode in ("strict", "lenient"):
            for n in CUTOFFS:
                cov, red = coverage_redundancy(runs, gold, n, mode)
                print(f"{unit:9s} {mode:8s} {n:3d}   {cov:8.3f}  {red:10.3f}")


if __name__ == "__main__":
    main()
