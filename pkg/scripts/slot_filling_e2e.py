"""Train slot classifiers by distant supervision and fill slots on a held-out corpus.

Reports per-slot accuracy of the top answer, once with document retrieval
and once with passage retrieval.
"""

import argparse
from collections import Counter

from kbp.coref import train_gender
from kbp.index import RetrievalConfig, build_index
from kbp.slots import SlotFiller, SlotFillingConfig, generate_training, normalize_value, train_slot_models
from kbp.synthetic import SF_SLOTS, planted_slot_corpus, slot_training_data
from kbp.variants import SlotKeywordTable, VariantDictionary


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--entities", type=int, default=5)
    ap.add_argument("--docs", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--top-n", type=int, default=20)
    args = ap.parse_args(argv)

    train = slot_training_data()
    instances = generate_training(train.fact_table, train.corpus)
    print(f"training instances: {len(instances)} "
          f"({sum(i.label for i in instances)} positive)")
    models = train_slot_models(instances)
    test = planted_slot_corpus(args.entities, args.docs, seed=args.seed)
    index = build_index(test.corpus)
    gender = train_gender()
    retrieval = RetrievalConfig(top_n_documents=args.top_n, top_n_passages=args.top_n)

    for passages in (False, True):
        filler = SlotFiller(index, VariantDictionary(), SlotKeywordTable.default(), models, gender_model=gender,
                            config=SlotFillingConfig(retrieval=retrieval, passages=passages))
        hits, answered = Counter(), Counter()
        for e in test.entities:
            for ans in filler.fill_slots(e, "PER", SF_SLOTS):
                if ans.values:
                    answered[ans.slot] += 1
                    hits[ans.slot] += normalize_value(ans.values[0][0]) == normalize_value(test.facts[(e, ans.slot)])
        print(f"\nretrieval unit: {'passage' if passages else 'document'}")
        print("slot                   answered  correct")
        for slot in SF_SLOTS:
            print(f"{slot:22s} {answered[slot]:8d}  {hits[slot]:7d}/{len(test.entities)}")


if __name__ == "__main__":
    main()
