"""Seeded synthetic corpora with known answers, for tests and experiment scripts."""

from __future__ import annotations

import datetime as dt
import json
import random
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .corpus import Corpus, Document, make_document
from .dates import MONTHS
from .linking import ELQuery
from .query import And, Or, Query, Term
from .resources import word_list
from .variants import WikiPage

# -- random retrieval workloads -------------------------------------------------------------

VOCAB = ("alpha", "beta", "gamma", "delta", "omega", "river", "stone", "north", "south", "market",
         "the", "of", "and", "bridge", "tower", "field", "harbor", "garden", "silver", "copper")
FIELDS = ("title", "body")


def random_corpus(n_docs: int = 50, seed: int = 0, vocab: tuple[str, ...] = VOCAB) -> Corpus:
    """Documents with a short title field and a longer body, Zipf-ish word draws."""
    rng = random.Random(seed)
    weights = [1.0 / (i + 1) for i in range(len(vocab))]
    corpus = Corpus()
    for i in range(n_docs):
        title = " ".join(rng.choices(vocab, weights, k=rng.randint(1, 4)))
        body = " ".join(rng.choices(vocab, weights, k=rng.randint(5, 40)))
        corpus.add(make_document(f"D{i:03d}", [("title", title), ("body", body)]))
    return corpus


def random_query(rng: random.Random, vocab: tuple[str, ...] = VOCAB, depth: int = 2) -> Query:
    """Random And/Or tree over single words, two-word phrases and fielded terms."""
    if depth == 0 or rng.random() < 0.35:
        kind = rng.random()
        fld = rng.choice(FIELDS) if rng.random() < 0.3 else None
        if kind < 0.25:
            return Term(f"{rng.choice(vocab)} {rng.choice(vocab)}", fld)
        return Term(rng.choice(vocab), fld)
    children = tuple(random_query(rng, vocab, depth - 1) for _ in range(rng.randint(2, 3)))
    return And(children) if rng.random() < 0.5 else Or(children)


# -- planted slot-filling corpus ----------------------------------------------------------------

SF_SLOTS = ("per:date_of_birth", "per:city_of_birth", "per:religion", "per:date_of_death")

_SURNAMES = ("Hallworth", "Brennick", "Castellane", "Dunmore", "Everhart", "Fairbairn", "Gorringe",
             "Holloway", "Ingleby", "Jessop", "Kendrick", "Lockhart", "Merriman", "Northcott",
             "Ormerod", "Pemberton", "Quennell", "Rookwood", "Satterly", "Thistlewood",
             "Underhill", "Vickery", "Wetherall", "Yardley", "Ashcombe", "Blakemore",
             "Cresswell", "Dalrymple", "Elphick", "Fenwick")

_POSITIVE = {
    "per:date_of_birth": ("{e} was born on {v}.", "{e} was born {v} to a farming family.",
                          "Records show {e} was born on {v}."),
    "per:city_of_birth": ("{e} was born in {v}.", "{e} was born in {v} and raised nearby.",
                          "A native of {v}, {e} moved abroad."),
    "per:religion": ("{e} was a devout {v}.", "{e} converted to become a {v} as a young adult.",
                     "Friends said {e} remained a devout {v}."),
    "per:date_of_death": ("{e} died on {v}.", "{e} died peacefully on {v}.",
                          "Family members said {e} died on {v}."),
}
_DISTRACTORS = (
    "{e} visited {city} on {date}.",
    "{e} gave a lecture in {city} on {date}.",
    "{e} met a {religion} scholar on {date}.",
    "On {date}, {e} opened a gallery in {city}.",
    "{e} wrote to a {religion} charity in {city}.",
)
_FILLER = ("The weather was mild that season.", "Critics praised the new exhibition.",
           "Local newspapers covered the story.", "The museum extended its opening hours.")


def _date_text(d: dt.date) -> str:
    return f"{MONTHS[d.month - 1].capitalize()} {d.day}, {d.year}"


def _random_date(rng: random.Random, lo: int, hi: int) -> dt.date:
    return dt.date(rng.randint(lo, hi), rng.randint(1, 12), rng.randint(1, 28))


@dataclass
class PlantedSlots:
    """Corpus, entity names and the planted single-valued facts."""

    corpus: Corpus
    entities: list[str]
    facts: dict[tuple[str, str], str]  # (entity, slot) -> surface value
    fact_table: list[tuple[str, str, str]] = field(default_factory=list)


def _person_names(rng: random.Random, n: int, offset: int) -> list[str]:
    firsts = sorted(word_list("male_names"))
    return [f"{rng.choice(firsts)} {_SURNAMES[(offset + i) % len(_SURNAMES)]}" for i in range(n)]


def planted_slot_corpus(n_entities: int = 5, docs_per_entity: int = 6, seed: int = 0,
                        name_offset: int = 0, prefix: str = "SF") -> PlantedSlots:
    """Each entity gets every slot planted in several of its documents, plus distractors.

    Distractor sentences pair the entity with other dates, cities and
    religions so distant supervision sees negatives of every value type.
    Some planted sentences use "He" in place of the name.
    """
    rng = random.Random(seed)
    cities = sorted(c for c in word_list("cities") if " " not in c)
    religions = sorted(word_list("religions"))
    names = _person_names(rng, n_entities, name_offset)
    facts: dict[tuple[str, str], str] = {}
    corpus = Corpus()
    for k, e in enumerate(names):
        birth = _random_date(rng, 1920, 1950)
        death = _random_date(rng, 1990, 2010)
        values = {
            "per:date_of_birth": _date_text(birth),
            "per:city_of_birth": rng.choice(cities),
            "per:religion": rng.choice(religions),
            "per:date_of_death": _date_text(death),
        }
        for slot, v in values.items():
            facts[(e, slot)] = v
        for j in range(docs_per_entity):
            sentences = [f"{e} was a well known painter."]
            for slot in SF_SLOTS:
                if rng.random() < 0.6:
                    template = rng.choice(_POSITIVE[slot])
                    subject = "He" if template.startswith("{e}") and rng.random() < 0.25 else e
                    sentences.append(template.format(e=subject, v=values[slot]))
            for _ in range(rng.randint(1, 3)):
                other_date = _random_date(rng, 1955, 1985)
                sentences.append(rng.choice(_DISTRACTORS).format(
                    e=e, city=rng.choice([c for c in cities if c != values["per:city_of_birth"]]),
                    date=_date_text(other_date),
                    religion=rng.choice([r for r in religions if r != values["per:religion"]]),
                ))
            sentences.append(rng.choice(_FILLER))
            head, body = sentences[0], sentences[1:]
            rng.shuffle(body)
            corpus.add(make_document(f"{prefix}{k:02d}{j:02d}", [
                ("HEADLINE", f"Profile of {e}"), ("TEXT", " ".join([head, *body])),
            ]))
    table = [(e, s, v) for (e, s), v in sorted(facts.items())]
    return PlantedSlots(corpus, names, facts, table)


def slot_training_data(seed: int = 1) -> PlantedSlots:
    """Disjoint training population for distant supervision (20 entities)."""
    return planted_slot_corpus(n_entities=20, docs_per_entity=3, seed=seed, name_offset=5, prefix="TR")


# -- entity-linking fixture ---------------------------------------------------------------------------


@dataclass
class LinkingFixture:
    kb: Corpus
    source: Corpus
    dump: list[WikiPage]
    queries: list[ELQuery]
    gold: dict[str, str]  # query_id -> node id or NIL cluster id


def linking_fixture() -> LinkingFixture:
    """Six queries: four resolvable in the KB, two mentions of one unseen entity."""
    nodes = [
        ("E0001", "Michael Jordan", "Michael Jordan is an American basketball player for the Chicago Bulls."),
        ("E0002", "Michael Jordan (statistician)", "Michael Jordan is a professor of statistics at Berkeley."),
        ("E0003", "International Business Machines", "International Business Machines is a computer company in Armonk."),
        ("E0004", "Sheffield", "Sheffield is a city in South Yorkshire, England."),
        ("E0005", "Sheffield Wednesday", "Sheffield Wednesday is a football club based in Sheffield."),
        ("E0006", "Acropolis", "The Acropolis is an ancient citadel above Athens."),
    ]
    kb = Corpus()
    for node_id, title, text in nodes:
        kb.add(make_document(node_id, [("title", title), ("wiki_text", text)]))
    dump = [
        WikiPage(title="International Business Machines",
                 first_para="'''International Business Machines''' ('''IBM''') is a computer company.",
                 infobox=[("name", "International Business Machines")]),
        WikiPage(title="Big Blue", kind="redirect", redirect_to="International Business Machines"),
        WikiPage(title="Sheffield Wednesday", first_para="'''Sheffield Wednesday''' ('''The Owls''') is a club."),
    ]
    docs = {
        "S1": "Michael Jordan scored 40 points for the Chicago Bulls last night.",
        "S2": "Shares of IBM rose after the computer company reported earnings.",
        "S3": "Fans of The Owls travelled to the match.",
        "S4": "The Acropolis attracted record visitors.",
        "S5": "Zephyrine Quarle opened a bakery in Norfolk.",
        "S6": "Local baker Zephyrine Quarle won a prize.",
    }
    source = Corpus()
    for doc_id, text in docs.items():
        source.add(make_document(doc_id, [("TEXT", text)]))
    queries = [
        ELQuery("Q1", "Michael Jordan", "S1"),
        ELQuery("Q2", "IBM", "S2"),
        ELQuery("Q3", "The Owls", "S3"),
        ELQuery("Q4", "Acropolis", "S4"),
        ELQuery("Q5", "Zephyrine Quarle", "S5"),
        ELQuery("Q6", "Zephyrine Quarle", "S6"),
    ]
    gold = {"Q1": "E0001", "Q2": "E0003", "Q3": "E0005", "Q4": "E0006", "Q5": "NIL001", "Q6": "NIL001"}
    return LinkingFixture(kb, source, dump, queries, gold)


def document(doc_id: str, text: str) -> Document:
    return make_document(doc_id, [("TEXT", text)])


# -- on-disk fixtures -------------------------------------------------------------------------------


def write_markup(docs, path: Path) -> Path:
    """Write documents as concatenated ``<DOC>`` blocks, one element per field."""
    blocks = []
    for doc in docs:
        inner = "\n".join(f"<{f.name}>{f.text}</{f.name}>" for f in doc.fields)
        blocks.append(f'<DOC id="{doc.doc_id}">\n{inner}\n</DOC>\n')
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(blocks), encoding="utf-8")
    return path


def write_linking_fixture(root: Path) -> dict[str, Path]:
    """Lay out the linking fixture as corpus directories, a dump, queries and gold."""
    fx = linking_fixture()
    paths = {
        "kb_dir": root / "kb", "source_dir": root / "source", "dump": root / "dump.jsonl",
        "queries": root / "queries.jsonl", "gold": root / "gold.tsv",
    }
    write_markup(fx.kb, paths["kb_dir"] / "kb.xml")
    write_markup(fx.source, paths["source_dir"] / "source.sgm")
    paths["dump"].write_text("".join(json.dumps(asdict(p)) + "\n" for p in fx.dump), encoding="utf-8")
    paths["queries"].write_text("".join(
        json.dumps({"query_id": q.query_id, "mention": q.mention, "doc_id": q.doc_id}) + "\n"
        for q in fx.queries), encoding="utf-8")
    paths["gold"].write_text("".join(f"{q}\t{g}\n" for q, g in fx.gold.items()), encoding="utf-8")
    return paths
