"""Distant-supervision slot filling: training data, features, classification, selection."""

from __future__ import annotations

import json
import logging
import re
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .coref import GenderModel, apply_coreference, classify_gender
from .corpus import Document
from .dates import normalize_date_expression
from .index import InvertedIndex, RetrievalConfig, search_documents, search_passages
from .naive_bayes import NaiveBayesModel, classify_nb, train_nb
from .resources import json_table
from .tagger import Sentence, TaggedDocument, TaggedMention, Tagger, tag_document
from .variants import SlotKeywordTable, VariantDictionary, formulate_sf_query

log = logging.getLogger(__name__)

FEATURES = ("bag_of_words", "window_words", "bigrams", "token_distance", "entity_in_between", "target_first")
WINDOW_MARGIN = 2
COUNT_THRESHOLD = 3  # counts strictly above this switch ranking to occurrence counts


@dataclass(frozen=True)
class SlotSpec:
    name: str
    types: tuple[str, ...]
    list_valued: bool

    @property
    def max_values(self) -> int:
        return 3 if self.list_valued else 1


def load_slot_specs(path: Path | None = None) -> dict[str, SlotSpec]:
    table = json.loads(Path(path).read_text(encoding="utf-8")) if path else json_table("slot_types")
    return {k: SlotSpec(k, tuple(v["types"]), bool(v["list"])) for k, v in table.items()}


def infobox_facts(facts: Iterable[tuple[str, str, str]], mapping: dict[str, str] | None = None):
    """Map ``(entity, infobox_attribute, value)`` to ``(entity, slot, value)``; unmapped are dropped."""
    mapping = mapping if mapping is not None else json_table("infobox_slots")
    for entity, attr, value in facts:
        slot = mapping.get(attr)
        if slot:
            yield entity, slot, value


def normalize_value(value: str) -> str:
    """Grouping key: case- and whitespace-insensitive, dates as ISO when parseable."""
    iso = normalize_date_expression(value)
    if iso:
        return iso
    return " ".join(value.lower().split())


@dataclass
class RelationInstance:
    doc_id: str
    slot: str
    sentence: Sentence
    mentions: list[TaggedMention]  # every mention in the sentence
    target: TaggedMention
    value: TaggedMention
    label: bool | None = None


@dataclass(frozen=True)
class FeatureVector:
    bag_of_words: frozenset[str] = frozenset()
    window_words: frozenset[str] = frozenset()
    bigrams: frozenset[str] = frozenset()
    token_distance: str | None = None  # short | medium | long
    entity_in_between: bool | None = None
    target_first: bool | None = None

    def as_features(self) -> set[str]:
        out = {f"bow={w}" for w in self.bag_of_words}
        out |= {f"win={w}" for w in self.window_words}
        out |= {f"bi={b}" for b in self.bigrams}
        if self.token_distance is not None:
            out.add(f"dist={self.token_distance}")
        if self.entity_in_between is not None:
            out.add(f"between={int(self.entity_in_between)}")
        if self.target_first is not None:
            out.add(f"target_first={int(self.target_first)}")
        return out


def distance_bucket(n_tokens: int) -> str:
    if n_tokens <= 3:
        return "short"
    if n_tokens <= 6:
        return "medium"
    return "long"


def extract_features(inst: RelationInstance, enabled: Iterable[str] = FEATURES) -> FeatureVector:
    enabled = set(enabled)
    unknown = enabled - set(FEATURES)
    if unknown:
        raise ValueError(f"unknown features: {sorted(unknown)}")
    sent = inst.sentence
    toks = sent.tokens
    entity_tok = [False] * len(toks)
    for m in inst.mentions:
        i, j = sent.token_range(m.span)
        for k in range(i, j):
            entity_tok[k] = True

    def plain(k: int) -> bool:
        return toks[k].is_word and not entity_tok[k]

    t_i, t_j = sent.token_range(inst.target.span)
    v_i, v_j = sent.token_range(inst.value.span)
    target_first = t_i < v_i
    (a_i, a_j), (b_i, b_j) = ((t_i, t_j), (v_i, v_j)) if target_first else ((v_i, v_j), (t_i, t_j))
    lo, hi = a_j, b_i  # tokens strictly between the two mentions

    kw = {}
    if "bag_of_words" in enabled:
        kw["bag_of_words"] = frozenset(toks[k].text.lower() for k in range(len(toks)) if plain(k))
    if "window_words" in enabled:
        region = range(max(0, a_i - WINDOW_MARGIN), min(len(toks), b_j + WINDOW_MARGIN))
        kw["window_words"] = frozenset(
            toks[k].text.lower() for k in region
            if plain(k) and (k < a_i or lo <= k < hi or k >= b_j)
        )
    if "bigrams" in enabled:
        kw["bigrams"] = frozenset(
            f"{toks[k].text.lower()}_{toks[k + 1].text.lower()}"
            for k in range(len(toks) - 1) if plain(k) and plain(k + 1)
        )
    if "token_distance" in enabled:
        kw["token_distance"] = distance_bucket(sum(1 for k in range(lo, hi) if toks[k].is_word))
    if "entity_in_between" in enabled:
        kw["entity_in_between"] = any(
            m is not inst.value and m is not inst.target and m.etype == inst.value.etype
            and lo <= sent.token_range(m.span)[0] < hi
            for m in inst.mentions
        )
    if "target_first" in enabled:
        kw["target_first"] = target_first
    return FeatureVector(**kw)


def candidate_instances(tagged: TaggedDocument, slot: SlotSpec) -> list[RelationInstance]:
    """Every (target mention, value-typed mention) pair sharing a sentence."""
    out = []
    by_sentence = defaultdict(list)
    for m in tagged.mentions:
        by_sentence[m.sentence_index].append(m)
    for sent in tagged.sentences:
        ms = by_sentence.get(sent.index, [])
        targets = [m for m in ms if m.is_target]
        values = [m for m in ms if not m.is_target and m.etype in slot.types]
        for t in targets:
            for v in values:
                out.append(RelationInstance(tagged.doc.doc_id, slot.name, sent, ms, t, v))
    return out


def generate_training(kb_facts: Iterable[tuple[str, str, str]], documents: Iterable[Document],
                      slot_specs: dict[str, SlotSpec] | None = None, entity_types: dict[str, str] | None = None,
                      dictionary: VariantDictionary | None = None,
                      tagger: Tagger | None = None) -> list[RelationInstance]:
    """Distant-supervision instances.

    Positive: the value mention equals a known value for (entity, slot).
    Negative: a mention of the slot's type that matches none of them.
    """
    slot_specs = slot_specs or load_slot_specs()
    entity_types = entity_types or {}
    known: dict[str, dict[str, set[str]]] = defaultdict(lambda: defaultdict(set))
    for entity, slot, value in kb_facts:
        if slot not in slot_specs:
            log.warning("no slot spec for %s; fact skipped", slot)
            continue
        known[entity][slot].add(normalize_value(value))
    out = []
    for doc in documents:
        body = "\n".join(f.text for f in doc.fields)
        for entity in sorted(known):
            variants = dictionary.variants_of(entity) if dictionary else set()
            if not any(n in body for n in {entity, *variants}):
                continue
            tagged = tag_document(doc, entity, variants, entity_types.get(entity, "PER"), tagger)
            for slot in sorted(known[entity]):
                values = known[entity][slot]
                for inst in candidate_instances(tagged, slot_specs[slot]):
                    inst.label = normalize_value(inst.value.surface) in values
                    out.append(inst)
    return out


def train_slot_models(instances: Iterable[RelationInstance],
                      enabled: Iterable[str] = FEATURES) -> dict[str, NaiveBayesModel]:
    """One binary model per slot; slots lacking either label are skipped."""
    enabled = tuple(enabled)
    by_slot = defaultdict(list)
    for inst in instances:
        by_slot[inst.slot].append((extract_features(inst, enabled).as_features(), bool(inst.label)))
    models = {}
    for slot, data in sorted(by_slot.items()):
        try:
            models[slot] = train_nb(data)
        except ValueError:
            log.warning("slot %s has a single label in training data; no model", slot)
    return models


def save_slot_models(models: dict[str, NaiveBayesModel], out_dir: Path, enabled: Iterable[str] = FEATURES) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {"features": list(enabled), "slots": {}}
    for slot, model in sorted(models.items()):
        fname = re.sub(r"[^\w.-]", "_", slot) + ".json"
        model.save(out_dir / fname)
        manifest["slots"][slot] = fname
    (out_dir / "models.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


def load_slot_models(in_dir: Path) -> tuple[dict[str, NaiveBayesModel], tuple[str, ...]]:
    in_dir = Path(in_dir)
    manifest = json.loads((in_dir / "models.json").read_text(encoding="utf-8"))
    models = {slot: NaiveBayesModel.load(in_dir / fname) for slot, fname in manifest["slots"].items()}
    return models, tuple(manifest["features"])


# -- selection -----------------------------------------------------------------


@dataclass(frozen=True)
class Candidate:
    value: str
    confidence: float
    doc_id: str = ""


@dataclass
class SlotAnswer:
    entity: str
    slot: str
    values: list[tuple[str, str, float]] = field(default_factory=list)  # (value, doc_id, confidence)
    error: str | None = None


def select_slot_values(candidates: Iterable[Candidate], slot: SlotSpec, entity: str = "") -> SlotAnswer:
    """Group by normalised value, rank by count if any count exceeds 3, else by confidence."""
    groups: dict[str, list[Candidate]] = {}
    for c in candidates:
        groups.setdefault(normalize_value(c.value), []).append(c)
    if not groups:
        return SlotAnswer(entity, slot.name)
    by_count = any(len(g) > COUNT_THRESHOLD for g in groups.values())

    def best(g: list[Candidate]) -> Candidate:
        return max(g, key=lambda c: (c.confidence, -g.index(c)))

    def rank_key(item):
        key, g = item
        primary = len(g) if by_count else best(g).confidence
        return (-primary, key)

    ranked = sorted(groups.items(), key=rank_key)[:slot.max_values]
    return SlotAnswer(entity, slot.name, [(g[0].value, best(g).doc_id, best(g).confidence) for _, g in ranked])


# -- pipeline --------------------------------------------------------------------


@dataclass
class SlotFillingConfig:
    retrieval: RetrievalConfig = field(default_factory=RetrievalConfig)
    passages: bool = False
    coreference: bool = True
    features: tuple[str, ...] = FEATURES


@dataclass
class SlotFiller:
    index: InvertedIndex
    dictionary: VariantDictionary
    keywords: SlotKeywordTable
    models: dict[str, NaiveBayesModel]
    slot_specs: dict[str, SlotSpec] = field(default_factory=load_slot_specs)
    gender_model: GenderModel | None = None
    tagger: Tagger | None = None
    config: SlotFillingConfig = field(default_factory=SlotFillingConfig)

    def _sources(self, query) -> list[tuple[Document, int | None]]:
        """Retrieved documents, each with the field index to restrict to (passage mode)."""
        rc = self.config.retrieval
        if self.config.passages:
            hits = search_passages(self.index, query, rc)
            return [(self.index.documents[h.target.doc_id], h.target.field_index) for h in hits]
        hits = search_documents(self.index, query, rc.top_n_documents)
        return [(self.index.documents[h.target], None) for h in hits]

    def candidates(self, entity: str, entity_type: str, slot: str) -> list[Candidate]:
        spec = self.slot_specs[slot]
        model = self.models.get(slot)
        if model is None:
            raise KeyError(f"no trained model for slot {slot!r}")
        query = formulate_sf_query(entity, slot, self.dictionary, self.keywords)
        variants = self.dictionary.variants_of(entity)
        gender = None
        if entity_type == "PER" and self.gender_model is not None and entity.split():
            gender = classify_gender(entity.split()[0], self.gender_model)
        out = []
        tagged_cache: dict[str, TaggedDocument] = {}
        for doc, field_index in self._sources(query):
            tagged = tagged_cache.get(doc.doc_id)
            if tagged is None:
                tagged = tag_document(doc, entity, variants, entity_type, self.tagger)
                if self.config.coreference:
                    tagged = apply_coreference(tagged, entity_type, gender, self.gender_model)
                tagged_cache[doc.doc_id] = tagged
            for inst in candidate_instances(tagged, spec):
                if field_index is not None and inst.sentence.field_index != field_index:
                    continue
                label, conf = classify_nb(model, extract_features(inst, self.config.features).as_features())
                if label is True:
                    out.append(Candidate(inst.value.surface, conf, doc.doc_id))
        return out

    def fill_slots(self, entity: str, entity_type: str, slots: Iterable[str]) -> list[SlotAnswer]:
        answers = []
        for slot in slots:
            try:
                spec = self.slot_specs[slot]
                answers.append(select_slot_values(self.candidates(entity, entity_type, slot), spec, entity))
            except Exception as exc:  # per-slot failures are recorded, the run continues
                log.warning("slot %s for %s failed: %s", slot, entity, exc)
                answers.append(SlotAnswer(entity, slot, error=str(exc)))
        return answers


def write_answers_tsv(answers: Iterable[SlotAnswer], path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for a in answers:
            for value, doc_id, _ in a.values:
                fh.write(f"{a.entity}\t{a.slot}\t{doc_id}\t{value}\n")
