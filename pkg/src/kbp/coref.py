"""Restricted coreference: only anaphors that may refer to the target entity."""

from __future__ import annotations

from dataclasses import dataclass, field

from .naive_bayes import NaiveBayesModel, classify_nb, train_nb
from .resources import word_list
from .tagger import HONORIFICS_FEMALE, HONORIFICS_MALE, TaggedDocument, TaggedMention

MALE_PRONOUNS = ("he", "his")
FEMALE_PRONOUNS = ("she", "her")


def name_features(name: str) -> list[str]:
    name = name.strip().lower()
    if not name:
        raise ValueError("empty name")
    second = name[-2] if len(name) > 1 else "<none>"
    return [f"last={name[-1]}", f"second_last={second}"]


@dataclass
class GenderModel:
    model: NaiveBayesModel
    # Training names with a single gender; these bypass the suffix classifier.
    known: dict[str, str] = field(default_factory=dict)

    def classify(self, first_name: str) -> str:
        hit = self.known.get(first_name.strip().lower())
        if hit:
            return hit
        return classify_nb(self.model, name_features(first_name))[0]

    def posterior(self, first_name: str) -> dict[str, float]:
        return self.model.posterior(name_features(first_name))


def train_gender(male: list[str] | None = None, female: list[str] | None = None) -> GenderModel:
    """Fit on name lists (defaults to the shipped lists)."""
    male = list(word_list("male_names")) if male is None else male
    female = list(word_list("female_names")) if female is None else female
    data = [(name_features(n), "male") for n in male] + [(name_features(n), "female") for n in female]
    m_set, f_set = {n.lower() for n in male}, {n.lower() for n in female}
    known = {n: "male" for n in m_set - f_set} | {n: "female" for n in f_set - m_set}
    return GenderModel(train_nb(data), known)


def classify_gender(first_name: str, model: GenderModel) -> str:
    if not first_name or not first_name.strip():
        raise ValueError("empty name")
    return model.classify(first_name)


def mention_gender(m: TaggedMention, model: GenderModel | None) -> str | None:
    """Gender of a PER mention from its honorific or first token; None if unknown."""
    first = m.surface.split()[0] if m.surface.split() else ""
    if first.lower() in HONORIFICS_MALE:
        return "male"
    if first.lower() in HONORIFICS_FEMALE:
        return "female"
    if model is None or not first.isalpha():
        return None
    return model.classify(first)


def anaphor_words(target_type: str, gender: str | None) -> frozenset[str]:
    if target_type == "PER":
        if gender == "male":
            return frozenset(MALE_PRONOUNS)
        if gender == "female":
            return frozenset(FEMALE_PRONOUNS)
        return frozenset(MALE_PRONOUNS + FEMALE_PRONOUNS)
    if target_type == "ORG":
        return frozenset({"it"}) | frozenset(word_list("org_nouns"))
    return frozenset()


def resolve_coreference(tagged: TaggedDocument, target_type: str, gender: str | None = None,
                        gender_model: GenderModel | None = None) -> list[TaggedMention]:
    """Anaphors resolved to the target, as new ``is_target`` mentions.

    An anaphor resolves when the closest preceding mention of the target type
    (gender-compatible for PER), or an already-resolved anaphor, is the target.
    """
    words = anaphor_words(target_type, gender)
    if not words:
        return []
    events = []  # (sentence, offset, kind, payload)
    for m in tagged.mentions:
        events.append((m.sentence_index, m.span[0], 0, m))
    for sent in tagged.sentences:
        covered = [m.span for m in tagged.sentence_mentions(sent.index)]
        for tok in sent.tokens:
            if tok.text.lower() in words and not any(s < tok.end and e > tok.start for s, e in covered):
                events.append((sent.index, tok.start, 1, (sent, tok)))
    events.sort(key=lambda e: (e[0], e[1], e[2]))

    resolved = []
    last_is_target = False
    for sent_index, _, kind, payload in events:
        if kind == 0:
            m = payload
            if m.is_target:
                last_is_target = True
            elif m.etype == target_type and _compatible(m, gender, gender_model):
                last_is_target = False
            continue
        sent, tok = payload
        if last_is_target:
            resolved.append(TaggedMention(
                tagged.doc.doc_id, sent_index, sent.field_index, (tok.start, tok.end),
                tok.text, target_type, True,
            ))
    return resolved


def _compatible(m: TaggedMention, gender: str | None, model: GenderModel | None) -> bool:
    if m.etype != "PER" or gender is None:
        return True
    g = mention_gender(m, model)
    return g is None or g == gender


def apply_coreference(tagged: TaggedDocument, target_type: str, gender: str | None = None,
                      gender_model: GenderModel | None = None) -> TaggedDocument:
    """Copy of ``tagged`` with resolved anaphors merged into its mentions."""
    extra = resolve_coreference(tagged, target_type, gender, gender_model)
    mentions = sorted(tagged.mentions + extra, key=lambda m: (m.sentence_index, m.span[0]))
    return TaggedDocument(tagged.doc, tagged.sentences, mentions)
