"""Multinomial Naive Bayes over sets of binary features, add-one smoothed.

Each instance is a set of feature strings. For class ``c`` with ``n_c``
feature occurrences in training and vocabulary ``V``::

    P(f | c) = (count(f, c) + 1) / (n_c + |V|)

Features never seen in training get the same smoothed estimate with a zero
count, so they are harmless rather than fatal.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Hashable, Iterable


@dataclass
class NaiveBayesModel:
    log_priors: dict[Hashable, float]
    feature_counts: dict[Hashable, dict[str, int]]
    class_totals: dict[Hashable, int]
    vocabulary: frozenset[str]

    @property
    def labels(self) -> list:
        return sorted(self.log_priors, key=repr)

    def log_likelihood(self, feature: str, label) -> float:
        count = self.feature_counts[label].get(feature, 0)
        return math.log((count + 1) / (self.class_totals[label] + len(self.vocabulary)))

    def joint_log(self, features: Iterable[str]) -> dict:
        # Features never seen in training carry no evidence for any label.
        feats = sorted(set(features) & self.vocabulary)
        return {c: self.log_priors[c] + sum(self.log_likelihood(f, c) for f in feats)
                for c in self.labels}

    def posterior(self, features: Iterable[str]) -> dict:
        joint = self.joint_log(features)
        top = max(joint.values())
        z = sum(math.exp(v - top) for v in joint.values())
        return {c: math.exp(v - top) / z for c, v in joint.items()}

    def to_json(self) -> dict:
        return {
            "labels": [json.dumps(c) for c in self.labels],
            "log_priors": [self.log_priors[c] for c in self.labels],
            "class_totals": [self.class_totals[c] for c in self.labels],
            "feature_counts": [dict(sorted(self.feature_counts[c].items())) for c in self.labels],
            "vocabulary": sorted(self.vocabulary),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "NaiveBayesModel":
        labels = [json.loads(c) for c in obj["labels"]]
        return cls(
            log_priors=dict(zip(labels, obj["log_priors"])),
            feature_counts={c: dict(fc) for c, fc in zip(labels, obj["feature_counts"])},
            class_totals=dict(zip(labels, obj["class_totals"])),
            vocabulary=frozenset(obj["vocabulary"]),
        )

    def save(self, path: Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1, sort_keys=True), encoding="utf-8")

    @classmethod
    def load(cls, path: Path) -> "NaiveBayesModel":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def train_nb(instances: Iterable[tuple[Iterable[str], Hashable]], min_labels: int = 2) -> NaiveBayesModel:
    """Fit on ``(features, label)`` pairs; at least ``min_labels`` distinct labels required."""
    label_counts: Counter = Counter()
    feature_counts: dict = {}
    for feats, label in instances:
        label_counts[label] += 1
        fc = feature_counts.setdefault(label, Counter())
        fc.update(set(feats))
    if len(label_counts) < min_labels:
        raise ValueError(f"training data has {len(label_counts)} label(s); need {min_labels}")
    n = sum(label_counts.values())
    vocab = frozenset(f for fc in feature_counts.values() for f in fc)
    return NaiveBayesModel(
        log_priors={c: math.log(k / n) for c, k in label_counts.items()},
        feature_counts={c: dict(fc) for c, fc in feature_counts.items()},
        class_totals={c: sum(fc.values()) for c, fc in feature_counts.items()},
        vocabulary=vocab,
    )


def classify_nb(model: NaiveBayesModel, features: Iterable[str]) -> tuple[Hashable, float]:
    """Most probable label and its posterior; ties go to the earlier label in sort order."""
    post = model.posterior(features)
    label = max(model.labels, key=lambda c: post[c])
    return label, post[label]
