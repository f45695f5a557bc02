"""Gold-backed oracle classifiers.

These satisfy the backend predict contract but answer from gold annotations,
so assembly and aggregation logic can be tested independently of model
quality.
"""

from __future__ import annotations

import numpy as np

from .corpus import DIRECTIONS, GoldAnnotations
from .extractor import ROLE_CLASSES
from .normalize import normalize_text


class GoldRoleOracle:
    """Role classifier that recognizes gold interventions and comparators.

    Input segments are [treatment, evidence, context]; the treatment text is
    compared (normalized) against the gold triplets whose evidence sentence
    matches the evidence segment."""

    classes = ROLE_CLASSES

    def __init__(self, corpus):
        # (normalized evidence text, normalized treatment text) -> role
        self.roles: dict[tuple[str, str], str] = {}
        for doc, gold in corpus:
            for triplet in gold.triplets:
                ev = normalize_text(doc.sentences[triplet.evidence_sentence_index].text)
                self.roles[(ev, normalize_text(triplet.intervention.text))] = "intervention"
                self.roles[(ev, normalize_text(triplet.comparator.text))] = "comparator"

    def predict(self, segments) -> np.ndarray:
        treatment, evidence = normalize_text(segments[0]), normalize_text(segments[1])
        role = self.roles.get((evidence, treatment), "not_involved")
        probs = np.zeros(len(self.classes))
        probs[self.classes.index(role)] = 1.0
        return probs


class GoldDirectionOracle:
    """Directionality classifier keyed on (outcome text, evidence text)."""

    classes = DIRECTIONS

    def __init__(self, corpus):
        self.directions: dict[tuple[str, str], str] = {}
        for doc, gold in corpus:
            for triplet in gold.triplets:
                ev = normalize_text(doc.sentences[triplet.evidence_sentence_index].text)
                self.directions[(ev, normalize_text(triplet.outcome.text))] = triplet.direction

    def predict(self, segments) -> np.ndarray:
        outcome, evidence = normalize_text(segments[0]), normalize_text(segments[1])
        probs = np.zeros(len(self.classes))
        direction = self.directions.get((evidence, outcome))
        if direction is None:
            probs[:] = 1.0 / len(self.classes)
        else:
            probs[self.classes.index(direction)] = 1.0
        return probs
