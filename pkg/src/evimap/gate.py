"""RCT gate: keep only documents classified as randomized-trial reports."""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Document

RCT_CLASSES = ("non_rct", "rct")


@dataclass(frozen=True)
class GateDecision:
    doc_id: str
    probability: float
    is_rct: bool
    threshold_used: float

    def __post_init__(self):
        if not (0.0 <= self.threshold_used <= 1.0):
            raise ValueError(f"threshold {self.threshold_used} outside [0, 1]")
        if self.is_rct != (self.probability >= self.threshold_used):
            raise ValueError("is_rct inconsistent with probability/threshold")


def gate(doc: Document, classifier, threshold: float = 0.5) -> GateDecision:
    """Classify [title, abstract]; the >= rule admits boundary probabilities."""
    probs = classifier.predict([doc.title, doc.abstract])
    p_rct = float(probs[list(classifier.classes).index("rct")])
    return GateDecision(
        doc_id=doc.doc_id,
        probability=p_rct,
        is_rct=p_rct >= threshold,
        threshold_used=threshold,
    )
