"""Metric computations for every report the system produces: token and
entity PICO scores, evidence-sentence scores, per-class directionality
scores, strict/relaxed concept scores, and over/under-prediction tallies.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .corpus import DIRECTIONS, Document, PICO_LABELS
from .ontology import Ontology

_WORD = re.compile(r"\w+")


@dataclass(frozen=True)
class PRF:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, tp: int, fp: int, fn: int) -> "PRF":
        p = tp / (tp + fp) if tp + fp else 0.0
        r = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * p * r / (p + r) if p + r else 0.0
        return cls(tp=tp, fp=fp, fn=fn, precision=p, recall=r, f1=f1)

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
        }


def _covered(token_span, spans) -> bool:
    start, end = token_span
    return any(s.start < end and start < s.end for s in spans)


def token_prf(pred_spans, gold_spans, doc: Document, label: str) -> PRF:
    """Word tokens of the abstract, scored by span coverage for one label."""
    pred = [s.span for s in pred_spans if s.label == label]
    gold = [s.span for s in gold_spans if s.label == label]
    tp = fp = fn = 0
    for m in _WORD.finditer(doc.abstract):
        token = m.span()
        in_pred = _covered(token, pred)
        in_gold = _covered(token, gold)
        if in_pred and in_gold:
            tp += 1
        elif in_pred:
            fp += 1
        elif in_gold:
            fn += 1
    return PRF.from_counts(tp, fp, fn)


def entity_prf(pred_entities, gold_entities, label: str) -> PRF:
    """Lenient entity matching: overlap of same-label spans, each gold used once."""
    pred = [s for s in pred_entities if s.label == label]
    gold = [s for s in gold_entities if s.label == label]
    unmatched = list(range(len(gold)))
    tp = 0
    for p in sorted(pred, key=lambda s: (s.span.start, s.span.end)):
        hit = next((i for i in unmatched if gold[i].span.overlaps(p.span)), None)
        if hit is not None:
            unmatched.remove(hit)
            tp += 1
    return PRF.from_counts(tp, len(pred) - tp, len(unmatched))


def macro_average(per_label: dict[str, PRF]) -> dict:
    n = len(per_label)
    return {
        "precision": sum(m.precision for m in per_label.values()) / n if n else 0.0,
        "recall": sum(m.recall for m in per_label.values()) / n if n else 0.0,
        "f1": sum(m.f1 for m in per_label.values()) / n if n else 0.0,
    }


def sentence_prf(pred_indices, gold_indices) -> PRF:
    pred, gold = set(pred_indices), set(gold_indices)
    tp = len(pred & gold)
    return PRF.from_counts(tp, len(pred - gold), len(gold - pred))


def _triplet_key(doc_id, t):
    return (
        doc_id,
        t.intervention.span.start if hasattr(t.intervention, "span") else t.intervention.start,
        t.comparator.span.start if hasattr(t.comparator, "span") else t.comparator.start,
        t.outcome.span.start if hasattr(t.outcome, "span") else t.outcome.start,
        t.evidence_sentence_index,
    )


def _spans_of(t):
    def span(x):
        return x.span if hasattr(x, "span") else x

    return span(t.intervention), span(t.comparator), span(t.outcome)


def per_class_direction_scores(pred_triplets, gold_triplets, mode: str = "gold_prompts") -> dict[str, PRF]:
    """Per-direction PRF over (doc, triplet) pairs.

    gold_prompts: predictions are directions for gold tuples, matched by
    exact span identity.  predicted_prompts: a prediction matches an unused
    gold triplet when all three spans overlap and the evidence index agrees.
    """
    if mode not in ("gold_prompts", "predicted_prompts"):
        raise ValueError(f"unknown mode {mode!r}")
    pairs = []  # (gold_direction, pred_direction)
    unmatched_pred = []
    gold_pool = list(gold_triplets)  # (doc_id, triplet)

    for doc_id, pred in pred_triplets:
        match = None
        for item in gold_pool:
            g_doc, g = item
            if g_doc != doc_id or g.evidence_sentence_index != pred.evidence_sentence_index:
                continue
            if mode == "gold_prompts":
                if _triplet_key(doc_id, pred) == _triplet_key(g_doc, g):
                    match = item
                    break
            else:
                pi, pc, po = _spans_of(pred)
                gi, gc, go = _spans_of(g)
                if pi.overlaps(gi) and pc.overlaps(gc) and po.overlaps(go):
                    match = item
                    break
        if match is None:
            unmatched_pred.append(pred)
        else:
            gold_pool.remove(match)
            pairs.append((match[1].direction, pred.direction))

    scores = {}
    for direction in DIRECTIONS:
        tp = sum(1 for g, p in pairs if g == direction and p == direction)
        fp = sum(1 for g, p in pairs if g != direction and p == direction)
        fp += sum(1 for p in unmatched_pred if p.direction == direction)
        fn = sum(1 for g, p in pairs if g == direction and p != direction)
        fn += sum(1 for _, g in gold_pool if g.direction == direction)
        scores[direction] = PRF.from_counts(tp, fp, fn)
    return scores


@dataclass
class ErrorTally:
    false_negatives: list[tuple[str, int]] = field(default_factory=list)
    false_positives: list[tuple[str, int]] = field(default_factory=list)


def _max_matching(pred: list[str], gold: list[str], ontology: Ontology) -> dict[int, int]:
    """Maximum bipartite matching under relaxed equality (augmenting paths).

    Returns gold index -> pred index for the matched pairs."""
    match_of_gold: dict[int, int] = {}

    def augment(p: int, visited: set[int]) -> bool:
        for g in range(len(gold)):
            if g in visited or not ontology.relaxed_equal(pred[p], gold[g]):
                continue
            visited.add(g)
            if g not in match_of_gold or augment(match_of_gold[g], visited):
                match_of_gold[g] = p
                return True
        return False

    for p in range(len(pred)):
        augment(p, set())
    return match_of_gold


def concept_eval(
    pred_by_doc: dict[str, set[str]],
    gold_by_doc: dict[str, set[str]],
    ontology: Ontology,
    relaxed: bool = False,
    top_k: int = 10,
) -> tuple[PRF, ErrorTally, float, float]:
    """Micro-averaged concept PRF over documents, plus the FP/FN tallies and
    average predicted/gold set sizes.

    Relaxed mode matches exact ids first, then pairs remaining predictions
    with remaining gold concepts one parent/child hop away via a maximum
    bipartite matching, so no valid pairing is left on the table.
    """
    tp = fp = fn = 0
    fn_counts: dict[str, int] = {}
    fp_counts: dict[str, int] = {}
    doc_ids = sorted(set(pred_by_doc) | set(gold_by_doc))
    for doc_id in doc_ids:
        pred = set(pred_by_doc.get(doc_id, set()))
        gold = set(gold_by_doc.get(doc_id, set()))
        exact = pred & gold
        rest_pred = sorted(pred - exact)
        rest_gold = sorted(gold - exact)
        matched = len(exact)
        if relaxed:
            pairing = _max_matching(rest_pred, rest_gold, ontology)
            matched += len(pairing)
            matched_pred = set(pairing.values())
            matched_gold = set(pairing)
            rest_pred = [p for i, p in enumerate(rest_pred) if i not in matched_pred]
            rest_gold = [g for i, g in enumerate(rest_gold) if i not in matched_gold]
        tp += matched
        fp += len(rest_pred)
        fn += len(rest_gold)
        for cid in rest_gold:
            fn_counts[ontology.name(cid)] = fn_counts.get(ontology.name(cid), 0) + 1
        for cid in rest_pred:
            fp_counts[ontology.name(cid)] = fp_counts.get(ontology.name(cid), 0) + 1

    n = len(doc_ids)
    avg_pred = sum(len(pred_by_doc.get(d, set())) for d in doc_ids) / n if n else 0.0
    avg_gold = sum(len(gold_by_doc.get(d, set())) for d in doc_ids) / n if n else 0.0
    tally = ErrorTally(
        false_negatives=sorted(fn_counts.items(), key=lambda kv: (-kv[1], kv[0]))[:top_k],
        false_positives=sorted(fp_counts.items(), key=lambda kv: (-kv[1], kv[0]))[:top_k],
    )
    return PRF.from_counts(tp, fp, fn), tally, avg_pred, avg_gold


def pico_report(pred_by_doc, gold_by_doc, docs: dict[str, Document]) -> dict:
    """Table-style PICO block: per-label token and entity rows plus macro rows."""
    token_scores = {}
    entity_scores = {}
    for label in PICO_LABELS:
        tp = fp = fn = 0
        etp = efp = efn = 0
        for doc_id, doc in docs.items():
            pred = pred_by_doc.get(doc_id, [])
            gold = gold_by_doc.get(doc_id, [])
            t = token_prf(pred, gold, doc, label)
            tp, fp, fn = tp + t.tp, fp + t.fp, fn + t.fn
            e = entity_prf(pred, gold, label)
            etp, efp, efn = etp + e.tp, efp + e.fp, efn + e.fn
        token_scores[label] = PRF.from_counts(tp, fp, fn)
        entity_scores[label] = PRF.from_counts(etp, efp, efn)
    return {
        "token": {label: m.to_dict() for label, m in token_scores.items()},
        "entity": {label: m.to_dict() for label, m in entity_scores.items()},
        "macro_token": macro_average(token_scores),
        "macro_entity": macro_average(entity_scores),
    }
