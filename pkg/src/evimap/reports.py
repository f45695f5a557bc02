"""Evaluation report assembly: reads prediction and gold files and emits
structured reports mirroring the system's score tables (PICO token/entity
block, evidence row, per-direction rows, strict/relaxed concept block with
average term counts and the top-10 over/under-prediction tally)."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .corpus import Document, GoldAnnotations, TokenSpan, load_gold, read_feed
from .metrics import (
    concept_eval,
    per_class_direction_scores,
    pico_report,
    sentence_prf,
)
from .ontology import Ontology
from .tagger import PicoSpan


def _read_jsonl(path: str | Path) -> list[dict]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            out.append(json.loads(line))
    return out


def load_documents(feed_path: str | Path) -> dict[str, Document]:
    docs = {}
    for _lineno, item in read_feed(feed_path):
        if isinstance(item, Document):
            docs[item.doc_id] = item
    return docs


def _pred_spans(doc: Document, raw_spans: list[dict]) -> list[PicoSpan]:
    spans = []
    for s in raw_spans:
        spans.append(
            PicoSpan(
                label=s["label"],
                span=TokenSpan.of(doc.abstract, s["start"], s["end"]),
                confidence=s.get("confidence", 1.0),
                source=s.get("source", "model"),
            )
        )
    return spans


def _gold_spans(gold: GoldAnnotations) -> list[PicoSpan]:
    return [PicoSpan(label=label, span=span, source="gold") for label, span in gold.pico_spans]


def pico_eval_report(pred_path, gold_path, feed_path) -> dict:
    docs = load_documents(feed_path)
    gold = load_gold(gold_path, docs)
    preds = {r["doc_id"]: r for r in _read_jsonl(pred_path)}
    doc_ids = sorted(set(gold) & set(docs))
    pred_by_doc = {d: _pred_spans(docs[d], preds.get(d, {}).get("spans", [])) for d in doc_ids}
    gold_by_doc = {d: _gold_spans(gold[d]) for d in doc_ids}
    report = pico_report(pred_by_doc, gold_by_doc, {d: docs[d] for d in doc_ids})
    report["n_documents"] = len(doc_ids)
    return {"task": "pico", **report}


def evidence_eval_report(pred_path, gold_path, feed_path) -> dict:
    docs = load_documents(feed_path)
    gold = load_gold(gold_path, docs)
    preds = {r["doc_id"]: set(r.get("sentence_indices", [])) for r in _read_jsonl(pred_path)}
    all_pred = {(d, i) for d, idxs in preds.items() for i in idxs}
    all_gold = {(d, i) for d, g in gold.items() for i in g.evidence_sentence_indices}
    prf = sentence_prf(all_pred, all_gold)
    return {"task": "evidence", "evidence_sentences": prf.to_dict()}


@dataclass(frozen=True)
class _PredTriplet:
    intervention: TokenSpan
    comparator: TokenSpan
    outcome: TokenSpan
    evidence_sentence_index: int
    direction: str


def direction_eval_report(pred_path, gold_path, feed_path, mode: str = "gold_prompts") -> dict:
    docs = load_documents(feed_path)
    gold = load_gold(gold_path, docs)
    pred_triplets = []
    for record in _read_jsonl(pred_path):
        doc = docs[record["doc_id"]]
        for t in record.get("triplets", []):
            pred_triplets.append(
                (
                    record["doc_id"],
                    _PredTriplet(
                        intervention=TokenSpan.of(doc.abstract, t["intervention"]["start"], t["intervention"]["end"]),
                        comparator=TokenSpan.of(doc.abstract, t["comparator"]["start"], t["comparator"]["end"]),
                        outcome=TokenSpan.of(doc.abstract, t["outcome"]["start"], t["outcome"]["end"]),
                        evidence_sentence_index=t["evidence_sentence_index"],
                        direction=t["direction"],
                    ),
                )
            )
    gold_triplets = [(d, t) for d, g in gold.items() for t in g.triplets]
    scores = per_class_direction_scores(pred_triplets, gold_triplets, mode)
    return {
        "task": "direction",
        "mode": mode,
        "per_class": {direction: prf.to_dict() for direction, prf in scores.items()},
    }


def concepts_eval_report(pred_path, gold_path, feed_path, ontology: Ontology,
                         relaxed: bool = False) -> dict:
    docs = load_documents(feed_path)
    gold = load_gold(gold_path, docs)
    pred_by_doc = {r["doc_id"]: set(r.get("concept_ids", [])) for r in _read_jsonl(pred_path)}
    gold_by_doc = {d: set(g.concept_ids) for d, g in gold.items()}

    blocks = {}
    for name, is_relaxed in (("strict", False), ("relaxed", True)):
        if is_relaxed and not relaxed:
            continue
        prf, tally, avg_pred, avg_gold = concept_eval(
            pred_by_doc, gold_by_doc, ontology, relaxed=is_relaxed
        )
        blocks[name] = {
            **prf.to_dict(),
            "avg_predicted_terms": avg_pred,
            "avg_gold_terms": avg_gold,
            "top_under_predicted": [
                {"preferred_name": n, "count": c} for n, c in tally.false_negatives
            ],
            "top_over_predicted": [
                {"preferred_name": n, "count": c} for n, c in tally.false_positives
            ],
        }
    return {"task": "concepts", **blocks}


def write_report(report: dict, path: str | Path):
    Path(path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
