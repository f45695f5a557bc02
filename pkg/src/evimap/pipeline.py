"""Batch ingestion pipeline: parse -> abbreviation expansion -> RCT gate ->
PICO tagging -> evidence/ICO extraction -> normalization -> index.

Per-document failures are isolated; re-running an identical feed is a no-op
for documents already processed at the same content hash and pipeline
version.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .abbrev import detect_abbreviations, expand_abbreviations
from .backends import RuleBackend
from .corpus import CorpusError, Document, document_to_record, read_feed
from .evmap import TripletContribution
from .extractor import (
    EVIDENCE_CLASSES,
    ROLE_CLASSES,
    assemble_ico,
    classify_evidence_sentences,
)
from .corpus import DIRECTIONS
from .fixtures import fixture_gazetteer, fixture_ontology
from .gate import RCT_CLASSES, gate
from .normalize import build_dictionary, normalize_document, span_concepts
from .ontology import Ontology
from .store import Store
from .tagger import Gazetteer, GazetteerTagger, tag_spans

log = logging.getLogger(__name__)

PIPELINE_VERSION = "1"


@dataclass
class PipelineConfig:
    gate_threshold: float = 0.5
    evidence_threshold: float = 0.3
    role_threshold: float = 0.5
    pipeline_version: str = PIPELINE_VERSION
    ontology_path: str | None = None
    synonyms_path: str | None = None
    gazetteer_path: str | None = None
    workers: int = 1

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        raw = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in raw.items() if k in known})


class HeuristicRoleBackend:
    """Position-based treatment role baseline.

    Control-arm terms are comparators; a treatment mentioned early in the
    evidence sentence reads as the intervention, late as the comparator."""

    classes = ROLE_CLASSES
    CONTROL_TERMS = ("placebo", "usual care", "standard care", "sham", "control")

    def predict(self, segments) -> np.ndarray:
        import re

        treatment = segments[0].strip().lower()
        evidence = segments[1].lower()
        if treatment in self.CONTROL_TERMS:
            return np.array([0.05, 0.90, 0.05])
        quoted = re.escape(treatment)
        if re.search(rf"(?:compared with|compared to|versus|vs\.?) {quoted}\b", evidence):
            return np.array([0.10, 0.85, 0.05])
        if re.search(rf"between {quoted}\b", evidence):
            return np.array([0.85, 0.10, 0.05])
        if re.search(rf"\band {quoted}\b", evidence):
            return np.array([0.15, 0.75, 0.10])
        pos = evidence.find(treatment)
        if pos >= 0:
            if pos / max(len(evidence), 1) < 0.4:
                return np.array([0.85, 0.10, 0.05])
            return np.array([0.10, 0.85, 0.05])
        if len(segments) > 2 and treatment in segments[2].lower():
            return np.array([0.40, 0.30, 0.30])
        return np.array([0.10, 0.10, 0.80])


def default_rct_classifier() -> RuleBackend:
    return RuleBackend(
        RCT_CLASSES,
        [(r"randomi[sz]ed|randomly assigned|randomly allocated", "rct")],
        default="non_rct",
    )


def default_evidence_classifier() -> RuleBackend:
    return RuleBackend(
        EVIDENCE_CLASSES,
        [(r"significant|did not differ|no difference|was similar", "evidence")],
        default="not_evidence",
    )


def default_direction_classifier() -> RuleBackend:
    return RuleBackend(
        DIRECTIONS,
        [
            (r"no significant difference|did not differ|no difference|was similar", "no_difference"),
            (r"reduc|decreas|lower|fewer|shorter|declin", "decreased"),
            (r"increas|improv|higher|greater|longer|rose", "increased"),
        ],
        default="no_difference",
    )


@dataclass
class Components:
    ontology: Ontology
    gazetteer: Gazetteer
    dictionary: object
    rct_classifier: object
    evidence_classifier: object
    role_classifier: object
    direction_classifier: object

    @classmethod
    def default(cls, config: PipelineConfig | None = None) -> "Components":
        config = config or PipelineConfig()
        if config.ontology_path:
            from .ontology import load_ontology

            ontology = load_ontology(config.ontology_path, config.synonyms_path)
        else:
            ontology = fixture_ontology()
        gazetteer = (
            Gazetteer.load(config.gazetteer_path) if config.gazetteer_path else fixture_gazetteer()
        )
        dictionary, rejected = build_dictionary(ontology)
        for report in rejected:
            log.warning("synonym rejected: %s", report)
        return cls(
            ontology=ontology,
            gazetteer=gazetteer,
            dictionary=dictionary,
            rct_classifier=default_rct_classifier(),
            evidence_classifier=default_evidence_classifier(),
            role_classifier=HeuristicRoleBackend(),
            direction_classifier=default_direction_classifier(),
        )


@dataclass
class IngestReport:
    received: int = 0
    rejected: int = 0
    gated_out: int = 0
    extracted: int = 0
    skipped_unchanged: int = 0
    failed: int = 0
    failure_samples: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "received": self.received,
            "rejected": self.rejected,
            "gated_out": self.gated_out,
            "extracted": self.extracted,
            "skipped_unchanged": self.skipped_unchanged,
            "failed": self.failed,
            "failure_samples": self.failure_samples,
        }


def _span_record(span) -> dict:
    return {"start": span.span.start, "end": span.span.end, "text": span.span.text,
            "label": span.label, "confidence": span.confidence, "source": span.source}


def _plain_span(span) -> dict:
    return {"start": span.span.start, "end": span.span.end, "text": span.span.text}


def process_document(doc: Document, components: Components, config: PipelineConfig) -> tuple[dict, dict]:
    """Run every stage for one parsed document.

    Returns (gate_decision_record, extraction_record_or_None)."""
    pairs = detect_abbreviations(doc)
    expansion = expand_abbreviations(doc, pairs)
    expanded = expansion.document

    decision = gate(expanded, components.rct_classifier, config.gate_threshold)
    decision_record = {
        "doc_id": decision.doc_id,
        "probability": decision.probability,
        "is_rct": decision.is_rct,
        "threshold_used": decision.threshold_used,
    }
    if not decision.is_rct:
        return decision_record, None

    spans = tag_spans(expanded, GazetteerTagger(components.gazetteer))
    evidence = classify_evidence_sentences(
        expanded, components.evidence_classifier, config.evidence_threshold
    )
    triplets, diagnostics = assemble_ico(
        expanded,
        spans,
        evidence,
        components.role_classifier,
        components.direction_classifier,
        config.role_threshold,
    )
    normalized = normalize_document(
        [(s.label, s.span) for s in spans], components.dictionary
    )

    triplet_records = []
    for t in triplets:
        triplet_records.append(
            {
                "intervention": _plain_span(t.intervention),
                "comparator": _plain_span(t.comparator),
                "outcome": _plain_span(t.outcome),
                "evidence_sentence_index": t.evidence_sentence_index,
                "direction": t.direction,
                "direction_probs": list(t.direction_probs),
                "i_concepts": sorted(span_concepts(t.intervention.span, components.dictionary)),
                "o_concepts": sorted(span_concepts(t.outcome.span, components.dictionary)),
            }
        )
    extraction = {
        "doc_id": doc.doc_id,
        "pipeline_version": config.pipeline_version,
        "abstract": expanded.abstract,
        "sentences": [
            {"index": s.index, "start": s.start, "end": s.end, "text": s.text}
            for s in expanded.sentences
        ],
        "spans": [_span_record(s) for s in spans],
        "evidence_sentences": [
            {"sentence_index": e.sentence_index, "confidence": e.confidence} for e in evidence
        ],
        "triplets": triplet_records,
        "concepts": {
            "population": sorted(normalized.population),
            "intervention": sorted(normalized.intervention),
            "outcome": sorted(normalized.outcome),
        },
        "unlinked": [
            {"label": label, "start": s.start, "end": s.end, "text": s.text}
            for label, s in normalized.unlinked
        ],
        "diagnostics": {
            "near_misses": diagnostics.near_misses,
            "skipped_outcomes": diagnostics.skipped_outcomes,
            "expansion_warnings": expansion.warnings,
        },
    }
    return decision_record, extraction


def run_pipeline(feed_path: str | Path, store: Store,
                 components: Components | None = None,
                 config: PipelineConfig | None = None) -> IngestReport:
    config = config or PipelineConfig()
    components = components or Components.default(config)
    report = IngestReport()

    for _lineno, item in read_feed(feed_path):
        report.received += 1
        if isinstance(item, CorpusError):
            report.rejected += 1
            report.failure_samples.append(str(item))
            continue
        doc = item
        record = document_to_record(doc)
        content_hash = hashlib.sha256(
            json.dumps(record, sort_keys=True).encode("utf-8")
        ).hexdigest()
        if not store.needs_processing(doc.doc_id, content_hash, config.pipeline_version):
            report.skipped_unchanged += 1
            continue
        try:
            store.put_document(record, content_hash, config.pipeline_version)
            decision_record, extraction = process_document(doc, components, config)
            store.put_gate_decision(doc.doc_id, decision_record)
            if extraction is None:
                report.gated_out += 1
                store.set_status(doc.doc_id, "gated_out")
            else:
                store.put_extraction(doc.doc_id, extraction)
                report.extracted += 1
                store.set_status(doc.doc_id, "indexed")
        except Exception as exc:  # per-document isolation
            log.exception("pipeline failure for %s", doc.doc_id)
            report.failed += 1
            report.failure_samples.append(f"{doc.doc_id}: {exc}")
            store.set_status(doc.doc_id, "failed")
    store.save()
    store.check_consistency()
    return report


def contributions_from_store(store: Store, doc_ids=None) -> list[TripletContribution]:
    out = []
    for doc_id, extraction in store.extractions.items():
        if doc_ids is not None and doc_id not in doc_ids:
            continue
        for t in extraction["triplets"]:
            out.append(
                TripletContribution(
                    doc_id=doc_id,
                    evidence_sentence_index=t["evidence_sentence_index"],
                    outcome_span_start=t["outcome"]["start"],
                    direction=t["direction"],
                    i_concepts=frozenset(t["i_concepts"]),
                    o_concepts=frozenset(t["o_concepts"]),
                )
            )
    return out
