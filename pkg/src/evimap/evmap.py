"""Evidence map: intervention x outcome aggregation of extracted triplets."""

from __future__ import annotations

from dataclasses import dataclass, field

from .corpus import DIRECTIONS
from .ontology import Ontology, OntologyError


@dataclass(frozen=True)
class QueryField:
    concept_ids: tuple[str, ...] = ()
    mode: str = "or"

    def __post_init__(self):
        if self.mode not in ("and", "or"):
            raise ValueError(f"combine mode must be 'and' or 'or', got {self.mode!r}")


@dataclass(frozen=True)
class Query:
    population: QueryField = QueryField()
    intervention: QueryField = QueryField()
    outcome: QueryField = QueryField()

    def fields(self):
        return (
            ("population", self.population),
            ("intervention", self.intervention),
            ("outcome", self.outcome),
        )

    def is_empty(self) -> bool:
        return not any(f.concept_ids for _, f in self.fields())

    @classmethod
    def from_dict(cls, d: dict) -> "Query":
        def parse(role):
            raw = d.get(role) or {}
            return QueryField(
                concept_ids=tuple(raw.get("concept_ids", ())),
                mode=raw.get("mode", "or"),
            )

        return cls(parse("population"), parse("intervention"), parse("outcome"))


class QueryError(ValueError):
    pass


def _concept_satisfied(concept_id: str, doc_concepts: set[str], ontology: Ontology) -> bool:
    """Strict id hit or an immediate descendant of the queried concept."""
    if concept_id in doc_concepts:
        return True
    return any(child in doc_concepts for child in ontology.children.get(concept_id, ()))


def filter_documents(doc_concepts: dict[str, dict[str, set[str]]], query: Query,
                     ontology: Ontology) -> set[str]:
    """doc_concepts: doc_id -> {"population"|"intervention"|"outcome": concept set}."""
    if query.is_empty():
        raise QueryError("at least one filter required")
    for _, qfield in query.fields():
        for cid in qfield.concept_ids:
            if cid not in ontology:
                raise QueryError(f"unknown concept id {cid!r}")

    result = set()
    for doc_id, roles in doc_concepts.items():
        ok = True
        for role, qfield in query.fields():
            if not qfield.concept_ids:
                continue
            hits = [
                _concept_satisfied(cid, roles.get(role, set()), ontology)
                for cid in qfield.concept_ids
            ]
            ok = all(hits) if qfield.mode == "and" else any(hits)
            if not ok:
                break
        if ok:
            result.add(doc_id)
    return result


@dataclass
class MapCell:
    intervention_concept: str
    outcome_concept: str
    doc_ids: set[str] = field(default_factory=set)
    n_increased: int = 0
    n_decreased: int = 0
    n_no_difference: int = 0
    evidence_refs: list[tuple[str, int]] = field(default_factory=list)

    def count_for(self, direction: str) -> int:
        return {
            "increased": self.n_increased,
            "decreased": self.n_decreased,
            "no_difference": self.n_no_difference,
        }[direction]

    def add(self, direction: str):
        if direction == "increased":
            self.n_increased += 1
        elif direction == "decreased":
            self.n_decreased += 1
        elif direction == "no_difference":
            self.n_no_difference += 1
        else:
            raise ValueError(f"unknown direction {direction!r}")


@dataclass
class EvidenceMap:
    cells: dict[tuple[str, str], MapCell] = field(default_factory=dict)
    skipped_unlinked: int = 0

    def interventions(self) -> list[str]:
        return sorted({i for i, _ in self.cells})

    def outcomes(self) -> list[str]:
        return sorted({o for _, o in self.cells})


@dataclass(frozen=True)
class TripletContribution:
    """One extracted triplet with its normalized concept sets, ready to aggregate."""

    doc_id: str
    evidence_sentence_index: int
    outcome_span_start: int
    direction: str
    i_concepts: frozenset[str]
    o_concepts: frozenset[str]


def aggregate(contributions) -> EvidenceMap:
    """Group direction counts by (intervention concept, outcome concept).

    Each doc contributes at most one direction count per
    (cell, evidence sentence, outcome span); triplets lacking linked
    intervention or outcome concepts are skipped and tallied."""
    emap = EvidenceMap()
    seen: set[tuple] = set()
    for c in contributions:
        if c.direction not in DIRECTIONS:
            continue  # "unknown" directions never reach the map
        if not c.i_concepts or not c.o_concepts:
            emap.skipped_unlinked += 1
            continue
        for i_concept in sorted(c.i_concepts):
            for o_concept in sorted(c.o_concepts):
                dedup = (i_concept, o_concept, c.doc_id, c.evidence_sentence_index, c.outcome_span_start)
                if dedup in seen:
                    continue
                seen.add(dedup)
                cell = emap.cells.setdefault(
                    (i_concept, o_concept), MapCell(i_concept, o_concept)
                )
                cell.doc_ids.add(c.doc_id)
                cell.add(c.direction)
                cell.evidence_refs.append((c.doc_id, c.evidence_sentence_index))
    return emap


def summarize_cell(cell: MapCell) -> dict:
    total = cell.n_increased + cell.n_decreased + cell.n_no_difference
    return {
        "n_trials": len(cell.doc_ids),
        "n_findings": total,
        "net_direction_score": (cell.n_increased - cell.n_decreased) / total if total else 0.0,
    }


def top_concepts(doc_concepts: dict[str, dict[str, set[str]]], doc_ids, role: str,
                 ontology: Ontology, k: int) -> list[tuple[str, int]]:
    """Per-role document counts, descending; ties ordered by preferred name."""
    if role not in ("intervention", "outcome", "population"):
        raise QueryError(f"unknown role {role!r}")
    counts: dict[str, int] = {}
    for doc_id in doc_ids:
        for cid in doc_concepts.get(doc_id, {}).get(role, set()):
            counts[cid] = counts.get(cid, 0) + 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], ontology.name(kv[0])))
    return ranked[:k]


def serialize_map(emap: EvidenceMap, ontology: Ontology) -> dict:
    cells = []
    for (i_concept, o_concept), cell in sorted(emap.cells.items()):
        cells.append(
            {
                "intervention_concept": i_concept,
                "intervention_name": ontology.name(i_concept),
                "outcome_concept": o_concept,
                "outcome_name": ontology.name(o_concept),
                "doc_ids": sorted(cell.doc_ids),
                "n_increased": cell.n_increased,
                "n_decreased": cell.n_decreased,
                "n_no_difference": cell.n_no_difference,
                "evidence_refs": [
                    {"doc_id": d, "sentence_index": s} for d, s in cell.evidence_refs
                ],
                "summary": summarize_cell(cell),
            }
        )
    return {
        "interventions": emap.interventions(),
        "outcomes": emap.outcomes(),
        "cells": cells,
        "skipped_unlinked": emap.skipped_unlinked,
    }
