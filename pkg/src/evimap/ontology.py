"""Concept ontology: hierarchy, loading, and strict/relaxed concept equality."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path


class OntologyError(ValueError):
    pass


@dataclass(frozen=True)
class Concept:
    concept_id: str
    preferred_name: str
    parent_ids: frozenset[str] = frozenset()
    synonyms: frozenset[str] = frozenset()


class Ontology:
    def __init__(self, concepts: dict[str, Concept]):
        self.concepts = concepts
        self.children: dict[str, set[str]] = {cid: set() for cid in concepts}
        for concept in concepts.values():
            for pid in concept.parent_ids:
                if pid not in concepts:
                    raise OntologyError(
                        f"{concept.concept_id}: unknown parent {pid!r}"
                    )
                self.children[pid].add(concept.concept_id)
        self._check_acyclic()

    def _check_acyclic(self):
        state: dict[str, int] = {}  # 1 = on stack, 2 = done

        def visit(cid: str, trail: list[str]):
            state[cid] = 1
            for pid in self.concepts[cid].parent_ids:
                if state.get(pid) == 1:
                    raise OntologyError(f"cycle in ontology: {' -> '.join(trail + [pid])}")
                if state.get(pid) is None:
                    visit(pid, trail + [pid])
            state[cid] = 2

        for cid in self.concepts:
            if state.get(cid) is None:
                visit(cid, [cid])

    def __contains__(self, concept_id: str) -> bool:
        return concept_id in self.concepts

    def __getitem__(self, concept_id: str) -> Concept:
        try:
            return self.concepts[concept_id]
        except KeyError:
            raise OntologyError(f"unknown concept id {concept_id!r}") from None

    def name(self, concept_id: str) -> str:
        return self[concept_id].preferred_name

    def relaxed_equal(self, a: str, b: str) -> bool:
        """True iff the ids are equal or one is an immediate parent of the other."""
        ca, cb = self[a], self[b]
        return a == b or a in cb.parent_ids or b in ca.parent_ids


def relaxed_equal(a: str, b: str, ontology: Ontology) -> bool:
    return ontology.relaxed_equal(a, b)


def load_ontology(concepts_path: str | Path, synonyms_path: str | Path | None = None) -> Ontology:
    """Load concepts from a TSV (`concept_id  preferred_name  parent|ids`) plus
    an optional synonym TSV (`concept_id  synonym`).  The preferred name is
    always a synonym of its concept."""
    rows = []
    for lineno, line in enumerate(Path(concepts_path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 2:
            raise OntologyError(f"{concepts_path}:{lineno}: expected >= 2 tab-separated fields")
        cid, name = parts[0].strip(), parts[1].strip()
        parents = frozenset(
            p.strip() for p in (parts[2].split("|") if len(parts) > 2 and parts[2].strip() else []) if p.strip()
        )
        rows.append((lineno, cid, name, parents))

    synonyms: dict[str, set[str]] = {}
    if synonyms_path is not None:
        for lineno, line in enumerate(Path(synonyms_path).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise OntologyError(f"{synonyms_path}:{lineno}: expected 2 tab-separated fields")
            synonyms.setdefault(parts[0].strip(), set()).add(parts[1].strip())

    concepts: dict[str, Concept] = {}
    for lineno, cid, name, parents in rows:
        if not cid:
            raise OntologyError(f"{concepts_path}:{lineno}: empty concept id")
        if cid in concepts:
            raise OntologyError(f"{concepts_path}:{lineno}: duplicate concept id {cid!r}")
        concepts[cid] = Concept(
            concept_id=cid,
            preferred_name=name,
            parent_ids=parents,
            synonyms=frozenset({name} | synonyms.get(cid, set())),
        )
    unknown = set(synonyms) - set(concepts)
    if unknown:
        raise OntologyError(f"synonyms reference unknown concept ids: {sorted(unknown)}")
    return Ontology(concepts)
