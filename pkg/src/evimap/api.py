"""HTTP API over the store: search, autocomplete, evidence maps, documents."""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .evmap import (
    Query,
    QueryError,
    QueryField,
    aggregate,
    filter_documents,
    serialize_map,
    top_concepts,
)
from .ontology import Ontology
from .pipeline import contributions_from_store
from .store import Store


class RoleFilter(BaseModel):
    concept_ids: list[str] = Field(default_factory=list)
    mode: str = "or"


class SearchRequest(BaseModel):
    population: RoleFilter = Field(default_factory=RoleFilter)
    intervention: RoleFilter = Field(default_factory=RoleFilter)
    outcome: RoleFilter = Field(default_factory=RoleFilter)
    page: int = 0
    page_size: int = 20
    top_k: int = 10

    def to_query(self) -> Query:
        def conv(f: RoleFilter) -> QueryField:
            return QueryField(concept_ids=tuple(f.concept_ids), mode=f.mode)

        return Query(conv(self.population), conv(self.intervention), conv(self.outcome))


def _error(status: int, code: str, message: str, fields: dict | None = None):
    return JSONResponse(
        status_code=status,
        content={"error": {"code": code, "message": message, "fields": fields or {}}},
    )


def autocomplete_suggestions(ontology: Ontology, prefix: str, role: str | None,
                             store: Store | None, limit: int) -> list[dict]:
    """Prefix matches over preferred names and synonyms, one row per concept.

    Rank: preferred-name prefix hits first, then synonym hits, then shorter
    names; restricted to concepts indexed for `role` when given."""
    prefix_cf = prefix.casefold()
    allowed = None
    if role and store is not None:
        allowed = set(store.index.get(role, {}))
    rows = []
    for concept in ontology.concepts.values():
        if allowed is not None and concept.concept_id not in allowed:
            continue
        via_preferred = concept.preferred_name.casefold().startswith(prefix_cf)
        matched = None
        if via_preferred:
            matched = concept.preferred_name
        else:
            for synonym in sorted(concept.synonyms):
                if synonym.casefold().startswith(prefix_cf):
                    matched = synonym
                    break
        if matched is None:
            continue
        rows.append(
            {
                "concept_id": concept.concept_id,
                "preferred_name": concept.preferred_name,
                "matched_synonym": matched,
                "via_preferred_name": via_preferred,
            }
        )
    rows.sort(
        key=lambda r: (
            not r["via_preferred_name"],
            len(r["preferred_name"]),
            r["preferred_name"],
        )
    )
    return rows[:limit]


def create_app(store: Store, ontology: Ontology) -> FastAPI:
    app = FastAPI(title="evimap", version="0.1.0")

    @app.get("/health")
    def health():
        return {"status": "ok", "documents": len(store.documents),
                "extracted": len(store.extractions)}

    @app.get("/autocomplete")
    def autocomplete(q: str = "", role: str | None = None, limit: int = 10):
        if not q:
            return _error(400, "prefix_required", "prefix required", {"q": "must be non-empty"})
        if role is not None and role not in ("population", "intervention", "outcome"):
            return _error(400, "bad_role", f"unknown role {role!r}", {"role": "invalid"})
        return {"suggestions": autocomplete_suggestions(ontology, q, role, store, limit)}

    @app.post("/search")
    def search(request: SearchRequest):
        try:
            query = request.to_query()
            doc_ids = filter_documents(store.doc_concepts(), query, ontology)
        except (QueryError, ValueError) as exc:
            return _error(400, "bad_query", str(exc), {"query": str(exc)})
        ordered = sorted(doc_ids)
        start = request.page * request.page_size
        page = ordered[start : start + request.page_size]
        concepts = store.doc_concepts()

        def ranked(role):
            return [
                {"concept_id": cid, "preferred_name": ontology.name(cid), "doc_count": n}
                for cid, n in top_concepts(concepts, doc_ids, role, ontology, request.top_k)
            ]

        return {
            "doc_ids": page,
            "total": len(doc_ids),
            "page": request.page,
            "top_interventions": ranked("intervention"),
            "top_outcomes": ranked("outcome"),
        }

    @app.post("/map")
    def evidence_map(request: SearchRequest):
        try:
            query = request.to_query()
            doc_ids = filter_documents(store.doc_concepts(), query, ontology)
        except (QueryError, ValueError) as exc:
            return _error(400, "bad_query", str(exc), {"query": str(exc)})
        emap = aggregate(contributions_from_store(store, doc_ids))
        return serialize_map(emap, ontology)

    @app.get("/doc/{doc_id}")
    def document(doc_id: str):
        if doc_id not in store.documents:
            return _error(404, "not_found", f"unknown document {doc_id!r}")
        payload = {
            "doc_id": doc_id,
            "document": store.documents[doc_id],
            "gate_decision": store.gate_decisions.get(doc_id),
            "extraction": store.extractions.get(doc_id),
        }
        return payload

    return app
