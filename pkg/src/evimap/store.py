"""Embedded single-node store: document and extraction tables journaled to
disk as JSON, with an in-memory inverted index rebuilt (and verifiable) from
the extraction table."""

from __future__ import annotations

import json
import time
from pathlib import Path

ROLES = ("population", "intervention", "outcome")


class StoreError(RuntimeError):
    pass


class Store:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.documents: dict[str, dict] = {}
        self.gate_decisions: dict[str, dict] = {}
        self.extractions: dict[str, dict] = {}
        self.journal: dict[str, dict] = {}
        self.index: dict[str, dict[str, set[str]]] = {r: {} for r in ROLES}
        self._load()

    # -- persistence ------------------------------------------------------

    def _table(self, name: str) -> Path:
        return self.root / f"{name}.json"

    def _load(self):
        for name in ("documents", "gate_decisions", "extractions", "journal"):
            path = self._table(name)
            if path.exists():
                setattr(self, name, json.loads(path.read_text(encoding="utf-8")))
        self.rebuild_index()

    def save(self):
        for name in ("documents", "gate_decisions", "extractions", "journal"):
            payload = json.dumps(getattr(self, name), sort_keys=True, indent=1)
            self._table(name).write_text(payload, encoding="utf-8")

    # -- writes -----------------------------------------------------------

    def put_document(self, record: dict, content_hash: str, pipeline_version: str):
        doc_id = record["doc_id"]
        self.documents[doc_id] = record
        self.journal[doc_id] = {
            "status": "ingested",
            "content_hash": content_hash,
            "pipeline_version": pipeline_version,
            "updated_at": time.time(),
        }

    def set_status(self, doc_id: str, status: str):
        self.journal[doc_id]["status"] = status
        self.journal[doc_id]["updated_at"] = time.time()

    def put_gate_decision(self, doc_id: str, decision: dict):
        self.gate_decisions[doc_id] = decision

    def put_extraction(self, doc_id: str, extraction: dict):
        self.extractions[doc_id] = extraction
        for role in ROLES:
            for cid in extraction["concepts"][role]:
                self.index[role].setdefault(cid, set()).add(doc_id)

    def needs_processing(self, doc_id: str, content_hash: str, pipeline_version: str) -> bool:
        entry = self.journal.get(doc_id)
        if entry is None:
            return True
        if entry["content_hash"] != content_hash:
            return True
        if entry["pipeline_version"] != pipeline_version:
            return True
        return entry["status"] not in ("indexed", "gated_out")

    # -- index ------------------------------------------------------------

    def rebuild_index(self):
        index: dict[str, dict[str, set[str]]] = {r: {} for r in ROLES}
        for doc_id, extraction in self.extractions.items():
            for role in ROLES:
                for cid in extraction["concepts"][role]:
                    index[role].setdefault(cid, set()).add(doc_id)
        self.index = index

    def check_consistency(self) -> bool:
        """Rebuild-and-compare; raises on divergence."""
        current = {
            role: {cid: set(ids) for cid, ids in table.items()}
            for role, table in self.index.items()
        }
        self.rebuild_index()
        if current != self.index:
            raise StoreError("inverted index inconsistent with extraction table")
        return True

    def doc_concepts(self) -> dict[str, dict[str, set[str]]]:
        """doc_id -> role -> concept set, for filtering and aggregation."""
        return {
            doc_id: {role: set(e["concepts"][role]) for role in ROLES}
            for doc_id, e in self.extractions.items()
        }
