"""Document model, corpus feed parsing, sentence segmentation, gold annotations.

Character offsets (code points, not bytes) are the canonical coordinate
system for every span in the system.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

DIRECTIONS = ("increased", "decreased", "no_difference")
PICO_LABELS = ("Population", "Intervention", "Outcome")


class CorpusError(ValueError):
    """Raised for malformed feed records or annotation files."""


@dataclass(frozen=True)
class TokenSpan:
    start: int
    end: int
    text: str

    def __post_init__(self):
        if self.end <= self.start:
            raise CorpusError(f"empty span [{self.start}, {self.end})")

    def overlaps(self, other: "TokenSpan") -> bool:
        return self.start < other.end and other.start < self.end

    @classmethod
    def of(cls, text: str, start: int, end: int) -> "TokenSpan":
        return cls(start, end, text[start:end])


@dataclass(frozen=True)
class Sentence:
    index: int
    start: int
    end: int
    text: str


@dataclass(frozen=True)
class Document:
    doc_id: str
    title: str
    abstract: str
    sentences: tuple[Sentence, ...]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.doc_id:
            raise CorpusError("empty doc_id")
        for s in self.sentences:
            if not (0 <= s.start < s.end <= len(self.abstract)):
                raise CorpusError(
                    f"{self.doc_id}: sentence {s.index} offsets out of bounds"
                )
            if self.abstract[s.start : s.end] != s.text:
                raise CorpusError(f"{self.doc_id}: sentence {s.index} text mismatch")

    def sentence_containing(self, span: TokenSpan) -> Sentence | None:
        for s in self.sentences:
            if s.start <= span.start and span.end <= s.end:
                return s
        return None


# Tokens that do not end a sentence even when followed by ". Capital".
def _load_exceptions() -> frozenset[str]:
    text = resources.files("evimap.data").joinpath("sentence_exceptions.txt").read_text()
    return frozenset(
        line.strip().lower() for line in text.splitlines() if line.strip()
    )


_EXCEPTIONS: frozenset[str] | None = None
_PUNCT = re.compile(r"[.!?]+")


def _exceptions() -> frozenset[str]:
    global _EXCEPTIONS
    if _EXCEPTIONS is None:
        _EXCEPTIONS = _load_exceptions()
    return _EXCEPTIONS


def segment_sentences(text: str) -> list[Sentence]:
    """Rule-based sentence segmentation.

    A run of sentence-final punctuation ends a sentence when it is followed
    by whitespace and an uppercase letter or digit (or end of text), unless
    the preceding token is on the non-splitting exception list, is a single
    initial, or the period sits inside a number.  Sentences are trimmed of
    surrounding whitespace; gaps between sentence offsets are whitespace only.
    """
    boundaries = []
    exceptions = _exceptions()
    for m in _PUNCT.finditer(text):
        end = m.end()
        j = end
        while j < len(text) and text[j].isspace():
            j += 1
        if j == end and j < len(text):
            continue  # no whitespace after punctuation (e.g. "2.5", "e.g.")
        if j < len(text) and not (text[j].isupper() or text[j].isdigit()):
            continue
        # token immediately preceding the punctuation run
        k = m.start()
        while k > 0 and not text[k - 1].isspace():
            k -= 1
        token = text[k : m.start()]
        if token.lower() in exceptions:
            continue
        boundaries.append(end)
    if not boundaries or boundaries[-1] < len(text):
        boundaries.append(len(text))

    sentences = []
    prev = 0
    for b in boundaries:
        start, stop = prev, b
        while start < stop and text[start].isspace():
            start += 1
        while stop > start and text[stop - 1].isspace():
            stop -= 1
        if stop > start:
            sentences.append(
                Sentence(len(sentences), start, stop, text[start:stop])
            )
        prev = b
    return sentences


def parse_corpus_record(raw: dict) -> Document:
    """Build a Document from one corpus-feed record."""
    if not isinstance(raw, dict):
        raise CorpusError("record is not an object")
    doc_id = raw.get("doc_id", raw.get("id"))
    if doc_id is None:
        raise CorpusError("missing doc_id")
    if not doc_id:
        raise CorpusError("empty doc_id")
    if "abstract" not in raw or raw["abstract"] is None:
        raise CorpusError("missing abstract")
    abstract = raw["abstract"]
    return Document(
        doc_id=str(doc_id),
        title=raw.get("title", ""),
        abstract=abstract,
        sentences=tuple(segment_sentences(abstract)),
        meta=dict(raw.get("meta", {})),
    )


def read_feed(path: str | Path):
    """Yield (line_number, parsed_record_or_error) over a newline-delimited feed."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                yield lineno, CorpusError(f"line {lineno}: invalid JSON: {exc}")
                continue
            try:
                yield lineno, parse_corpus_record(raw)
            except CorpusError as exc:
                yield lineno, CorpusError(f"line {lineno}: {exc}")


def document_to_record(doc: Document) -> dict:
    return {
        "doc_id": doc.doc_id,
        "title": doc.title,
        "abstract": doc.abstract,
        "meta": dict(doc.meta),
    }


@dataclass(frozen=True)
class GoldTriplet:
    intervention: TokenSpan
    comparator: TokenSpan
    outcome: TokenSpan
    evidence_sentence_index: int
    direction: str


@dataclass(frozen=True)
class GoldAnnotations:
    doc_id: str
    pico_spans: tuple[tuple[str, TokenSpan], ...]
    evidence_sentence_indices: frozenset[int]
    triplets: tuple[GoldTriplet, ...]
    concept_ids: frozenset[str]


def _check_span(doc: Document, span: TokenSpan, what: str):
    if not (0 <= span.start < span.end <= len(doc.abstract)):
        raise CorpusError(f"{doc.doc_id}: {what} [{span.start}, {span.end}) out of bounds")
    if doc.abstract[span.start : span.end] != span.text:
        raise CorpusError(f"{doc.doc_id}: {what} text does not match abstract slice")


def _parse_span(doc: Document, obj: dict, what: str) -> TokenSpan:
    span = TokenSpan(obj["start"], obj["end"], obj.get("text", doc.abstract[obj["start"] : obj["end"]]))
    _check_span(doc, span, what)
    return span


def parse_gold_record(raw: dict, doc: Document) -> GoldAnnotations:
    spans = []
    for item in raw.get("pico_spans", []):
        label = item["label"]
        if label not in PICO_LABELS:
            raise CorpusError(f"{doc.doc_id}: unknown PICO label {label!r}")
        spans.append((label, _parse_span(doc, item, f"{label} span")))
    ev = frozenset(raw.get("evidence_sentence_indices", []))
    for idx in ev:
        if not (0 <= idx < len(doc.sentences)):
            raise CorpusError(f"{doc.doc_id}: evidence sentence {idx} out of range")
    triplets = []
    for t in raw.get("triplets", []):
        direction = t["direction"]
        if direction not in DIRECTIONS:
            raise CorpusError(f"{doc.doc_id}: unknown direction {direction!r}")
        idx = t["evidence_sentence_index"]
        if not (0 <= idx < len(doc.sentences)):
            raise CorpusError(f"{doc.doc_id}: triplet evidence sentence {idx} out of range")
        triplets.append(
            GoldTriplet(
                intervention=_parse_span(doc, t["intervention"], "triplet intervention"),
                comparator=_parse_span(doc, t["comparator"], "triplet comparator"),
                outcome=_parse_span(doc, t["outcome"], "triplet outcome"),
                evidence_sentence_index=idx,
                direction=direction,
            )
        )
    return GoldAnnotations(
        doc_id=doc.doc_id,
        pico_spans=tuple(spans),
        evidence_sentence_indices=ev,
        triplets=tuple(triplets),
        concept_ids=frozenset(raw.get("concept_ids", [])),
    )


def load_gold(path: str | Path, docs: dict[str, Document]) -> dict[str, GoldAnnotations]:
    """Load newline-delimited gold annotations, validated against their documents."""
    gold = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            raw = json.loads(line)
            doc_id = raw["doc_id"]
            if doc_id not in docs:
                raise CorpusError(f"line {lineno}: annotations for unknown doc {doc_id!r}")
            gold[doc_id] = parse_gold_record(raw, docs[doc_id])
    return gold


def gold_to_record(gold: GoldAnnotations) -> dict:
    return {
        "doc_id": gold.doc_id,
        "pico_spans": [
            {"label": label, "start": s.start, "end": s.end, "text": s.text}
            for label, s in gold.pico_spans
        ],
        "evidence_sentence_indices": sorted(gold.evidence_sentence_indices),
        "triplets": [
            {
                "intervention": {"start": t.intervention.start, "end": t.intervention.end, "text": t.intervention.text},
                "comparator": {"start": t.comparator.start, "end": t.comparator.end, "text": t.comparator.text},
                "outcome": {"start": t.outcome.start, "end": t.outcome.end, "text": t.outcome.text},
                "evidence_sentence_index": t.evidence_sentence_index,
                "direction": t.direction,
            }
            for t in gold.triplets
        ],
        "concept_ids": sorted(gold.concept_ids),
    }
