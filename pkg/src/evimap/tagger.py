"""PICO span tagging: gazetteer longest-match baseline plus pattern rules.

The neural tagger the pipeline was designed around is reachable through the
remote-classifier backend; the bundled baseline favors recall, since later
stages can discard spurious spans.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .corpus import Document, TokenSpan, PICO_LABELS
from .normalize import SynonymDictionary


@dataclass(frozen=True)
class PicoSpan:
    label: str
    span: TokenSpan
    confidence: float = 1.0
    source: str = "gazetteer"  # gazetteer | model | gold

    def __post_init__(self):
        if self.label not in PICO_LABELS:
            raise ValueError(f"unknown PICO label {self.label!r}")
        if not (0.0 <= self.confidence <= 1.0):
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")


class Gazetteer:
    """Per-label term tries sharing the dictionary normalization."""

    def __init__(self):
        self.tries: dict[str, SynonymDictionary] = {
            label: SynonymDictionary() for label in PICO_LABELS
        }

    def add(self, label: str, term: str):
        if label not in self.tries:
            raise ValueError(f"unknown PICO label {label!r}")
        if not term.strip():
            raise ValueError("empty gazetteer term")
        self.tries[label].add(term, label)

    @classmethod
    def load(cls, path: str | Path) -> "Gazetteer":
        gaz = cls()
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected `label<TAB>term`")
            gaz.add(parts[0].strip(), parts[1].strip())
        return gaz

    def tag(self, text: str) -> list[PicoSpan]:
        spans = []
        for label, trie in self.tries.items():
            for m in trie.match(text):
                spans.append(PicoSpan(label=label, span=m.span, confidence=0.9,
                                      source="gazetteer"))
        return spans


# recall-biased surface patterns for spans the gazetteer misses
_PATTERNS = [
    ("Population", re.compile(r"\b(?:patients|participants|adults|children|subjects|women|men) with ([^,.;()]+)", re.IGNORECASE)),
    ("Intervention", re.compile(r"\b(?:treated with|received|receiving|randomized to|randomised to|assigned to) ([^,.;()]+)", re.IGNORECASE)),
    ("Outcome", re.compile(r"\b(?:measured|assessed|evaluated) ([^,.;()]+)", re.IGNORECASE)),
]


class GazetteerTagger:
    def __init__(self, gazetteer: Gazetteer, use_patterns: bool = True):
        self.gazetteer = gazetteer
        self.use_patterns = use_patterns

    def tag(self, doc: Document) -> list[PicoSpan]:
        spans = self.gazetteer.tag(doc.abstract)
        if self.use_patterns:
            for label, pattern in _PATTERNS:
                for m in pattern.finditer(doc.abstract):
                    start, end = m.span(1)
                    while end > start and doc.abstract[end - 1].isspace():
                        end -= 1
                    if end > start:
                        spans.append(
                            PicoSpan(
                                label=label,
                                span=TokenSpan.of(doc.abstract, start, end),
                                confidence=0.5,
                                source="model",
                            )
                        )
        return spans


class NullTagger:
    def tag(self, doc: Document) -> list[PicoSpan]:
        return []


def _merge(a: PicoSpan, b: PicoSpan, text: str) -> PicoSpan:
    start = min(a.span.start, b.span.start)
    end = max(a.span.end, b.span.end)
    return PicoSpan(
        label=a.label,
        span=TokenSpan.of(text, start, end),
        confidence=max(a.confidence, b.confidence),
        source=a.source if a.source == b.source else "model",
    )


def tag_spans(doc: Document, tagger) -> list[PicoSpan]:
    """Tag, then merge overlapping same-label spans; sorted by start offset.

    Overlapping spans with different labels are both kept (nesting is real in
    this corpus)."""
    spans = tagger.tag(doc)
    merged: dict[str, list[PicoSpan]] = {}
    for span in sorted(spans, key=lambda s: (s.span.start, s.span.end)):
        bucket = merged.setdefault(span.label, [])
        if bucket and span.span.start < bucket[-1].span.end:
            bucket[-1] = _merge(bucket[-1], span, doc.abstract)
        else:
            bucket.append(span)
    out = [s for bucket in merged.values() for s in bucket]
    out.sort(key=lambda s: (s.span.start, s.span.end, s.label))
    return out


def group_entities(spans: list[PicoSpan], text: str) -> list[PicoSpan]:
    """Merge same-label spans separated only by whitespace or hyphens."""
    out: list[PicoSpan] = []
    by_label: dict[str, list[PicoSpan]] = {}
    for span in sorted(spans, key=lambda s: (s.span.start, s.span.end)):
        by_label.setdefault(span.label, []).append(span)
    for label, bucket in by_label.items():
        current = bucket[0]
        for nxt in bucket[1:]:
            gap = text[current.span.end : nxt.span.start]
            if nxt.span.start <= current.span.end or all(c.isspace() or c == "-" for c in gap):
                current = _merge(current, nxt, text)
            else:
                out.append(current)
                current = nxt
        out.append(current)
    out.sort(key=lambda s: (s.span.start, s.span.end, s.label))
    return out
