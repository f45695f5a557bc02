"""Synonym dictionary construction and longest-match concept linking.

Keys are normalized token sequences (case folded, punctuation stripped to
spaces, whitespace collapsed); matching is leftmost-longest at token
boundaries, non-overlapping, resuming after each match.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import TokenSpan
from .ontology import Ontology, OntologyError

_LEAF = "\0"


def _is_word_char(ch: str) -> bool:
    return ch.isalnum()


def normalize_token(token: str, stem: bool = False) -> str:
    token = token.casefold()
    if stem and len(token) > 3 and token.endswith("s") and not token.endswith("ss"):
        token = token[:-1]
    return token


def tokenize(text: str, stem: bool = False) -> list[tuple[int, int, str]]:
    """(start, end, normalized_token) triples; punctuation splits tokens."""
    out = []
    start = None
    for i, ch in enumerate(text):
        if _is_word_char(ch):
            if start is None:
                start = i
        elif start is not None:
            out.append((start, i, normalize_token(text[start:i], stem)))
            start = None
    if start is not None:
        out.append((start, len(text), normalize_token(text[start:], stem)))
    return out


def normalize_text(text: str, stem: bool = False) -> str:
    # NFKC first so fullwidth/compatibility forms fold consistently
    text = unicodedata.normalize("NFKC", text)
    return " ".join(tok for _, _, tok in tokenize(text, stem))


@dataclass(frozen=True)
class ConceptMatch:
    span: TokenSpan
    concept_ids: frozenset[str]
    matched_key: str


class SynonymDictionary:
    """Token-sequence trie; leaf payloads are sets of concept ids."""

    def __init__(self, stem: bool = False):
        self.root: dict = {}
        self.stem = stem
        self.n_keys = 0

    def add(self, term: str, concept_id: str):
        tokens = [tok for _, _, tok in tokenize(unicodedata.normalize("NFKC", term), self.stem)]
        if not tokens:
            return
        node = self.root
        for tok in tokens:
            node = node.setdefault(tok, {})
        if _LEAF not in node:
            node[_LEAF] = set()
            self.n_keys += 1
        node[_LEAF].add(concept_id)

    def lookup(self, key: str) -> frozenset[str]:
        node = self.root
        for tok in key.split():
            node = node.get(tok)
            if node is None:
                return frozenset()
        return frozenset(node.get(_LEAF, ()))

    def match(self, text: str) -> list[ConceptMatch]:
        """Leftmost-longest non-overlapping matches at token boundaries."""
        # no unicode normalization here: offsets must index the original text
        tokens = tokenize(text, self.stem)
        matches = []
        i = 0
        n = len(tokens)
        while i < n:
            node = self.root
            best = None  # index of last token of the longest match
            j = i
            while j < n:
                node = node.get(tokens[j][2])
                if node is None:
                    break
                if _LEAF in node:
                    best = j
                j += 1
            if best is None:
                i += 1
                continue
            start = tokens[i][0]
            end = tokens[best][1]
            key = " ".join(tokens[k][2] for k in range(i, best + 1))
            matches.append(
                ConceptMatch(
                    span=TokenSpan(start, end, text[start:end]),
                    concept_ids=self.lookup(key),
                    matched_key=key,
                )
            )
            i = best + 1
        return matches


def build_dictionary(
    ontology: Ontology,
    extra_synonyms: list[tuple[str, str]] | None = None,
    stem: bool = False,
) -> tuple[SynonymDictionary, list[str]]:
    """Index every synonym of every concept under its normalized key.

    Extra synonym rows referencing unknown ids are rejected and reported;
    ambiguous keys map to all of their concepts.
    """
    dictionary = SynonymDictionary(stem=stem)
    rejected = []
    for concept in ontology.concepts.values():
        for synonym in concept.synonyms:
            dictionary.add(synonym, concept.concept_id)
    for cid, synonym in extra_synonyms or []:
        if cid not in ontology:
            rejected.append(f"unknown concept id {cid!r} for synonym {synonym!r}")
            continue
        dictionary.add(synonym, cid)
    return dictionary, rejected


def match_concepts(text: str, dictionary: SynonymDictionary) -> list[ConceptMatch]:
    return dictionary.match(text)


@dataclass
class NormalizedSpans:
    """Per-PICO-role concept sets plus the spans nothing linked to."""

    population: set[str] = field(default_factory=set)
    intervention: set[str] = field(default_factory=set)
    outcome: set[str] = field(default_factory=set)
    unlinked: list[tuple[str, TokenSpan]] = field(default_factory=list)

    def for_label(self, label: str) -> set[str]:
        return {
            "Population": self.population,
            "Intervention": self.intervention,
            "Outcome": self.outcome,
        }[label]

    def all_concepts(self) -> set[str]:
        return self.population | self.intervention | self.outcome


def normalize_document(pico_spans, dictionary: SynonymDictionary) -> NormalizedSpans:
    """Link each (label, span) to concepts; union per role, record misses."""
    result = NormalizedSpans()
    for label, span in pico_spans:
        matches = dictionary.match(span.text)
        if not matches:
            result.unlinked.append((label, span))
            continue
        target = result.for_label(label)
        for m in matches:
            target.update(m.concept_ids)
    return result


def span_concepts(span: TokenSpan, dictionary: SynonymDictionary) -> frozenset[str]:
    ids: set[str] = set()
    for m in dictionary.match(span.text):
        ids.update(m.concept_ids)
    return frozenset(ids)


def read_synonym_table(path: str | Path) -> list[tuple[str, str]]:
    rows = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise OntologyError(f"{path}:{lineno}: expected 2 tab-separated fields")
        rows.append((parts[0].strip(), parts[1].strip()))
    return rows
