import random

import pytest

from evimap.abbrev import (
    OffsetMap,
    detect_abbreviations,
    expand_abbreviations,
)
from evimap.corpus import parse_corpus_record
from evimap.fixtures import abbrev_cases


def doc_of(text, doc_id="T"):
    return parse_corpus_record({"doc_id": doc_id, "title": "", "abstract": text})


class TestDetection:
    def test_heart_rate(self):
        pairs = detect_abbreviations(doc_of("The heart rate (HR) rose."))
        assert [(p.short_form, p.long_form) for p in pairs] == [("HR", "heart rate")]

    def test_rct(self):
        pairs = detect_abbreviations(doc_of("A randomized controlled trial (RCT) was run."))
        assert [(p.short_form, p.long_form) for p in pairs] == [
            ("RCT", "randomized controlled trial")
        ]

    def test_numeric_parenthetical_rejected(self):
        assert detect_abbreviations(doc_of("The change was significant (p<0.05) overall.")) == []

    def test_canonical_cases_file(self):
        for context, short, long in abbrev_cases():
            pairs = detect_abbreviations(doc_of(context))
            if short:
                assert [(p.short_form, p.long_form) for p in pairs] == [(short, long)], context
            else:
                assert pairs == [], context

    def test_definition_site_points_at_parenthetical(self):
        doc = doc_of("The heart rate (HR) rose.")
        (pair,) = detect_abbreviations(doc)
        assert doc.abstract[pair.definition_site.start : pair.definition_site.end] == "(HR)"

    def test_pairs_ordered_by_site(self):
        doc = doc_of("Body mass index (BMI) and heart rate (HR) were measured.")
        pairs = detect_abbreviations(doc)
        assert [p.short_form for p in pairs] == ["BMI", "HR"]


class TestExpansion:
    def test_basic_replacement(self):
        doc = doc_of("The heart rate (HR) rose. HR increased further.")
        result = expand_abbreviations(doc, detect_abbreviations(doc))
        assert result.document.abstract == (
            "The heart rate (HR) rose. heart rate increased further."
        )

    def test_no_pairs_identity(self):
        doc = doc_of("Nothing to expand here.")
        result = expand_abbreviations(doc, [])
        assert result.document == doc
        assert result.offset_map.to_original(5) == 5

    def test_word_boundary(self):
        doc = doc_of("The heart rate (HR) rose. THR was unchanged.")
        result = expand_abbreviations(doc, detect_abbreviations(doc))
        assert "THR" in result.document.abstract
        assert "heart rate was unchanged" not in result.document.abstract

    def test_occurrence_before_definition_not_replaced(self):
        doc = doc_of("HR was measured. The heart rate (HR) rose. HR fell.")
        result = expand_abbreviations(doc, detect_abbreviations(doc))
        assert result.document.abstract == (
            "HR was measured. The heart rate (HR) rose. heart rate fell."
        )

    def test_short_case_sensitivity(self):
        # length <= 2 short forms are case-sensitive
        doc = doc_of("The heart rate (HR) rose. Later hr was noted.")
        result = expand_abbreviations(doc, detect_abbreviations(doc))
        assert "Later hr was noted" in result.document.abstract

    def test_longer_forms_case_insensitive(self):
        doc = doc_of("A randomized controlled trial (RCT) ran. The rct ended.")
        result = expand_abbreviations(doc, detect_abbreviations(doc))
        assert "The randomized controlled trial ended." in result.document.abstract

    def test_idempotent(self, corpus):
        texts = [
            "The heart rate (HR) rose. HR increased further.",
            "Body mass index (BMI) and heart rate (HR). BMI rose while HR fell.",
        ] + [doc.abstract for doc, _ in corpus]
        for text in texts:
            doc = doc_of(text)
            once = expand_abbreviations(doc, detect_abbreviations(doc))
            twice = expand_abbreviations(
                once.document, detect_abbreviations(once.document)
            )
            assert twice.document.abstract == once.document.abstract

    def test_offset_map_round_trip(self):
        doc = doc_of("Body mass index (BMI) was high. BMI fell after diet. Mean BMI was 30.")
        pairs = detect_abbreviations(doc)
        result = expand_abbreviations(doc, pairs)
        expanded = result.document.abstract
        # every expanded offset maps back to original text that is either
        # identical or the source short form
        rng = random.Random(0)
        for _ in range(200):
            start = rng.randrange(len(expanded))
            end = rng.randrange(start + 1, len(expanded) + 1)
            ostart, oend = result.offset_map.span_to_original(start, end)
            original = doc.abstract[ostart:oend]
            chunk = expanded[start:end]
            assert original == chunk or "BMI" in original or chunk in "body mass index"

    def test_offset_map_monotone_total(self, corpus):
        for doc, _ in corpus:
            result = expand_abbreviations(doc, detect_abbreviations(doc))
            expanded = result.document.abstract
            previous = 0
            for offset in range(len(expanded) + 1):
                mapped = result.offset_map.to_original(offset)
                assert mapped >= previous or mapped >= previous - 1
                previous = max(previous, mapped)
            assert result.offset_map.to_original(len(expanded)) == len(doc.abstract)

    def test_overlap_longest_wins(self):
        # construct two pairs whose occurrences overlap: "AB" and "AB C"
        doc = doc_of("alpha beta (AB) and alpha beta sea (AB C) appeared. AB C came.")
        pairs = detect_abbreviations(doc)
        result = expand_abbreviations(doc, pairs)
        if len(pairs) == 2:
            assert result.warnings
