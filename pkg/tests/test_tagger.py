import random

import pytest

from evimap.corpus import TokenSpan, parse_corpus_record
from evimap.tagger import (
    Gazetteer,
    GazetteerTagger,
    NullTagger,
    PicoSpan,
    group_entities,
    tag_spans,
)


def doc_of(text):
    return parse_corpus_record({"doc_id": "T", "title": "", "abstract": text})


def small_gazetteer():
    gaz = Gazetteer()
    gaz.add("Intervention", "metformin")
    gaz.add("Intervention", "placebo")
    gaz.add("Outcome", "blood pressure")
    gaz.add("Outcome", "systolic blood pressure")
    gaz.add("Population", "type 2 diabetes")
    return gaz


class TestGazetteer:
    def test_basic_hits(self):
        spans = small_gazetteer().tag("Metformin lowered blood pressure.")
        got = {(s.label, s.span.text) for s in spans}
        assert got == {("Intervention", "Metformin"), ("Outcome", "blood pressure")}

    def test_longest_match(self):
        spans = small_gazetteer().tag("systolic blood pressure fell")
        assert [s.span.text for s in spans] == ["systolic blood pressure"]

    def test_unknown_label_rejected(self):
        with pytest.raises(ValueError, match="unknown PICO label"):
            Gazetteer().add("Dosage", "10 mg")

    def test_empty_term_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            Gazetteer().add("Outcome", "   ")

    def test_load_round_trip(self, tmp_path):
        path = tmp_path / "gaz.tsv"
        path.write_text("# comment\nIntervention\taspirin\nOutcome\tpain score\n")
        gaz = Gazetteer.load(path)
        got = {(s.label, s.span.text) for s in gaz.tag("aspirin cut the pain score")}
        assert got == {("Intervention", "aspirin"), ("Outcome", "pain score")}

    def test_load_malformed_rejected(self, tmp_path):
        path = tmp_path / "gaz.tsv"
        path.write_text("Intervention aspirin\n")
        with pytest.raises(ValueError, match="label<TAB>term"):
            Gazetteer.load(path)

    def test_offsets_index_abstract(self, corpus, gazetteer):
        tagger = GazetteerTagger(gazetteer)
        for doc, _ in corpus:
            for s in tag_spans(doc, tagger):
                assert doc.abstract[s.span.start : s.span.end] == s.span.text

    def test_brute_force_oracle_on_random_texts(self):
        """Gazetteer tagging equals naive scan-every-term matching."""
        terms = {
            "Intervention": ["metformin", "placebo"],
            "Outcome": ["blood pressure", "systolic blood pressure"],
        }
        gaz = Gazetteer()
        for label, ts in terms.items():
            for t in ts:
                gaz.add(label, t)
        vocab = ["metformin", "placebo", "systolic", "blood", "pressure", "fell", "and"]
        rng = random.Random(99)
        for _ in range(300):
            text = " ".join(rng.choice(vocab) for _ in range(rng.randint(0, 12)))
            got = {(s.label, s.span.start, s.span.end) for s in gaz.tag(text)}
            expected = set()
            for label, ts in terms.items():
                # leftmost-longest per label over that label's own terms
                words = text.split()
                offsets = []
                pos = 0
                for w in words:
                    offsets.append((pos, pos + len(w)))
                    pos += len(w) + 1
                i = 0
                while i < len(words):
                    best = None
                    for t in ts:
                        tw = t.split()
                        if words[i : i + len(tw)] == tw:
                            if best is None or len(tw) > best:
                                best = len(tw)
                    if best is None:
                        i += 1
                    else:
                        expected.add((label, offsets[i][0], offsets[i + best - 1][1]))
                        i += best
            assert got == expected, text


class TestPatternsAndMerging:
    def test_pattern_recall_rules(self, gazetteer):
        doc = doc_of(
            "Patients with chronic fatigue, all adults, were treated with "
            "brightline capsules. We assessed wellbeing totals."
        )
        spans = tag_spans(doc, GazetteerTagger(gazetteer))
        by_label = {}
        for s in spans:
            by_label.setdefault(s.label, []).append(s.span.text)
        assert "chronic fatigue" in by_label.get("Population", [])
        assert "brightline capsules" in by_label.get("Intervention", [])
        assert "wellbeing totals" in by_label.get("Outcome", [])

    def test_overlapping_same_label_merged(self):
        text = "systolic blood pressure"
        spans = [
            PicoSpan("Outcome", TokenSpan.of(text, 0, 14)),
            PicoSpan("Outcome", TokenSpan.of(text, 9, 23)),
        ]

        class Fixed:
            def tag(self, doc):
                return spans

        merged = tag_spans(doc_of(text), Fixed())
        assert len(merged) == 1
        assert merged[0].span.text == text

    def test_cross_label_overlap_kept(self):
        text = "diabetes care program"
        spans = [
            PicoSpan("Population", TokenSpan.of(text, 0, 8)),
            PicoSpan("Intervention", TokenSpan.of(text, 0, 21)),
        ]

        class Fixed:
            def tag(self, doc):
                return spans

        merged = tag_spans(doc_of(text), Fixed())
        assert len(merged) == 2

    def test_sorted_output(self, corpus, gazetteer):
        tagger = GazetteerTagger(gazetteer)
        for doc, _ in corpus:
            spans = tag_spans(doc, tagger)
            keys = [(s.span.start, s.span.end, s.label) for s in spans]
            assert keys == sorted(keys)

    def test_null_tagger(self):
        assert tag_spans(doc_of("Anything."), NullTagger()) == []


class TestGroupEntities:
    def test_whitespace_and_hyphen_gaps_merge(self):
        text = "low-dose aspirin"
        spans = [
            PicoSpan("Intervention", TokenSpan.of(text, 0, 3)),
            PicoSpan("Intervention", TokenSpan.of(text, 4, 8)),
            PicoSpan("Intervention", TokenSpan.of(text, 9, 16)),
        ]
        grouped = group_entities(spans, text)
        assert len(grouped) == 1
        assert grouped[0].span.text == text

    def test_word_gap_blocks_merge(self):
        text = "aspirin or warfarin"
        spans = [
            PicoSpan("Intervention", TokenSpan.of(text, 0, 7)),
            PicoSpan("Intervention", TokenSpan.of(text, 11, 19)),
        ]
        assert len(group_entities(spans, text)) == 2

    def test_labels_grouped_independently(self):
        text = "aspirin pain"
        spans = [
            PicoSpan("Intervention", TokenSpan.of(text, 0, 7)),
            PicoSpan("Outcome", TokenSpan.of(text, 8, 12)),
        ]
        assert len(group_entities(spans, text)) == 2
