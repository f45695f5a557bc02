import json

import pytest
from hypothesis import given, strategies as st

from evimap.corpus import (
    CorpusError,
    Document,
    parse_corpus_record,
    segment_sentences,
    load_gold,
    read_feed,
    document_to_record,
)


def oracle_segment(text):
    """Independent rule-by-rule reimplementation: character walk instead of
    regex scanning.  Returns trimmed (start, end) sentence bounds."""
    exceptions = {
        "vs", "v.s", "e.g", "i.e", "etc", "cf", "ca", "approx", "al", "dr",
        "mr", "mrs", "ms", "prof", "fig", "figs", "no", "vol", "resp",
    }
    bounds = []
    cut_points = []
    i = 0
    n = len(text)
    while i < n:
        if text[i] in ".!?":
            j = i
            while j < n and text[j] in ".!?":
                j += 1
            k = j
            while k < n and text[k].isspace():
                k += 1
            ok = True
            if k == j and k < n:
                ok = False
            if ok and k < n and not (text[k].isupper() or text[k].isdigit()):
                ok = False
            if ok:
                w = i
                while w > 0 and not text[w - 1].isspace():
                    w -= 1
                token = text[w:i]
                if token.lower() in exceptions:
                    ok = False
            if ok:
                cut_points.append(j)
            i = j
        else:
            i += 1
    if not cut_points or cut_points[-1] < n:
        cut_points.append(n)
    prev = 0
    for cut in cut_points:
        a, b = prev, cut
        while a < b and text[a].isspace():
            a += 1
        while b > a and text[b - 1].isspace():
            b -= 1
        if b > a:
            bounds.append((a, b))
        prev = cut
    return bounds


class TestSegmentation:
    def test_two_sentences(self):
        sents = segment_sentences("We did X. Results were Y.")
        assert [s.text for s in sents] == ["We did X.", "Results were Y."]

    def test_abbreviation_and_decimal_do_not_split(self):
        sents = segment_sentences("Dose was 2.5 mg vs. placebo.")
        assert len(sents) == 1

    def test_empty(self):
        assert segment_sentences("") == []

    def test_tiling(self, corpus):
        for doc, _ in corpus:
            prev_end = 0
            for s in doc.sentences:
                gap = doc.abstract[prev_end : s.start]
                assert gap.strip() == ""
                assert doc.abstract[s.start : s.end] == s.text
                prev_end = s.end
            assert doc.abstract[prev_end:].strip() == ""

    def test_matches_oracle_on_fixture_corpus(self, corpus):
        for doc, _ in corpus:
            got = [(s.start, s.end) for s in segment_sentences(doc.abstract)]
            assert got == oracle_segment(doc.abstract)

    def test_matches_oracle_on_title_and_edge_texts(self):
        texts = [
            "One. Two! Three? Four.",
            "Names like J. Smith still split. Next sentence.",
            "Mean was 3.14 overall. Dr. Jones agreed.",
            "e.g. something. E.g. more!  Trailing   ",
            "No punctuation at all",
            "Multiple!!! Exclamations? Yes.",
        ]
        for text in texts:
            got = [(s.start, s.end) for s in segment_sentences(text)]
            assert got == oracle_segment(text), text

    @given(st.text(alphabet="aB .!?2", max_size=40))
    def test_matches_oracle_on_random_text(self, text):
        got = [(s.start, s.end) for s in segment_sentences(text)]
        assert got == oracle_segment(text)

    def test_idempotent_on_segments(self, corpus):
        for doc, _ in corpus:
            for s in doc.sentences:
                again = segment_sentences(s.text)
                assert len(again) == 1
                assert again[0].text == s.text


class TestParseRecord:
    def test_basic(self):
        doc = parse_corpus_record({"id": "D1", "title": "T", "abstract": "A trial. It worked."})
        assert doc.doc_id == "D1"
        assert len(doc.sentences) == 2

    def test_missing_abstract(self):
        with pytest.raises(CorpusError, match="missing abstract"):
            parse_corpus_record({"id": "D2", "title": "T"})

    def test_empty_doc_id(self):
        with pytest.raises(CorpusError, match="empty doc_id"):
            parse_corpus_record({"id": "", "abstract": "A."})

    def test_meta_carried(self):
        doc = parse_corpus_record(
            {"doc_id": "D3", "title": "T", "abstract": "A.", "meta": {"year": 2020}}
        )
        assert doc.meta == {"year": 2020}

    def test_round_trip(self, corpus):
        for doc, _ in corpus:
            again = parse_corpus_record(document_to_record(doc))
            assert again == doc


class TestGold:
    def test_round_trip_via_files(self, fixture_files, corpus):
        docs = {}
        for _ln, item in read_feed(fixture_files["feed"]):
            assert isinstance(item, Document)
            docs[item.doc_id] = item
        gold = load_gold(fixture_files["gold"], docs)
        assert set(gold) == {doc.doc_id for doc, _ in corpus}
        original = {g.doc_id: g for _, g in corpus}
        for doc_id, g in gold.items():
            assert g == original[doc_id]

    def test_out_of_bounds_span_rejected(self, tmp_path, fixture_files):
        docs = {}
        for _ln, item in read_feed(fixture_files["feed"]):
            docs[item.doc_id] = item
        bad = tmp_path / "bad.jsonl"
        bad.write_text(json.dumps({
            "doc_id": "D01",
            "pico_spans": [{"label": "Outcome", "start": 0, "end": 100000}],
        }) + "\n")
        with pytest.raises(CorpusError, match="out of bounds"):
            load_gold(bad, docs)

    def test_unknown_direction_rejected(self, tmp_path, fixture_files):
        docs = {}
        for _ln, item in read_feed(fixture_files["feed"]):
            docs[item.doc_id] = item
        bad = tmp_path / "bad.jsonl"
        bad.write_text(json.dumps({
            "doc_id": "D01",
            "triplets": [{
                "intervention": {"start": 0, "end": 5},
                "comparator": {"start": 6, "end": 10},
                "outcome": {"start": 11, "end": 15},
                "evidence_sentence_index": 0,
                "direction": "improved",
            }],
        }) + "\n")
        with pytest.raises(CorpusError, match="unknown direction"):
            load_gold(bad, docs)
