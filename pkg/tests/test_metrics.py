import random
from types import SimpleNamespace

import pytest

from evimap.corpus import TokenSpan, parse_corpus_record
from evimap.metrics import (
    PRF,
    concept_eval,
    entity_prf,
    macro_average,
    per_class_direction_scores,
    pico_report,
    sentence_prf,
    token_prf,
)
from evimap.ontology import Concept, Ontology
from evimap.tagger import PicoSpan

TEXT = "alpha beta gamma delta epsilon zeta eta"
# token offsets: alpha 0-5, beta 6-10, gamma 11-16, delta 17-22,
# epsilon 23-30, zeta 31-35, eta 36-39
DOC = parse_corpus_record({"doc_id": "M", "title": "", "abstract": TEXT})


def outcome(start, end):
    return PicoSpan("Outcome", TokenSpan.of(TEXT, start, end))


class TestTokenPRF:
    def test_hand_computed(self):
        # gold covers tokens 0-4 (5 tokens), pred covers tokens 2-5 (4 tokens);
        # overlap is tokens 2-4: tp=3, fp=1, fn=2
        gold = [outcome(0, 30)]
        pred = [outcome(11, 35)]
        m = token_prf(pred, gold, DOC, "Outcome")
        assert (m.tp, m.fp, m.fn) == (3, 1, 2)
        assert m.precision == 0.75
        assert m.recall == 0.6
        assert abs(m.f1 - 2 / 3) <= 1e-12

    def test_partial_token_coverage_counts(self):
        # pred covering only part of a token still claims that token
        pred = [outcome(11, 13)]
        gold = [outcome(11, 16)]
        m = token_prf(pred, gold, DOC, "Outcome")
        assert (m.tp, m.fp, m.fn) == (1, 0, 0)

    def test_label_filter(self):
        pred = [PicoSpan("Intervention", TokenSpan.of(TEXT, 0, 5))]
        gold = [outcome(0, 5)]
        m = token_prf(pred, gold, DOC, "Outcome")
        assert (m.tp, m.fp, m.fn) == (0, 0, 1)

    def test_empty_both_zero(self):
        m = token_prf([], [], DOC, "Outcome")
        assert (m.precision, m.recall, m.f1) == (0.0, 0.0, 0.0)


class TestEntityPRF:
    def test_each_gold_used_once(self):
        gold = [outcome(0, 16)]
        pred = [outcome(0, 5), outcome(6, 10)]
        m = entity_prf(pred, gold, "Outcome")
        assert (m.tp, m.fp, m.fn) == (1, 1, 0)

    def test_lenient_overlap(self):
        gold = [outcome(0, 10)]
        pred = [outcome(6, 16)]
        m = entity_prf(pred, gold, "Outcome")
        assert (m.tp, m.fp, m.fn) == (1, 0, 0)

    def test_disjoint_no_match(self):
        gold = [outcome(0, 5)]
        pred = [outcome(17, 22)]
        m = entity_prf(pred, gold, "Outcome")
        assert (m.tp, m.fp, m.fn) == (0, 1, 1)


class TestSentencePRF:
    def test_hand_computed(self):
        m = sentence_prf({0, 1, 2}, {1, 2, 3})
        assert (m.tp, m.fp, m.fn) == (2, 1, 1)
        assert abs(m.precision - 2 / 3) <= 1e-12
        assert abs(m.recall - 2 / 3) <= 1e-12

    def test_order_and_duplicates_ignored(self):
        assert sentence_prf([2, 1, 1, 0], [0, 1, 2]) == sentence_prf({0, 1, 2}, {0, 1, 2})


class TestF1Identity:
    def test_f1_matches_definition(self):
        rng = random.Random(0)
        for _ in range(200):
            tp, fp, fn = rng.randint(0, 50), rng.randint(0, 50), rng.randint(0, 50)
            m = PRF.from_counts(tp, fp, fn)
            if m.precision + m.recall == 0:
                assert m.f1 == 0.0
            else:
                expected = 2 * m.precision * m.recall / (m.precision + m.recall)
                assert abs(m.f1 - expected) <= 1e-12

    def test_macro_average(self):
        a = PRF.from_counts(1, 0, 0)
        b = PRF.from_counts(0, 1, 1)
        macro = macro_average({"A": a, "B": b})
        assert macro["precision"] == 0.5
        assert macro["recall"] == 0.5


def triplet(i, c, o, ev, direction):
    return SimpleNamespace(
        intervention=TokenSpan(i, i + 3, TEXT[i : i + 3]),
        comparator=TokenSpan(c, c + 3, TEXT[c : c + 3]),
        outcome=TokenSpan(o, o + 3, TEXT[o : o + 3]),
        evidence_sentence_index=ev,
        direction=direction,
    )


class TestDirectionScores:
    def gold(self):
        return [
            ("D1", triplet(0, 6, 11, 0, "increased")),
            ("D1", triplet(0, 6, 17, 0, "decreased")),
            ("D2", triplet(0, 6, 11, 0, "no_difference")),
        ]

    def test_hand_computed_confusion(self):
        pred = [
            ("D1", triplet(0, 6, 11, 0, "increased")),      # correct
            ("D1", triplet(0, 6, 17, 0, "no_difference")),  # dec -> nd confusion
            ("D2", triplet(0, 6, 11, 0, "no_difference")),  # correct
            ("D3", triplet(0, 6, 11, 0, "increased")),      # unmatched prediction
        ]
        scores = per_class_direction_scores(pred, self.gold())
        inc, dec, nd = (
            scores["increased"],
            scores["decreased"],
            scores["no_difference"],
        )
        assert (inc.tp, inc.fp, inc.fn) == (1, 1, 0)
        assert (dec.tp, dec.fp, dec.fn) == (0, 0, 1)
        assert (nd.tp, nd.fp, nd.fn) == (1, 1, 0)

    def test_gold_prompts_requires_exact_spans(self):
        pred = [("D1", triplet(1, 6, 11, 0, "increased"))]  # shifted intervention
        scores = per_class_direction_scores(pred, self.gold())
        assert scores["increased"].tp == 0
        assert scores["increased"].fp == 1

    def test_predicted_prompts_matches_by_overlap(self):
        pred = [("D1", triplet(1, 7, 12, 0, "increased"))]  # all spans overlap gold
        scores = per_class_direction_scores(
            pred, self.gold(), mode="predicted_prompts"
        )
        assert scores["increased"].tp == 1

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError, match="mode"):
            per_class_direction_scores([], [], mode="bogus")


def toy_ontology():
    concepts = {
        "A": Concept("A", "Alpha", (), ()),
        "B": Concept("B", "Beta", (), ()),
        "C": Concept("C", "Gamma", ("B",), ()),
        "D": Concept("D", "Delta", ("C",), ()),
    }
    return Ontology(concepts)


class TestConceptEval:
    def test_strict_vs_relaxed_hand_computed(self):
        onto = toy_ontology()
        pred = {"doc": {"A", "B"}}
        gold = {"doc": {"A", "C"}}
        strict, _, _, _ = concept_eval(pred, gold, onto, relaxed=False)
        assert (strict.precision, strict.recall) == (0.5, 0.5)
        relaxed, _, _, _ = concept_eval(pred, gold, onto, relaxed=True)
        assert (relaxed.precision, relaxed.recall) == (1.0, 1.0)

    def test_grandparent_not_matched_even_relaxed(self):
        onto = toy_ontology()
        relaxed, _, _, _ = concept_eval(
            {"doc": {"B"}}, {"doc": {"D"}}, onto, relaxed=True
        )
        assert relaxed.tp == 0

    def test_tallies_and_averages(self):
        onto = toy_ontology()
        prf, tally, avg_pred, avg_gold = concept_eval(
            {"d1": {"A", "B"}, "d2": {"B"}},
            {"d1": {"A"}, "d2": {"C", "D"}},
            onto,
            relaxed=False,
        )
        assert dict(tally.false_positives)["Beta"] == 2
        assert set(dict(tally.false_negatives)) == {"Gamma", "Delta"}
        assert avg_pred == 1.5
        assert avg_gold == 1.5

    def test_relaxed_never_below_strict_random_dags(self):
        rng = random.Random(7)
        checked = 0
        while checked < 100:
            n = rng.randint(3, 12)
            concepts = {}
            for i in range(n):
                parents = ()
                if i and rng.random() < 0.7:
                    parents = (f"K{rng.randrange(i)}",)
                concepts[f"K{i}"] = Concept(f"K{i}", f"Name{i}", parents, ())
            onto = Ontology(concepts)
            ids = list(concepts)
            pred = {"doc": {rng.choice(ids) for _ in range(rng.randint(0, 6))}}
            gold = {"doc": {rng.choice(ids) for _ in range(rng.randint(0, 6))}}
            strict, _, _, _ = concept_eval(pred, gold, onto, relaxed=False)
            relaxed, _, _, _ = concept_eval(pred, gold, onto, relaxed=True)
            assert relaxed.tp >= strict.tp
            assert relaxed.precision >= strict.precision
            assert relaxed.recall >= strict.recall
            assert relaxed.f1 >= strict.f1
            checked += 1


class TestPicoReport:
    def test_structure_and_perfect_scores(self):
        pred = {"M": [outcome(0, 5)]}
        gold = {"M": [outcome(0, 5)]}
        report = pico_report(pred, gold, {"M": DOC})
        assert set(report) == {"token", "entity", "macro_token", "macro_entity"}
        assert report["token"]["Outcome"]["f1"] == 1.0
        assert report["entity"]["Outcome"]["f1"] == 1.0
        # labels with no spans at all contribute zeros to the macro rows
        assert report["macro_token"]["f1"] == pytest.approx(1 / 3)
