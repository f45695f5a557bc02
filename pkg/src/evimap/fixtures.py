"""Bundled demo/test fixtures: ontology, gazetteer, and a 20-document trial
corpus with exhaustive gold annotations.

The corpus is generated programmatically so every character offset is
computed, never hand-counted.  Sixteen documents are randomized trials; four
are non-randomized reports the RCT gate should exclude.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .corpus import (
    Document,
    GoldAnnotations,
    GoldTriplet,
    TokenSpan,
    gold_to_record,
    document_to_record,
    parse_corpus_record,
)
from .ontology import Ontology, load_ontology
from .tagger import Gazetteer


def _data_path(name: str):
    return resources.files("evimap.data").joinpath(name)


def fixture_ontology() -> Ontology:
    with resources.as_file(_data_path("fixture_ontology.tsv")) as onto_path:
        with resources.as_file(_data_path("fixture_synonyms.tsv")) as syn_path:
            return load_ontology(onto_path, syn_path)


def fixture_gazetteer() -> Gazetteer:
    with resources.as_file(_data_path("fixture_gazetteer.tsv")) as path:
        return Gazetteer.load(path)


def abbrev_cases() -> list[tuple[str, str, str]]:
    """(context, expected_short, expected_long); empty expectations = no pair."""
    cases = []
    for line in _data_path("abbrev_cases.tsv").read_text().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        context = parts[0]
        short = parts[1] if len(parts) > 1 else ""
        long = parts[2] if len(parts) > 2 else ""
        cases.append((context, short, long))
    return cases


class _DocSpec:
    """Composes an abstract from fragments, tracking every labeled span."""

    def __init__(self, doc_id: str, title: str, meta: dict | None = None):
        self.doc_id = doc_id
        self.title = title
        self.meta = meta or {}
        self._parts: list[str] = []
        self._offset = 0
        self.spans: list[tuple[str, int, int, str]] = []  # (label, start, end, text)
        self.evidence: list[int] = []
        self._n_sentences = 0
        self.triplets: list[dict] = []

    def sentence(self, *frags, evidence: bool = False) -> int:
        if self._parts:
            self._parts.append(" ")
            self._offset += 1
        for frag in frags:
            if isinstance(frag, tuple):
                label, text = frag
                self.spans.append((label, self._offset, self._offset + len(text), text))
            else:
                text = frag
            self._parts.append(text)
            self._offset += len(text)
        index = self._n_sentences
        self._n_sentences += 1
        if evidence:
            self.evidence.append(index)
        return index

    def _first_span(self, label: str, text: str) -> TokenSpan:
        for l, start, end, t in self.spans:
            if l == label and t == text:
                return TokenSpan(start, end, t)
        raise LookupError(f"{self.doc_id}: no {label} span with text {text!r}")

    def _span_in_sentence(self, label: str, text: str, doc: Document, sentence_index: int) -> TokenSpan:
        s = doc.sentences[sentence_index]
        for l, start, end, t in self.spans:
            if l == label and t == text and s.start <= start and end <= s.end:
                return TokenSpan(start, end, t)
        raise LookupError(f"{self.doc_id}: no {label} span {text!r} in sentence {sentence_index}")

    def triplet(self, intervention: str, comparator: str, outcome: str,
                evidence_index: int, direction: str):
        self.triplets.append(
            {
                "i": intervention,
                "c": comparator,
                "o": outcome,
                "evidence": evidence_index,
                "direction": direction,
            }
        )

    def build(self, concept_ids: set[str]) -> tuple[Document, GoldAnnotations]:
        abstract = "".join(self._parts)
        doc = parse_corpus_record(
            {"doc_id": self.doc_id, "title": self.title, "abstract": abstract, "meta": self.meta}
        )
        triplets = []
        for t in self.triplets:
            # gold I/C reference the first occurrence of the treatment text,
            # matching the candidate-dedup rule used during assembly
            triplets.append(
                GoldTriplet(
                    intervention=self._first_span("Intervention", t["i"]),
                    comparator=self._first_span("Intervention", t["c"]),
                    outcome=self._span_in_sentence("Outcome", t["o"], doc, t["evidence"]),
                    evidence_sentence_index=t["evidence"],
                    direction=t["direction"],
                )
            )
        gold = GoldAnnotations(
            doc_id=self.doc_id,
            pico_spans=tuple(
                (label, TokenSpan(start, end, text))
                for label, start, end, text in self.spans
            ),
            evidence_sentence_indices=frozenset(self.evidence),
            triplets=tuple(triplets),
            concept_ids=frozenset(concept_ids),
        )
        return doc, gold


def _rct(doc_id, condition, cond_concept, drug_a, a_concept, drug_b, b_concept,
         outcome, outcome_concept, direction, year, extra=None):
    """Standard five-sentence trial abstract; `extra` appends a second
    evidence sentence with another outcome."""
    spec = _DocSpec(
        doc_id,
        f"Randomized controlled trial of {drug_a} versus {drug_b} in {condition}",
        meta={"year": year, "journal": "Fixture Journal of Trials"},
    )
    spec.sentence(
        "Patients with ", ("Population", condition),
        " were recruited from outpatient clinics.",
    )
    spec.sentence(
        "Participants were randomly assigned to ", ("Intervention", drug_a),
        " or ", ("Intervention", drug_b), " for the study period.",
    )
    spec.sentence("The primary outcome was ", ("Outcome", outcome), f" at {12 + (year % 5) * 6} weeks.")
    spec.sentence(f"A total of {120 + (year % 7) * 20} adults completed follow-up.")
    verb = {
        "decreased": "significantly reduced",
        "increased": "significantly increased",
    }.get(direction)
    if verb:
        ev = spec.sentence(
            ("Intervention", drug_a.capitalize()), f" {verb} ",
            ("Outcome", outcome), " compared with ", ("Intervention", drug_b), ".",
            evidence=True,
        )
    else:
        ev = spec.sentence(
            "There was no significant difference in ", ("Outcome", outcome),
            " between ", ("Intervention", drug_a), " and ", ("Intervention", drug_b), ".",
            evidence=True,
        )
    spec.triplet(drug_a, drug_b, outcome, ev, direction)
    concepts = {cond_concept, a_concept, b_concept, outcome_concept}
    if extra:
        outcome2, o2_concept, direction2 = extra
        if direction2 == "no_difference":
            ev2 = spec.sentence(
                ("Outcome", outcome2.capitalize()), " did not differ significantly between ",
                ("Intervention", drug_a), " and ", ("Intervention", drug_b), ".",
                evidence=True,
            )
            outcome2_text = outcome2.capitalize()
        else:
            ev2 = spec.sentence(
                ("Intervention", drug_a.capitalize()),
                " significantly increased " if direction2 == "increased" else " significantly reduced ",
                ("Outcome", outcome2), " relative to ", ("Intervention", drug_b), ".",
                evidence=True,
            )
            outcome2_text = outcome2
        spec.triplet(drug_a, drug_b, outcome2_text, ev2, direction2)
        concepts.add(o2_concept)
    return spec, concepts


def _non_rct(doc_id, kind, condition, cond_concept, drug, drug_concept, year):
    spec = _DocSpec(
        doc_id,
        f"{kind} of {drug} use in {condition}",
        meta={"year": year, "journal": "Fixture Journal of Observation"},
    )
    spec.sentence(
        "Adults with ", ("Population", condition),
        " were identified from routine records.",
    )
    spec.sentence(
        "Treatment with ", ("Intervention", drug),
        " followed clinician preference without allocation.",
    )
    spec.sentence("Outcomes were summarized descriptively over one year.")
    return spec, {cond_concept, drug_concept}


def build_fixture_corpus() -> list[tuple[Document, GoldAnnotations]]:
    specs: list[tuple[_DocSpec, set[str]]] = []
    specs.append(_rct("D01", "type 2 diabetes", "C004", "metformin", "D003",
                      "placebo", "D025", "HbA1c", "O005", "decreased", 2016,
                      extra=("body weight", "O007", "no_difference")))
    specs.append(_rct("D02", "type 2 diabetes", "C004", "metformin", "D003",
                      "sitagliptin", "D005", "HbA1c", "O005", "no_difference", 2017))
    specs.append(_rct("D03", "type 2 diabetes", "C004", "insulin", "D004",
                      "metformin", "D003", "fasting blood glucose", "O006", "decreased", 2018))
    specs.append(_rct("D04", "hypertension", "C008", "lisinopril", "D007",
                      "placebo", "D025", "systolic blood pressure", "O003", "decreased", 2015))
    specs.append(_rct("D05", "hypertension", "C008", "amlodipine", "D008",
                      "lisinopril", "D007", "blood pressure", "O002", "no_difference", 2019))
    specs.append(_rct("D06", "migraine with aura", "C013", "sumatriptan", "D014",
                      "placebo", "D025", "headache duration", "O012", "decreased", 2014))
    specs.append(_rct("D07", "migraine", "C012", "sumatriptan", "D014",
                      "ibuprofen", "D011", "pain intensity", "O011", "decreased", 2016))
    specs.append(_rct("D08", "heart failure", "C010", "aspirin", "D010",
                      "placebo", "D025", "mortality", "O013", "no_difference", 2013))
    specs.append(_rct("D09", "heart failure", "C010", "atorvastatin", "D016",
                      "placebo", "D025", "LDL cholesterol", "O009", "decreased", 2018))
    specs.append(_rct("D10", "major depressive disorder", "C019", "sertraline", "D019",
                      "placebo", "D025", "depression score", "O016", "decreased", 2017))
    specs.append(_rct("D11", "depression", "C019", "cognitive behavioral therapy", "T003",
                      "usual care", "T004", "depressive symptoms", "O016", "decreased", 2019))
    specs.append(_rct("D12", "osteoarthritis", "C022", "exercise therapy", "T002",
                      "usual care", "T004", "pain intensity", "O011", "decreased", 2020))
    specs.append(_rct("D13", "asthma", "C016", "salbutamol", "D022",
                      "placebo", "D025", "lung function", "O017", "increased", 2015))
    specs.append(_rct("D14", "chronic obstructive pulmonary disease", "C017",
                      "inhaled corticosteroids", "D023", "placebo", "D025",
                      "exacerbation rate", "O018", "decreased", 2016))
    specs.append(_rct("D15", "rheumatoid arthritis", "C023", "ibuprofen", "D011",
                      "aspirin", "D010", "pain intensity", "O011", "no_difference", 2012))
    specs.append(_rct("D16", "obesity", "C006", "exercise therapy", "T002",
                      "usual care", "T004", "body weight", "O007", "decreased", 2021,
                      extra=("quality of life", "O015", "increased")))
    specs.append(_non_rct("D17", "Cohort study", "type 2 diabetes", "C004", "metformin", "D003", 2019))
    specs.append(_non_rct("D18", "Case series", "asthma", "C016", "salbutamol", "D022", 2018))
    specs.append(_non_rct("D19", "Observational study", "hypertension", "C008", "amlodipine", "D008", 2020))
    specs.append(_non_rct("D20", "Registry analysis", "osteoarthritis", "C022", "exercise therapy", "T002", 2017))
    return [spec.build(concepts) for spec, concepts in specs]


def write_fixture_files(out_dir: str | Path) -> dict[str, Path]:
    """Export the corpus feed and gold annotations as newline-delimited files,
    and copy the table fixtures, for CLI demos."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus = build_fixture_corpus()
    feed = out / "feed.jsonl"
    gold = out / "gold.jsonl"
    with feed.open("w", encoding="utf-8") as fh:
        for doc, _ in corpus:
            fh.write(json.dumps(document_to_record(doc), sort_keys=True) + "\n")
    with gold.open("w", encoding="utf-8") as fh:
        for _, g in corpus:
            fh.write(json.dumps(gold_to_record(g), sort_keys=True) + "\n")
    paths = {"feed": feed, "gold": gold}
    for name in ("fixture_ontology.tsv", "fixture_synonyms.tsv", "fixture_gazetteer.tsv", "abbrev_cases.tsv"):
        target = out / name
        target.write_text(_data_path(name).read_text(), encoding="utf-8")
        paths[name.split(".")[0]] = target
    return paths
