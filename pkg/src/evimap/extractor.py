"""Evidence sentences, ICO triplet assembly, and result directionality.

Assembly is outcome-anchored: outcomes are usually explicit in evidence
sentences while the compared treatments often are not, so for every outcome
inside an evidence sentence we rank the document's treatment candidates for
the intervention and comparator roles and emit a triplet only when both
clear the role threshold.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .corpus import DIRECTIONS, Document, GoldAnnotations, Sentence, TokenSpan
from .features import LabeledExample
from .normalize import normalize_text
from .tagger import PicoSpan

EVIDENCE_CLASSES = ("not_evidence", "evidence")
ROLE_CLASSES = ("intervention", "comparator", "not_involved")
CONTEXT_SENTENCES = 4  # first sentences of the article used as relation context


@dataclass(frozen=True)
class EvidenceSentence:
    sentence_index: int
    confidence: float

    def __post_init__(self):
        if not (0.0 <= self.confidence <= 1.0):
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")


@dataclass(frozen=True)
class RoleScore:
    treatment: PicoSpan
    p_intervention: float
    p_comparator: float
    p_not_involved: float

    def __post_init__(self):
        total = self.p_intervention + self.p_comparator + self.p_not_involved
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"role probabilities sum to {total}, not 1")


@dataclass(frozen=True)
class IcoTriplet:
    intervention: PicoSpan
    comparator: PicoSpan
    outcome: PicoSpan
    evidence_sentence_index: int
    direction: str
    direction_probs: tuple[float, float, float]  # order matches DIRECTIONS
    role_scores: tuple[RoleScore, ...] = ()

    def __post_init__(self):
        if self.direction not in DIRECTIONS + ("unknown",):
            raise ValueError(f"unknown direction {self.direction!r}")


def classify_evidence_sentences(doc: Document, classifier, threshold: float = 0.3) -> list[EvidenceSentence]:
    """Sentences whose evidence probability clears the (recall-biased) threshold."""
    out = []
    ev_index = list(classifier.classes).index("evidence")
    for sentence in doc.sentences:
        probs = classifier.predict([sentence.text])
        p = float(probs[ev_index])
        if p >= threshold:
            out.append(EvidenceSentence(sentence_index=sentence.index, confidence=p))
    return out


@dataclass(frozen=True)
class EvidenceExample:
    doc_id: str
    sentence_index: int
    example: LabeledExample
    length_fallback: bool = False


@dataclass
class EvidenceTrainingSet:
    examples: list[EvidenceExample]
    all_evidence_docs: list[str] = field(default_factory=list)
    # docs with fewer non-evidence sentences than positives: |neg| < |pos|
    short_docs: list[str] = field(default_factory=list)

    def positives(self, doc_id=None):
        return [e for e in self.examples if e.example.label == 1
                and (doc_id is None or e.doc_id == doc_id)]

    def negatives(self, doc_id=None):
        return [e for e in self.examples if e.example.label == 0
                and (doc_id is None or e.doc_id == doc_id)]


def build_evidence_training_set(
    gold_corpus: list[tuple[Document, GoldAnnotations]],
    length_tolerance: float = 0.2,
    seed: int = 0,
) -> EvidenceTrainingSet:
    """Positives are gold evidence sentences; negatives are an equal number of
    length-matched sentences sampled from the rest of each document.

    A candidate negative must be within `length_tolerance` (relative) of some
    positive's character length; if none qualifies the nearest-length sentence
    is used and flagged.  Deterministic per document under the seed.
    """
    result = EvidenceTrainingSet(examples=[])
    for doc, gold in gold_corpus:
        rng = random.Random(f"{seed}:{doc.doc_id}")
        positives = [doc.sentences[i] for i in sorted(gold.evidence_sentence_indices)]
        others = [s for s in doc.sentences if s.index not in gold.evidence_sentence_indices]
        for s in positives:
            result.examples.append(
                EvidenceExample(doc.doc_id, s.index, LabeledExample((s.text,), 1))
            )
        if not others:
            if positives:
                result.all_evidence_docs.append(doc.doc_id)
            continue
        pos_lengths = [len(s.text) for s in positives]
        pool = list(others)
        if len(pool) < len(positives) and positives:
            result.short_docs.append(doc.doc_id)
        for target_len in pos_lengths:
            if not pool:
                break
            matched = [
                s for s in pool
                if any(abs(len(s.text) - L) <= length_tolerance * L for L in pos_lengths)
            ]
            fallback = not matched
            if fallback:
                best = min(pool, key=lambda s: (abs(len(s.text) - target_len), s.index))
                choice = best
            else:
                choice = rng.choice(matched)
            pool.remove(choice)
            result.examples.append(
                EvidenceExample(
                    doc.doc_id,
                    choice.index,
                    LabeledExample((choice.text,), 0),
                    length_fallback=fallback,
                )
            )
    return result


def _context(doc: Document) -> str:
    return " ".join(s.text for s in doc.sentences[:CONTEXT_SENTENCES])


def build_relation_input(treatment: PicoSpan, evidence: Sentence, doc: Document) -> LabeledExample:
    """Segments: [treatment text, evidence sentence, first-sentences context]."""
    return LabeledExample(
        segments=(treatment.span.text, evidence.text, _context(doc)),
        label=ROLE_CLASSES.index("not_involved"),
    )


def dedup_candidates(candidates: list[PicoSpan]) -> list[PicoSpan]:
    """Keep the first span per normalized treatment text, in document order."""
    seen = set()
    out = []
    for c in sorted(candidates, key=lambda s: (s.span.start, s.span.end)):
        key = normalize_text(c.span.text)
        if key in seen:
            continue
        seen.add(key)
        out.append(c)
    return out


def rank_treatment_roles(
    outcome: PicoSpan,
    evidence: Sentence,
    candidates: list[PicoSpan],
    classifier,
    doc: Document,
) -> list[RoleScore]:
    scores = []
    for candidate in dedup_candidates(candidates):
        example = build_relation_input(candidate, evidence, doc)
        probs = classifier.predict(example.segments)
        scores.append(
            RoleScore(
                treatment=candidate,
                p_intervention=float(probs[0]),
                p_comparator=float(probs[1]),
                p_not_involved=float(probs[2]),
            )
        )
    scores.sort(key=lambda r: (-r.p_intervention, r.treatment.span.start))
    return scores


def classify_directionality(outcome: PicoSpan, evidence: Sentence, classifier):
    """Predict the outcome's movement from [outcome, evidence] alone.

    Ties break toward no_difference (conservative for clinical display)."""
    probs = np.asarray(classifier.predict([outcome.span.text, evidence.text]), dtype=float)
    nd = DIRECTIONS.index("no_difference")
    best = float(probs.max())
    if probs[nd] >= best - 1e-12:
        direction = "no_difference"
    else:
        direction = DIRECTIONS[int(np.argmax(probs))]
    return direction, tuple(float(p) for p in probs)


@dataclass
class AssemblyDiagnostics:
    doc_id: str
    near_misses: list[str] = field(default_factory=list)
    skipped_outcomes: list[str] = field(default_factory=list)


def assemble_ico(
    doc: Document,
    pico_spans: list[PicoSpan],
    evidence_sentences: list[EvidenceSentence],
    role_classifier,
    direction_classifier,
    role_threshold: float = 0.5,
) -> tuple[list[IcoTriplet], AssemblyDiagnostics]:
    diagnostics = AssemblyDiagnostics(doc_id=doc.doc_id)
    triplets: list[IcoTriplet] = []
    candidates = [s for s in pico_spans if s.label == "Intervention"]
    outcomes = [s for s in pico_spans if s.label == "Outcome"]

    for ev in evidence_sentences:
        sentence = doc.sentences[ev.sentence_index]
        local_outcomes = [
            o for o in outcomes
            if sentence.start <= o.span.start and o.span.end <= sentence.end
        ]
        for outcome in local_outcomes:
            scores = rank_treatment_roles(outcome, sentence, candidates, role_classifier, doc)
            scores = [
                s for s in scores
                if normalize_text(s.treatment.span.text) != normalize_text(outcome.span.text)
            ]
            if not scores:
                diagnostics.skipped_outcomes.append(
                    f"{outcome.span.text!r}@s{ev.sentence_index}: no candidates"
                )
                continue
            intervention = next(
                (s for s in scores if s.p_intervention >= role_threshold), None
            )
            comparator = None
            if intervention is not None:
                ikey = normalize_text(intervention.treatment.span.text)
                by_comp = sorted(scores, key=lambda r: (-r.p_comparator, r.treatment.span.start))
                comparator = next(
                    (
                        s for s in by_comp
                        if s.p_comparator >= role_threshold
                        and normalize_text(s.treatment.span.text) != ikey
                    ),
                    None,
                )
            if intervention is None or comparator is None:
                top = scores[0]
                diagnostics.near_misses.append(
                    f"{outcome.span.text!r}@s{ev.sentence_index}: "
                    f"best p_i={top.p_intervention:.3f} (threshold {role_threshold})"
                )
                continue
            direction, probs = classify_directionality(outcome, sentence, direction_classifier)
            triplet = IcoTriplet(
                intervention=intervention.treatment,
                comparator=comparator.treatment,
                outcome=outcome,
                evidence_sentence_index=ev.sentence_index,
                direction=direction,
                direction_probs=probs,
                role_scores=tuple(scores),
            )
            # hard invariant: the outcome lies inside its evidence sentence
            assert sentence.start <= triplet.outcome.span.start <= triplet.outcome.span.end <= sentence.end
            triplets.append(triplet)
    return triplets, diagnostics


@dataclass(frozen=True)
class RelationNegative:
    doc_id: str
    generator: str  # outcome_as_treatment | compound | spurious_span
    example: LabeledExample


def generate_relation_negatives(
    gold_corpus: list[tuple[Document, GoldAnnotations]],
    seed: int = 0,
    shares: dict[str, float] | None = None,
) -> list[RelationNegative]:
    """not_involved training examples via three corruption generators:
    (a) the triplet's own outcome as the treatment segment, (b) a synthetic
    "X and Y" compound from two gold treatments, (c) a random non-PICO span
    from the same document.  Deterministic per document under the seed."""
    shares = {"outcome_as_treatment": 1.0, "compound": 1.0, "spurious_span": 1.0, **(shares or {})}
    label = ROLE_CLASSES.index("not_involved")
    out: list[RelationNegative] = []

    for doc, gold in gold_corpus:
        rng = random.Random(f"{seed}:{doc.doc_id}")
        if not gold.triplets:
            continue
        context = _context(doc)
        n_gold = len(gold.triplets)

        def quota(name: str) -> int:
            return int(round(shares[name] * n_gold))

        # (a) outcome mislabeled as the treatment
        for triplet in gold.triplets[: quota("outcome_as_treatment")]:
            evidence = doc.sentences[triplet.evidence_sentence_index]
            out.append(
                RelationNegative(
                    doc.doc_id,
                    "outcome_as_treatment",
                    LabeledExample((triplet.outcome.text, evidence.text, context), label),
                )
            )

        # (b) compound phrase of two distinct treatments
        treatments = sorted(
            {t.intervention.text for t in gold.triplets}
            | {t.comparator.text for t in gold.triplets}
        )
        if len(treatments) >= 2:
            for triplet in gold.triplets[: quota("compound")]:
                a, b = rng.sample(treatments, 2)
                evidence = doc.sentences[triplet.evidence_sentence_index]
                out.append(
                    RelationNegative(
                        doc.doc_id,
                        "compound",
                        LabeledExample((f"{a} and {b}", evidence.text, context), label),
                    )
                )

        # (c) spurious span: random token window outside every gold PICO span
        gold_spans = [s for _, s in gold.pico_spans]
        tokens = _candidate_tokens(doc, gold_spans)
        if tokens:
            for triplet in gold.triplets[: quota("spurious_span")]:
                start_tok = rng.randrange(len(tokens))
                width = rng.randint(1, min(3, len(tokens) - start_tok))
                window = tokens[start_tok : start_tok + width]
                text = doc.abstract[window[0][0] : window[-1][1]]
                evidence = doc.sentences[triplet.evidence_sentence_index]
                out.append(
                    RelationNegative(
                        doc.doc_id,
                        "spurious_span",
                        LabeledExample((text, evidence.text, context), label),
                    )
                )
    return out


def _candidate_tokens(doc: Document, gold_spans: list[TokenSpan]) -> list[tuple[int, int]]:
    from .normalize import tokenize

    tokens = []
    for start, end, _ in tokenize(doc.abstract):
        if not doc.abstract[start].isalpha():
            continue
        if any(start < g.end and g.start < end for g in gold_spans):
            continue
        tokens.append((start, end))
    return tokens
