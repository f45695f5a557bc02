/** Annotated-abstract rendering: character-offset highlighting.
 *
 * The API's offsets are Unicode code-point indices.  JavaScript strings are
 * UTF-16, so all slicing here goes through a code-point array; astral
 * characters in the abstract must not shift any highlight.
 */

import { DocResponse, SpanPayload } from "./types.js";

export interface Segment {
  /** Code-point offsets into the abstract. */
  start: number;
  end: number;
  text: string;
  /** Labels of every span covering this segment (nesting order = start order). */
  labels: string[];
  inEvidenceSentence: boolean;
}

export interface DocumentView {
  docId: string;
  banner: string | null;
  segments: Segment[];
  legend: string[];
  triplets: { intervention: string; comparator: string; outcome: string; direction: string }[];
}

function codePoints(text: string): string[] {
  return Array.from(text);
}

/** Substring by code-point offsets (not UTF-16 units). */
export function sliceByCodePoints(text: string, start: number, end: number): string {
  return codePoints(text).slice(start, end).join("");
}

/** Split the abstract into contiguous segments at every span/sentence
 * boundary; overlapping spans stack their labels. */
export function segmentAbstract(
  abstract: string,
  spans: { start: number; end: number; label: string }[],
  evidenceRanges: { start: number; end: number }[] = [],
): Segment[] {
  const points = codePoints(abstract);
  const cuts = new Set<number>([0, points.length]);
  for (const s of spans) {
    cuts.add(s.start);
    cuts.add(s.end);
  }
  for (const r of evidenceRanges) {
    cuts.add(r.start);
    cuts.add(r.end);
  }
  const ordered = [...cuts].filter((c) => c >= 0 && c <= points.length).sort((a, b) => a - b);

  const segments: Segment[] = [];
  for (let k = 0; k + 1 < ordered.length; k++) {
    const start = ordered[k]!;
    const end = ordered[k + 1]!;
    if (end <= start) continue;
    const covering = spans
      .filter((s) => s.start <= start && end <= s.end)
      .sort((a, b) => a.start - b.start || b.end - a.end);
    segments.push({
      start,
      end,
      text: points.slice(start, end).join(""),
      labels: covering.map((s) => s.label),
      inEvidenceSentence: evidenceRanges.some((r) => r.start <= start && end <= r.end),
    });
  }
  return segments;
}

export function buildDocumentView(payload: DocResponse): DocumentView {
  const extraction = payload.extraction;
  if (extraction === null) {
    return {
      docId: payload.doc_id,
      banner: "classified as non-RCT",
      segments: [],
      legend: [],
      triplets: [],
    };
  }
  const evidenceIndices = new Set(
    extraction.evidence_sentences.map((e) => e.sentence_index),
  );
  const evidenceRanges = extraction.sentences
    .filter((s) => evidenceIndices.has(s.index))
    .map((s) => ({ start: s.start, end: s.end }));
  const segments = segmentAbstract(extraction.abstract, extraction.spans, evidenceRanges);
  const legend = [...new Set(extraction.spans.map((s: SpanPayload) => s.label))].sort();
  return {
    docId: payload.doc_id,
    banner: null,
    segments,
    legend,
    triplets: extraction.triplets.map((t) => ({
      intervention: t.intervention.text,
      comparator: t.comparator.text,
      outcome: t.outcome.text,
      direction: t.direction,
    })),
  };
}
