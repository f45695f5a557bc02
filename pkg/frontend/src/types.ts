/** Payload shapes of the HTTP API this UI consumes. */

export type Role = "population" | "intervention" | "outcome";

export const ROLES: readonly Role[] = ["population", "intervention", "outcome"];

export type CombineMode = "and" | "or";

export interface ApiRoleFilter {
  concept_ids: string[];
  mode: CombineMode;
}

export interface ApiQuery {
  population: ApiRoleFilter;
  intervention: ApiRoleFilter;
  outcome: ApiRoleFilter;
}

export interface Suggestion {
  concept_id: string;
  preferred_name: string;
  matched_synonym: string;
  via_preferred_name: boolean;
}

export interface ConceptCount {
  concept_id: string;
  preferred_name: string;
  doc_count: number;
}

export interface SearchResponse {
  doc_ids: string[];
  total: number;
  page: number;
  top_interventions: ConceptCount[];
  top_outcomes: ConceptCount[];
}

export interface EvidenceRef {
  doc_id: string;
  sentence_index: number;
}

export interface MapCellPayload {
  intervention_concept: string;
  intervention_name: string;
  outcome_concept: string;
  outcome_name: string;
  doc_ids: string[];
  n_increased: number;
  n_decreased: number;
  n_no_difference: number;
  evidence_refs: EvidenceRef[];
  summary: {
    n_trials: number;
    n_findings: number;
    net_direction_score: number;
  };
}

export interface MapResponse {
  interventions: string[];
  outcomes: string[];
  cells: MapCellPayload[];
  skipped_unlinked: number;
}

export interface SpanPayload {
  start: number;
  end: number;
  text: string;
  label: string;
  confidence: number;
  source: string;
}

export interface TripletPayload {
  intervention: { start: number; end: number; text: string };
  comparator: { start: number; end: number; text: string };
  outcome: { start: number; end: number; text: string };
  evidence_sentence_index: number;
  direction: string;
}

export interface ExtractionPayload {
  doc_id: string;
  abstract: string;
  sentences: { index: number; start: number; end: number; text: string }[];
  spans: SpanPayload[];
  evidence_sentences: { sentence_index: number; confidence: number }[];
  triplets: TripletPayload[];
}

export interface DocResponse {
  doc_id: string;
  document: { doc_id: string; title: string; abstract: string };
  gate_decision: { is_rct: boolean; probability: number } | null;
  extraction: ExtractionPayload | null;
}

export interface ApiError {
  error: { code: string; message: string; fields: Record<string, string> };
}
