/** Shared types mirroring the annotation service's JSON API. */

export interface TaskView {
  example_id: string;
  title: string;
  /** Linearized table text: "title | ..." line, then " | "-separated rows. */
  table: string;
  image_url: string | null;
  sentences: string[];
  /** Sentence indices this rater has already submitted. */
  rated_indices: number[];
}

export type RatingAxis = 'entailed' | 'relevant' | 'grammatical';

export const RATING_AXES: readonly RatingAxis[] = [
  'entailed',
  'relevant',
  'grammatical',
];

export interface RatingSubmission {
  example_id: string;
  sentence_index: number;
  rater_id: string;
  entailed: boolean;
  relevant: boolean;
  grammatical: boolean;
}

export interface Progress {
  rater?: string;
  rated?: number;
  total: number;
  per_rater?: Record<string, number>;
}

export interface AgreementReport {
  n: number;
  kappa: number | null;
  kappa_entailed?: number | null;
  kappa_relevant?: number | null;
  kappa_grammatical?: number | null;
}

/** Per-sentence toggle state; an axis is undefined until the rater decides. */
export type SentenceToggles = Partial<Record<RatingAxis, boolean>>;
