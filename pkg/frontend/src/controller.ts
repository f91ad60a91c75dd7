/** Rating session logic, independent of the DOM.
 *
 * Holds the current task, per-sentence toggle state and submission
 * status. Submissions are optimistic with rollback on rejection;
 * toggles are never lost on transient network failure, so a retry
 * resubmits exactly what the rater chose.
 */

import { ApiError, NetworkError } from './api.js';
import {
  RATING_AXES,
  type Progress,
  type RatingAxis,
  type RatingSubmission,
  type SentenceToggles,
  type TaskView,
} from './types.js';

/** The slice of the HTTP client the session logic needs. */
export interface AnnotationApi {
  fetchNextTask(raterId: string): Promise<TaskView | null>;
  submitRating(rating: RatingSubmission): Promise<void>;
  fetchProgress(raterId: string): Promise<Progress>;
}

export type Phase = 'loading' | 'task' | 'done' | 'error';

export interface SentenceState {
  text: string;
  toggles: SentenceToggles;
  submitted: boolean;
  /** An optimistic submit is in flight for this sentence. */
  inFlight: boolean;
}

export class AnnotationController {
  phase: Phase = 'loading';
  task: TaskView | null = null;
  sentences: SentenceState[] = [];
  selected = 0;
  progress: Progress | null = null;
  warnings: string[] = [];
  /** Set when a submit failed on transport; toggles are preserved. */
  retryable = false;
  errorMessage = '';

  private listeners: Array<() => void> = [];

  constructor(
    private readonly api: AnnotationApi,
    readonly raterId: string,
  ) {}

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  async loadNext(): Promise<void> {
    this.phase = 'loading';
    this.warnings = [];
    this.retryable = false;
    this.notify();
    try {
      const task = await this.api.fetchNextTask(this.raterId);
      this.progress = await this.api.fetchProgress(this.raterId);
      if (task === null) {
        this.phase = 'done';
        this.task = null;
        this.sentences = [];
      } else {
        this.phase = 'task';
        this.task = task;
        this.selected = 0;
        this.sentences = task.sentences.map((text, index) => ({
          text,
          toggles: {},
          submitted: task.rated_indices.includes(index),
          inFlight: false,
        }));
      }
    } catch (error) {
      this.phase = 'error';
      this.errorMessage = String(error);
      this.retryable = error instanceof NetworkError;
    }
    this.notify();
  }

  setToggle(sentenceIndex: number, axis: RatingAxis, value: boolean): void {
    const sentence = this.sentences[sentenceIndex];
    if (!sentence || sentence.submitted || sentence.inFlight) return;
    sentence.toggles[axis] = value;
    this.notify();
  }

  /** Cycle an axis: unset -> yes -> no -> yes -> ... */
  flipToggle(sentenceIndex: number, axis: RatingAxis): void {
    const sentence = this.sentences[sentenceIndex];
    if (!sentence || sentence.submitted || sentence.inFlight) return;
    const current = sentence.toggles[axis];
    sentence.toggles[axis] = current === undefined ? true : !current;
    this.notify();
  }

  selectSentence(index: number): void {
    if (index >= 0 && index < this.sentences.length) {
      this.selected = index;
      this.notify();
    }
  }

  sentenceComplete(sentence: SentenceState): boolean {
    return RATING_AXES.every((axis) => sentence.toggles[axis] !== undefined);
  }

  /** Submit is enabled only when every pending sentence is fully toggled. */
  canSubmit(): boolean {
    if (this.phase !== 'task') return false;
    const pending = this.sentences.filter((s) => !s.submitted);
    return pending.length > 0 && pending.every((s) => this.sentenceComplete(s));
  }

  async submit(): Promise<void> {
    if (!this.canSubmit() || this.task === null) return;
    this.retryable = false;
    this.warnings = [];
    let failed = false;
    for (let index = 0; index < this.sentences.length; index += 1) {
      const sentence = this.sentences[index]!;
      if (sentence.submitted || failed) continue;
      // optimistic: mark submitted, roll back if the service rejects it
      sentence.submitted = true;
      sentence.inFlight = true;
      this.notify();
      try {
        await this.api.submitRating({
          example_id: this.task.example_id,
          sentence_index: index,
          rater_id: this.raterId,
          entailed: sentence.toggles.entailed!,
          relevant: sentence.toggles.relevant!,
          grammatical: sentence.toggles.grammatical!,
        });
      } catch (error) {
        if (error instanceof ApiError && error.status === 409) {
          // already rated elsewhere: keep it marked, warn, no double count
          this.warnings.push(`sentence ${index + 1} was already rated`);
        } else {
          sentence.submitted = false;
          failed = true;
          if (error instanceof NetworkError) {
            this.retryable = true;
            this.warnings.push('connection lost — your choices are kept, retry to resubmit');
          } else {
            this.warnings.push(`sentence ${index + 1} rejected: ${String(error)}`);
          }
        }
      } finally {
        sentence.inFlight = false;
      }
      this.notify();
    }
    if (!failed && this.sentences.every((s) => s.submitted)) {
      // keep warnings (e.g. "already rated") visible on the next screen
      const carried = this.warnings;
      await this.loadNext();
      this.warnings = carried;
      this.notify();
    } else {
      try {
        this.progress = await this.api.fetchProgress(this.raterId);
      } catch {
        // progress refresh is best-effort
      }
      this.notify();
    }
  }
}
