/** DOM rendering for the rating session.
 *
 * Pure function of the controller state: the whole view is re-rendered
 * on every change. Unsaved toggles carry the `pending` class so they
 * are visually distinct from submitted ones.
 */

import type { AnnotationController, SentenceState } from './controller.js';
import { parseLinearizedTable, renderTable } from './table.js';
import { RATING_AXES, type RatingAxis } from './types.js';

const AXIS_LABELS: Record<RatingAxis, string> = {
  entailed: 'Entailed (e)',
  relevant: 'Relevant (r)',
  grammatical: 'Grammatical (g)',
};

function toggleButton(
  doc: Document,
  controller: AnnotationController,
  sentenceIndex: number,
  sentence: SentenceState,
  axis: RatingAxis,
): HTMLElement {
  const wrap = doc.createElement('span');
  wrap.className = 'axis';
  const label = doc.createElement('span');
  label.className = 'axis-label';
  label.textContent = AXIS_LABELS[axis];
  wrap.appendChild(label);
  for (const value of [true, false]) {
    const button = doc.createElement('button');
    button.type = 'button';
    button.textContent = value ? 'yes' : 'no';
    button.className = 'toggle';
    button.dataset.axis = axis;
    button.dataset.value = String(value);
    if (sentence.toggles[axis] === value) {
      button.classList.add(sentence.submitted ? 'chosen' : 'pending');
    }
    button.disabled = sentence.submitted || sentence.inFlight;
    button.addEventListener('click', () => {
      controller.selectSentence(sentenceIndex);
      controller.setToggle(sentenceIndex, axis, value);
    });
    wrap.appendChild(button);
  }
  return wrap;
}

function sentenceCard(
  doc: Document,
  controller: AnnotationController,
  index: number,
  sentence: SentenceState,
): HTMLElement {
  const card = doc.createElement('li');
  card.className = 'sentence';
  if (index === controller.selected) card.classList.add('selected');
  if (sentence.submitted) card.classList.add('submitted');
  card.addEventListener('click', () => controller.selectSentence(index));
  const text = doc.createElement('p');
  text.textContent = `${index + 1}. ${sentence.text}`;
  card.appendChild(text);
  const toggles = doc.createElement('div');
  toggles.className = 'toggles';
  for (const axis of RATING_AXES) {
    toggles.appendChild(toggleButton(doc, controller, index, sentence, axis));
  }
  card.appendChild(toggles);
  return card;
}

export function render(controller: AnnotationController, root: HTMLElement): void {
  const doc = root.ownerDocument;
  root.textContent = '';

  const header = doc.createElement('header');
  const progress = doc.createElement('p');
  progress.className = 'progress';
  if (controller.progress) {
    progress.textContent =
      `Rater ${controller.raterId}: ` +
      `${controller.progress.rated ?? 0} / ${controller.progress.total} sentences rated`;
  }
  header.appendChild(progress);
  root.appendChild(header);

  for (const warning of controller.warnings) {
    const banner = doc.createElement('p');
    banner.className = 'warning';
    banner.textContent = warning;
    root.appendChild(banner);
  }

  if (controller.phase === 'loading') {
    const p = doc.createElement('p');
    p.textContent = 'Loading…';
    root.appendChild(p);
    return;
  }

  if (controller.phase === 'done') {
    const banner = doc.createElement('p');
    banner.className = 'completion';
    banner.textContent = 'All tasks rated — thank you!';
    root.appendChild(banner);
    return;
  }

  if (controller.phase === 'error') {
    const banner = doc.createElement('p');
    banner.className = 'error';
    banner.textContent = controller.errorMessage;
    root.appendChild(banner);
    if (controller.retryable) {
      const retry = doc.createElement('button');
      retry.type = 'button';
      retry.className = 'retry';
      retry.textContent = 'Retry';
      retry.addEventListener('click', () => void controller.loadNext());
      root.appendChild(retry);
    }
    return;
  }

  const task = controller.task!;
  const title = doc.createElement('h1');
  title.textContent = task.title;
  root.appendChild(title);

  if (task.image_url) {
    const image = doc.createElement('img');
    image.className = 'chart';
    image.src = task.image_url;
    image.alt = task.title;
    root.appendChild(image);
  }
  // the rendered table is always shown; it is the ground truth
  root.appendChild(renderTable(doc, parseLinearizedTable(task.table)));

  const list = doc.createElement('ol');
  list.className = 'sentences';
  controller.sentences.forEach((sentence, index) => {
    list.appendChild(sentenceCard(doc, controller, index, sentence));
  });
  root.appendChild(list);

  const submit = doc.createElement('button');
  submit.type = 'button';
  submit.className = 'submit';
  submit.textContent = 'Submit ratings (Enter)';
  submit.disabled = !controller.canSubmit();
  submit.addEventListener('click', () => void controller.submit());
  root.appendChild(submit);

  if (controller.retryable) {
    const retry = doc.createElement('button');
    retry.type = 'button';
    retry.className = 'retry';
    retry.textContent = 'Retry submission';
    retry.addEventListener('click', () => void controller.submit());
    root.appendChild(retry);
  }
}
