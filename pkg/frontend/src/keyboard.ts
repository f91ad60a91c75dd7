/** Keyboard shortcuts for high-throughput rating sessions.
 *
 *   1..9        select sentence
 *   j / k       next / previous sentence
 *   e / r / g   cycle entailed / relevant / grammatical on the selection
 *   Enter       submit the task
 */

import type { AnnotationController } from './controller.js';
import type { RatingAxis } from './types.js';

const AXIS_KEYS: Record<string, RatingAxis> = {
  e: 'entailed',
  r: 'relevant',
  g: 'grammatical',
};

/** Returns true when the key was handled. */
export function handleKey(controller: AnnotationController, key: string): boolean {
  if (controller.phase !== 'task') return false;
  if (/^[1-9]$/.test(key)) {
    controller.selectSentence(Number(key) - 1);
    return true;
  }
  if (key === 'j') {
    controller.selectSentence(controller.selected + 1);
    return true;
  }
  if (key === 'k') {
    controller.selectSentence(controller.selected - 1);
    return true;
  }
  const axis = AXIS_KEYS[key.toLowerCase()];
  if (axis) {
    controller.flipToggle(controller.selected, axis);
    return true;
  }
  if (key === 'Enter') {
    void controller.submit();
    return true;
  }
  return false;
}

export function attachKeyboard(
  controller: AnnotationController,
  target: EventTarget,
): void {
  target.addEventListener('keydown', (event) => {
    const keyboard = event as KeyboardEvent;
    const element = keyboard.target as HTMLElement | null;
    if (element && /^(input|textarea|select)$/i.test(element.tagName)) return;
    if (handleKey(controller, keyboard.key)) keyboard.preventDefault();
  });
}
