/** Browser entry point: wires the controller, view and keyboard to the
 * annotation service hosting this page. The rater id comes from the
 * `?rater=` query parameter and is remembered in localStorage. */

import { ApiClient } from './api.js';
import { AnnotationController } from './controller.js';
import { attachKeyboard } from './keyboard.js';
import { render } from './view.js';

function raterId(): string {
  const fromQuery = new URLSearchParams(window.location.search).get('rater');
  if (fromQuery) {
    localStorage.setItem('raterId', fromQuery);
    return fromQuery;
  }
  const stored = localStorage.getItem('raterId');
  if (stored) return stored;
  const entered = window.prompt('Enter your rater id:') || 'anonymous';
  localStorage.setItem('raterId', entered);
  return entered;
}

const root = document.getElementById('app');
if (root) {
  const controller = new AnnotationController(new ApiClient(''), raterId());
  controller.onChange(() => render(controller, root));
  attachKeyboard(controller, document);
  void controller.loadNext();
}
