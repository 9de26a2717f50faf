/**
 * DOM wiring for the recommendation panel: a code editor textarea on the
 * left, complementary/alternative panes on the right, three feedback
 * buttons per recommendation row.
 *
 * Service address resolution order: ?service= query parameter, then
 * window.LIBREC_SERVICE_URL, then http://127.0.0.1:8080.
 */

import { ApiClient, RecommendationKind, RecommendResponse } from './api.js';
import {
  FEEDBACK_LABELS,
  FeedbackState,
  PanelController,
  PanelStatus,
  VERDICTS,
} from './panel.js';

declare global {
  interface Window {
    LIBREC_SERVICE_URL?: string;
  }
}

function serviceUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get('service');
  return fromQuery ?? window.LIBREC_SERVICE_URL ?? 'http://127.0.0.1:8080';
}

function rowKey(kind: RecommendationKind, pkg: string): string {
  return `${kind}:${pkg}`;
}

export function mountPanel(root: Document = document): PanelController {
  const editor = root.getElementById('code') as HTMLTextAreaElement;
  const statusEl = root.getElementById('status') as HTMLElement;
  const panes: Record<RecommendationKind, HTMLElement> = {
    complementary: root.getElementById('complementary') as HTMLElement,
    alternative: root.getElementById('alternative') as HTMLElement,
  };
  const feedbackCells = new Map<string, HTMLElement>();

  const view = {
    renderStatus(status: PanelStatus): void {
      statusEl.textContent = status;
      statusEl.className = `status status-${status}`;
    },

    renderRecommendations(response: RecommendResponse): void {
      feedbackCells.clear();
      (['complementary', 'alternative'] as RecommendationKind[]).forEach((kind) => {
        const pane = panes[kind];
        pane.replaceChildren();
        const items = response[kind];
        if (items.length === 0) {
          const empty = root.createElement('p');
          empty.className = 'empty';
          empty.textContent = 'no suggestions';
          pane.appendChild(empty);
          return;
        }
        items.forEach((rec) => {
          const row = root.createElement('div');
          row.className = 'rec-row';

          const label = root.createElement('span');
          label.className = 'rec-label';
          label.textContent = `${rec.rank}. ${rec.package} (${rec.score.toFixed(2)})`;
          row.appendChild(label);

          const buttons = root.createElement('span');
          buttons.className = 'rec-feedback';
          VERDICTS.forEach((verdict) => {
            const button = root.createElement('button');
            button.textContent = FEEDBACK_LABELS[verdict];
            button.addEventListener('click', () => {
              void controller.onFeedback(rec.package, kind, verdict);
            });
            buttons.appendChild(button);
          });
          row.appendChild(buttons);
          feedbackCells.set(rowKey(kind, rec.package), buttons);
          pane.appendChild(row);
        });
      });
      const warnings = root.getElementById('warnings') as HTMLElement;
      warnings.textContent = response.warnings.join(' | ');
    },

    renderFeedbackState(pkg: string, kind: RecommendationKind, state: FeedbackState): void {
      const cell = feedbackCells.get(rowKey(kind, pkg));
      if (!cell) {
        return;
      }
      const buttons = Array.from(cell.querySelectorAll('button'));
      if (state === 'sending') {
        buttons.forEach((b) => (b.disabled = true));
      } else if (state === 'submitted') {
        buttons.forEach((b) => (b.disabled = true));
        cell.classList.add('submitted');
        const note = root.createElement('span');
        note.className = 'note';
        note.textContent = 'thanks';
        cell.appendChild(note);
      } else {
        // failed: re-enable so the same buttons serve as the retry affordance
        buttons.forEach((b) => (b.disabled = false));
        cell.classList.add('failed');
        const note = root.createElement('span');
        note.className = 'note';
        note.textContent = 'failed, click to retry';
        cell.appendChild(note);
      }
    },
  };

  const controller = new PanelController(new ApiClient(serviceUrl()), view);
  editor.addEventListener('input', () => controller.onCodeChange(editor.value));
  return controller;
}

if (typeof document !== 'undefined' && document.getElementById('code')) {
  mountPanel();
}
