/**
 * Panel controller: debounced live recommendations plus feedback submission.
 *
 * Pure state machine over an injected view and API client, so the whole
 * interaction contract is testable headless. Responses are tracked by a
 * monotonically increasing issue number; anything older than the newest
 * rendered response is discarded.
 */

import {
  ApiClient,
  FeedbackVerdict,
  RecommendationKind,
  RecommendResponse,
} from './api.js';

export type PanelStatus = 'idle' | 'pending' | 'error';
export type FeedbackState = 'sending' | 'submitted' | 'failed';

/** Button labels shown to the user, keyed by the service verdict enum. */
export const FEEDBACK_LABELS: Record<FeedbackVerdict, string> = {
  yes: 'Yes',
  relevant_not_required: 'Relevant but not required',
  not_relevant: 'Not relevant',
};

export const VERDICTS: FeedbackVerdict[] = [
  'yes',
  'relevant_not_required',
  'not_relevant',
];

export interface PanelView {
  renderStatus(status: PanelStatus): void;
  renderRecommendations(response: RecommendResponse): void;
  renderFeedbackState(
    pkg: string,
    kind: RecommendationKind,
    state: FeedbackState,
  ): void;
}

export interface PanelOptions {
  debounceMs?: number;
  topK?: number;
}

export class PanelController {
  readonly debounceMs: number;
  readonly topK: number;
  status: PanelStatus = 'idle';
  lastRequestId: string | null = null;

  private client: ApiClient;
  private view: PanelView;
  private code = '';
  private timer: ReturnType<typeof setTimeout> | null = null;
  private issueSeq = 0;
  private renderedSeq = 0;
  private abort: AbortController | null = null;

  constructor(client: ApiClient, view: PanelView, options: PanelOptions = {}) {
    this.client = client;
    this.view = view;
    this.debounceMs = options.debounceMs ?? 500;
    this.topK = options.topK ?? 5;
  }

  /** Reset the debounce timer; the request fires only when typing pauses. */
  onCodeChange(newText: string): void {
    this.code = newText;
    if (this.timer !== null) {
      clearTimeout(this.timer);
    }
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.issueRequest();
    }, this.debounceMs);
  }

  /** Submit feedback for the response currently on screen. */
  async onFeedback(pkg: string, kind: RecommendationKind, verdict: FeedbackVerdict): Promise<void> {
    if (this.lastRequestId === null) {
      return;
    }
    this.view.renderFeedbackState(pkg, kind, 'sending');
    try {
      await this.client.feedback(this.lastRequestId, pkg, verdict);
      this.view.renderFeedbackState(pkg, kind, 'submitted');
    } catch {
      this.view.renderFeedbackState(pkg, kind, 'failed');
    }
  }

  private async issueRequest(): Promise<void> {
    const seq = ++this.issueSeq;
    if (this.abort !== null) {
      this.abort.abort(); // at most one request in flight
    }
    this.abort = typeof AbortController === 'undefined' ? null : new AbortController();
    this.status = 'pending';
    this.view.renderStatus(this.status);
    try {
      const response = await this.client.recommend(
        this.code,
        this.topK,
        this.abort?.signal,
      );
      if (seq < this.issueSeq || seq <= this.renderedSeq) {
        return; // superseded while in flight
      }
      this.renderedSeq = seq;
      this.lastRequestId = response.request_id;
      this.status = 'idle';
      this.view.renderStatus(this.status);
      this.view.renderRecommendations(response);
    } catch {
      if (seq < this.issueSeq) {
        return; // failure of an abandoned request is not an error state
      }
      this.status = 'error';
      this.view.renderStatus(this.status);
    }
  }
}
