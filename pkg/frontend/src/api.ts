/**
 * Typed client for the recommendation service /v1 JSON API.
 *
 * The fetch function is injectable so tests can run without a network.
 */

export type RecommendationKind = 'complementary' | 'alternative';

/** Verdict strings are the service enum, verbatim. */
export type FeedbackVerdict = 'yes' | 'relevant_not_required' | 'not_relevant';

export interface Recommendation {
  package: string;
  score: number;
  kind: RecommendationKind;
  rank: number;
  already_imported: boolean;
}

export interface RecommendResponse {
  request_id: string;
  imports_detected: string[];
  complementary: Recommendation[];
  alternative: Recommendation[];
  warnings: string[];
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private baseUrl: string;
  private fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, '');
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  async recommend(
    code: string,
    topK = 5,
    signal?: AbortSignal,
  ): Promise<RecommendResponse> {
    const resp = await this.fetchFn(`${this.baseUrl}/v1/recommend`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({
        code,
        top_k_complementary: topK,
        top_k_alternative: topK,
      }),
      signal,
    });
    if (!resp.ok) {
      throw new Error(`recommend failed: HTTP ${resp.status}`);
    }
    return (await resp.json()) as RecommendResponse;
  }

  async feedback(
    requestId: string,
    pkg: string,
    verdict: FeedbackVerdict,
  ): Promise<void> {
    const resp = await this.fetchFn(`${this.baseUrl}/v1/feedback`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ request_id: requestId, package: pkg, verdict }),
    });
    if (!resp.ok) {
      throw new Error(`feedback failed: HTTP ${resp.status}`);
    }
  }
}
