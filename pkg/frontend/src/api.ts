/** Typed client for the mathsearch JSON API (see docs/api.md). */

export interface SubqueryEcho {
  priority: number;
  terms: string[];
  formulae: string[];
}

export interface SearchHit {
  doc_id: string;
  score: number;
  priority: number;
  snippet: string;
  /** [start, end) byte offsets into the UTF-8 encoding of `snippet`. */
  text_highlights: [number, number][];
  /** Indices into the stored document's formula list. */
  math_highlights: number[];
}

export interface SearchResponse {
  query: string;
  subqueries: SubqueryEcho[];
  results: SearchHit[];
  timing_ms: number;
}

export interface DocumentResponse {
  doc_id: string;
  title: string;
  text: string;
  formulae: string[];
}

export interface QueryErrorBody {
  error: string;
  position: number | null;
}

/** A 400 from the service: the query itself is malformed. */
export class QuerySyntaxError extends Error {
  position: number | null;

  constructor(body: QueryErrorBody) {
    super(body.error);
    this.position = body.position;
  }
}

export class NotFoundError extends Error {}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class SearchClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (...args) => globalThis.fetch(...args),
  ) {}

  async search(query: string, signal?: AbortSignal, limit?: number): Promise<SearchResponse> {
    const params = new URLSearchParams({ q: query });
    if (limit !== undefined) params.set("limit", String(limit));
    const response = await this.fetchFn(`${this.baseUrl}/api/search?${params}`, { signal });
    if (response.status === 400) {
      throw new QuerySyntaxError((await response.json()) as QueryErrorBody);
    }
    if (!response.ok) {
      throw new Error(`search failed: HTTP ${response.status}`);
    }
    return (await response.json()) as SearchResponse;
  }

  async document(docId: string, signal?: AbortSignal): Promise<DocumentResponse> {
    const encoded = encodeURIComponent(docId);
    const response = await this.fetchFn(`${this.baseUrl}/api/doc/${encoded}`, { signal });
    if (response.status === 404) {
      throw new NotFoundError(docId);
    }
    if (!response.ok) {
      throw new Error(`document fetch failed: HTTP ${response.status}`);
    }
    return (await response.json()) as DocumentResponse;
  }
}
