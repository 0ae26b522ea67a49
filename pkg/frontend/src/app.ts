/** The search page: query box with debounced search-as-you-type, result
 * cards with highlighted matches, a subquery debug panel, and a document
 * view. All ranking comes from the service; the DOM mirrors the response
 * order exactly.
 */
import {
  DocumentResponse,
  FetchLike,
  NotFoundError,
  QuerySyntaxError,
  SearchClient,
  SearchResponse,
} from "./api.js";
import { caretLine, renderSnippet } from "./highlight.js";

export interface UiSearchState {
  query: string;
  loading: boolean;
  lastResponse: SearchResponse | null;
  /** Mutually exclusive with `loading`. */
  error: string | null;
}

export interface AppOptions {
  baseUrl?: string;
  fetchFn?: FetchLike;
  debounceMs?: number;
}

const DEFAULT_DEBOUNCE_MS = 300;

export class SearchApp {
  readonly state: UiSearchState = { query: "", loading: false, lastResponse: null, error: null };

  private client: SearchClient;
  private debounceMs: number;
  private debounceTimer: ReturnType<typeof setTimeout> | undefined;
  private inFlight: AbortController | null = null;
  private docCache = new Map<string, DocumentResponse>();

  readonly input: HTMLInputElement;
  readonly submitButton: HTMLButtonElement;
  readonly syntaxErrorBox: HTMLElement;
  readonly banner: HTMLElement;
  readonly main: HTMLElement;
  readonly debugPanel: HTMLDetailsElement;

  constructor(readonly root: HTMLElement, options: AppOptions = {}) {
    this.client = new SearchClient(options.baseUrl ?? "", options.fetchFn);
    this.debounceMs = options.debounceMs ?? DEFAULT_DEBOUNCE_MS;

    root.innerHTML = `
      <form class="search-form">
        <input type="search" class="query-input" autocomplete="off"
               placeholder="try: quadratic $3*x^2-2*x+2$" />
        <button type="submit" class="submit" disabled>Search</button>
      </form>
      <pre class="syntax-error hidden"></pre>
      <div class="banner hidden"></div>
      <main class="view"></main>
      <details class="debug hidden"><summary></summary><ol class="subqueries"></ol></details>
    `;
    this.input = root.querySelector(".query-input")!;
    this.submitButton = root.querySelector(".submit")!;
    this.syntaxErrorBox = root.querySelector(".syntax-error")!;
    this.banner = root.querySelector(".banner")!;
    this.main = root.querySelector(".view")!;
    this.debugPanel = root.querySelector(".debug")!;

    this.input.addEventListener("input", () => this.onInput());
    root.querySelector(".search-form")!.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submitQuery(this.input.value);
    });
  }

  private onInput() {
    this.state.query = this.input.value;
    this.submitButton.disabled = this.input.value.trim() === "";
    clearTimeout(this.debounceTimer);
    if (this.input.value.trim() === "") return;
    this.debounceTimer = setTimeout(() => {
      void this.submitQuery(this.input.value);
    }, this.debounceMs);
  }

  /** Runs a search and renders the outcome; newer calls cancel older ones. */
  async submitQuery(query: string): Promise<void> {
    if (query.trim() === "") return;
    clearTimeout(this.debounceTimer);
    this.inFlight?.abort();
    const controller = new AbortController();
    this.inFlight = controller;

    this.state.query = query;
    this.state.loading = true;
    this.state.error = null;
    this.root.classList.add("loading");
    this.hideErrors();

    try {
      const response = await this.client.search(query, controller.signal);
      const documents = await this.fetchMatchedDocuments(response, controller.signal);
      if (this.inFlight !== controller) return; // a newer search took over
      this.state.loading = false;
      this.state.lastResponse = response;
      this.renderResults(response, documents);
    } catch (error) {
      if (controller.signal.aborted) return; // cancelled by a newer search
      this.state.loading = false;
      if (error instanceof QuerySyntaxError) {
        this.state.error = error.message;
        this.showSyntaxError(query, error);
      } else {
        this.state.error = String(error);
        this.showBanner(query);
      }
    } finally {
      if (this.inFlight === controller) this.root.classList.remove("loading");
    }
  }

  /** Documents for hits with formula matches, so cards can show the math. */
  private async fetchMatchedDocuments(response: SearchResponse, signal: AbortSignal) {
    const wanted = [...new Set(
      response.results.filter((r) => r.math_highlights.length > 0).map((r) => r.doc_id),
    )];
    await Promise.all(
      wanted
        .filter((id) => !this.docCache.has(id))
        .map(async (id) => {
          try {
            this.docCache.set(id, await this.client.document(id, signal));
          } catch {
            // card simply omits its formula strip
          }
        }),
    );
    return this.docCache;
  }

  private hideErrors() {
    this.syntaxErrorBox.classList.add("hidden");
    this.banner.classList.add("hidden");
    this.banner.textContent = "";
  }

  private showSyntaxError(query: string, error: QuerySyntaxError) {
    this.syntaxErrorBox.classList.remove("hidden");
    this.syntaxErrorBox.textContent =
      error.position === null
        ? error.message
        : `${error.message}\n${query}\n${caretLine(query, error.position)}`;
  }

  private showBanner(query: string) {
    this.banner.classList.remove("hidden");
    this.banner.textContent = "The search service is unreachable. ";
    const retry = document.createElement("button");
    retry.textContent = "Retry";
    retry.addEventListener("click", () => void this.submitQuery(query));
    this.banner.append(retry);
  }

  private renderResults(response: SearchResponse, documents: Map<string, DocumentResponse>) {
    this.main.replaceChildren();
    const list = document.createElement("ol");
    list.className = "results";
    for (const hit of response.results) {
      const item = document.createElement("li");
      item.className = "result-card";
      item.dataset.docId = hit.doc_id;

      const heading = document.createElement("h3");
      const link = document.createElement("a");
      link.href = "#";
      link.textContent = hit.doc_id;
      link.addEventListener("click", (event) => {
        event.preventDefault();
        void this.openDocument(hit.doc_id);
      });
      heading.append(link);
      const meta = document.createElement("span");
      meta.className = "meta";
      meta.textContent = ` score ${hit.score.toFixed(4)} · subquery ${hit.priority}`;
      heading.append(meta);
      item.append(heading);

      const snippet = document.createElement("p");
      snippet.className = "snippet";
      snippet.append(renderSnippet(hit.snippet, hit.text_highlights));
      item.append(snippet);

      const doc = documents.get(hit.doc_id);
      if (doc && hit.math_highlights.length > 0) {
        item.append(this.formulaStrip(doc, new Set(hit.math_highlights)));
      }
      list.append(item);
    }
    if (response.results.length === 0) {
      const none = document.createElement("p");
      none.className = "no-results";
      none.textContent = "0 results";
      this.main.append(none);
    }
    this.main.append(list);
    this.renderSubqueries(response);
  }

  /** Formulae as styled plain infix text; matched ones carry .matched. */
  private formulaStrip(doc: DocumentResponse, matched: Set<number>): HTMLElement {
    const strip = document.createElement("p");
    strip.className = "formulae";
    doc.formulae.forEach((infix, index) => {
      const chip = document.createElement("code");
      chip.className = matched.has(index) ? "formula matched" : "formula";
      chip.textContent = infix;
      strip.append(chip);
    });
    return strip;
  }

  private renderSubqueries(response: SearchResponse) {
    this.debugPanel.classList.remove("hidden");
    this.debugPanel.querySelector("summary")!.textContent =
      `${response.subqueries.length} subqueries · ${response.timing_ms.toFixed(1)} ms`;
    const list = this.debugPanel.querySelector(".subqueries")!;
    list.replaceChildren();
    for (const sq of response.subqueries) {
      const row = document.createElement("li");
      const formulae = sq.formulae.map((f) => `⟨${f}⟩`).join(" ");
      row.textContent = [formulae, sq.terms.join(" ")].filter(Boolean).join("  ");
      list.append(row);
    }
  }

  /** Fetches and shows one document; cached docs are not refetched. */
  async openDocument(docId: string): Promise<void> {
    let doc = this.docCache.get(docId);
    if (!doc) {
      try {
        doc = await this.client.document(docId);
        this.docCache.set(docId, doc);
      } catch (error) {
        this.renderDocumentMissing(docId, error instanceof NotFoundError);
        return;
      }
    }
    this.renderDocument(doc);
  }

  private renderDocument(doc: DocumentResponse) {
    this.main.replaceChildren();
    this.debugPanel.classList.add("hidden");
    const article = document.createElement("article");
    article.className = "document";
    article.append(this.backButton());
    const title = document.createElement("h2");
    title.textContent = doc.title || doc.doc_id;
    article.append(title);
    const body = document.createElement("p");
    body.className = "full-text";
    body.textContent = doc.text;
    article.append(body);
    if (doc.formulae.length > 0) {
      article.append(this.formulaStrip(doc, new Set()));
    }
    this.main.append(article);
  }

  private renderDocumentMissing(docId: string, known: boolean) {
    this.main.replaceChildren();
    const article = document.createElement("article");
    article.className = "document missing";
    article.append(this.backButton());
    const message = document.createElement("p");
    message.textContent = known
      ? `Document not found: ${docId}`
      : `Could not load document ${docId}.`;
    article.append(message);
    this.main.append(article);
  }

  private backButton(): HTMLButtonElement {
    const back = document.createElement("button");
    back.className = "back";
    back.textContent = "← results";
    back.addEventListener("click", () => this.backToResults());
    return back;
  }

  /** Restores the previous result list from state, without refetching. */
  backToResults() {
    if (this.state.lastResponse) {
      this.renderResults(this.state.lastResponse, this.docCache);
    } else {
      this.main.replaceChildren();
    }
  }
}
