/** Applies the API's byte-offset highlight spans to a snippet string.
 *
 * Spans index the UTF-8 encoding of the snippet, so the string is split
 * in byte space and decoded per segment. The service guarantees spans
 * are in-bounds and non-overlapping; this clamps and drops overlaps
 * anyway so a misbehaving response can never corrupt the DOM.
 */

const encoder = new TextEncoder();
const decoder = new TextDecoder();

export function sanitizeSpans(spans: [number, number][], byteLength: number): [number, number][] {
  const sorted = [...spans].sort((a, b) => a[0] - b[0]);
  const clean: [number, number][] = [];
  let cursor = 0;
  for (const [rawStart, rawEnd] of sorted) {
    const start = Math.max(rawStart, cursor, 0);
    const end = Math.min(rawEnd, byteLength);
    if (start < end) {
      clean.push([start, end]);
      cursor = end;
    }
  }
  return clean;
}

/** Snippet -> text nodes with <mark> elements over the highlighted spans. */
export function renderSnippet(snippet: string, spans: [number, number][]): DocumentFragment {
  const bytes = encoder.encode(snippet);
  const fragment = document.createDocumentFragment();
  let cursor = 0;
  for (const [start, end] of sanitizeSpans(spans, bytes.length)) {
    if (start > cursor) {
      fragment.append(decoder.decode(bytes.subarray(cursor, start)));
    }
    const mark = document.createElement("mark");
    mark.textContent = decoder.decode(bytes.subarray(start, end));
    fragment.append(mark);
    cursor = end;
  }
  if (cursor < bytes.length) {
    fragment.append(decoder.decode(bytes.subarray(cursor)));
  }
  return fragment;
}

/** Caret line for inline syntax errors: byte position -> character column. */
export function caretLine(query: string, bytePosition: number | null): string {
  if (bytePosition === null) return "";
  const bytes = encoder.encode(query);
  const clamped = Math.max(0, Math.min(bytePosition, bytes.length));
  const column = decoder.decode(bytes.subarray(0, clamped)).length;
  return " ".repeat(column) + "^";
}
