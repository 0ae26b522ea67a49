import { describe, expect, it } from "vitest";

import { caretLine, renderSnippet, sanitizeSpans } from "../src/highlight.js";

describe("sanitizeSpans", () => {
  it("keeps well-formed spans", () => {
    expect(sanitizeSpans([[0, 3], [5, 8]], 10)).toEqual([[0, 3], [5, 8]]);
  });

  it("sorts, clamps and drops overlaps", () => {
    expect(sanitizeSpans([[5, 20], [2, 6], [-3, 1]], 10)).toEqual([[0, 1], [2, 6], [6, 10]]);
    expect(sanitizeSpans([[4, 4], [9, 3]], 10)).toEqual([]);
  });
});

describe("renderSnippet", () => {
  it("wraps highlighted ranges in mark elements", () => {
    const fragment = renderSnippet("partial sums matter", [[0, 7], [8, 12]]);
    const host = document.createElement("p");
    host.append(fragment);
    expect(host.textContent).toBe("partial sums matter");
    expect([...host.querySelectorAll("mark")].map((m) => m.textContent)).toEqual([
      "partial",
      "sums",
    ]);
  });

  it("treats offsets as UTF-8 bytes", () => {
    // "αβ xy": α and β are 2 bytes each; "xy" spans bytes 5..7
    const fragment = renderSnippet("αβ xy", [[5, 7]]);
    const host = document.createElement("p");
    host.append(fragment);
    expect(host.textContent).toBe("αβ xy");
    expect(host.querySelector("mark")?.textContent).toBe("xy");
  });

  it("never corrupts text on hostile spans", () => {
    const host = document.createElement("p");
    host.append(renderSnippet("abc", [[2, 99], [0, 2], [1, 2]]));
    expect(host.textContent).toBe("abc");
  });
});

describe("caretLine", () => {
  it("points at the byte offset, counted in characters", () => {
    expect(caretLine("ab$cd", 2)).toBe("  ^");
    expect(caretLine("α$b", 2)).toBe(" ^"); // α is 2 bytes, 1 char
    expect(caretLine("ab", null)).toBe("");
  });
});
