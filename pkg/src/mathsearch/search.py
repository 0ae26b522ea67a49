"""Query pipeline: parse, expand into subqueries, execute, interleave.

A query mixes text terms with formulae. Retrieval is conjunctive across
the two categories (a candidate must match at least one term and at least
one formula), so over-specified queries hurt recall; the leave-rightmost-
out expansion progressively relaxes the query and each relaxation runs as
its own subquery. Per-subquery scores are not comparable, so result lists
are merged by round-robin interleaving with first-emission dedup rather
than by score.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Sequence, TypeVar

from .canonical import normalize
from .corpus import UnclosedMathSegment, parse_segment, split_math_segments
from .formula import FormulaTree, ParseError, serialize
from .index import MATH, TEXT, Index
from .text import TextTerm, analyze
from .tokens import tokens_for_index, tokens_for_query


class QuerySyntaxError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        super().__init__(message)


class EmptyQuery(ValueError):
    def __init__(self):
        super().__init__("query has no terms and no formulae")


class FormulaError(ValueError):
    """A math segment of the query failed to parse; 0-based segment index."""

    def __init__(self, segment_index: int, cause: Exception):
        self.segment_index = segment_index
        self.cause = cause
        super().__init__(f"formula segment {segment_index + 1}: {cause}")


class UnknownDocument(KeyError):
    pass


@dataclass(frozen=True)
class Query:
    terms: tuple[TextTerm, ...]  # appearance order
    formulae: tuple[FormulaTree, ...]  # appearance order, normalized


@dataclass(frozen=True)
class Subquery:
    priority: int  # 1 = least relaxed
    terms: tuple[TextTerm, ...]  # prefix of Query.terms
    formulae: tuple[FormulaTree, ...]  # prefix of Query.formulae


@dataclass(frozen=True)
class Highlights:
    text_spans: tuple[tuple[int, int], ...]  # byte offsets into stored text
    math_indices: tuple[int, ...]  # positions in the stored formula list
    snippet: str
    snippet_span: tuple[int, int]  # byte range of the snippet in the text


@dataclass(frozen=True)
class SearchResult:
    doc_id: str
    score: float
    priority: int  # subquery that first produced this hit
    highlights: Highlights


@dataclass(frozen=True)
class SearchConfig:
    per_subquery_limit: int = 100  # search.per_subquery_limit
    final_limit: int = 50  # search.final_limit


DEFAULT_SEARCH_CONFIG = SearchConfig()

SNIPPET_CHARS = 200


def parse_query(raw: str) -> Query:
    """Split a mixed query into analyzed terms and normalized formulae."""
    try:
        segments = split_math_segments(raw)
    except UnclosedMathSegment as exc:
        raise QuerySyntaxError(str(exc), exc.position) from exc
    formulae = []
    for i, segment in enumerate(segments):
        try:
            formulae.append(normalize(parse_segment(segment)))
        except ParseError as exc:
            raise FormulaError(i, exc) from exc
    ranges = [(s.start, s.end) for s in segments]
    terms = [
        t for t in analyze(raw)
        if not any(t.start < end and start < t.end for start, end in ranges)
    ]
    if not terms and not formulae:
        raise EmptyQuery()
    return Query(tuple(terms), tuple(formulae))


def generate_subqueries(query: Query, strategy: str = "lro") -> list[Subquery]:
    """Leave Rightmost Out: first drop terms from the right while keeping
    all formulae, then drop formulae from the right while keeping all
    terms. Empty subqueries are dropped, duplicates keep their earlier
    priority, and priorities are renumbered densely from 1."""
    if strategy != "lro":
        raise ValueError(f"unknown subquery strategy {strategy!r}")
    m, n = len(query.formulae), len(query.terms)
    picked: list[tuple[tuple, tuple]] = []
    seen: set[tuple[int, int]] = set()

    def emit(formulae, terms):
        if not formulae and not terms:
            return
        key = (len(formulae), len(terms))  # prefixes, so lengths identify
        if key not in seen:
            seen.add(key)
            picked.append((formulae, terms))

    for j in range(n, -1, -1):
        emit(query.formulae, query.terms[:j])
    for k in range(m - 1, -1, -1):
        emit(query.formulae[:k], query.terms)
    return [
        Subquery(priority, terms, formulae)
        for priority, (formulae, terms) in enumerate(picked, start=1)
    ]


def _query_weights(index: Index, subquery: Subquery):
    """Token weights for scoring: 1.0 per distinct stem, unifier weights
    for math tokens (summed when shared across query formulae)."""
    weights: dict[tuple[str, str], float] = {}
    text_keys: list[tuple[str, str]] = []
    math_keys: list[tuple[str, str]] = []
    for term in subquery.terms:
        key = (TEXT, term.stem)
        if key not in weights:
            text_keys.append(key)
        weights[key] = 1.0
    for tree in subquery.formulae:
        for tok in tokens_for_query(tree, index.config):
            key = (MATH, tok.token)
            if key not in weights:
                math_keys.append(key)
            weights[key] = weights.get(key, 0.0) + tok.weight
    return weights, text_keys, math_keys


def execute_subquery(
    index: Index, subquery: Subquery, limit: int = DEFAULT_SEARCH_CONFIG.per_subquery_limit
) -> list[tuple[str, float]]:
    """Ranked (doc_id, score) list; conjunctive across categories when the
    subquery has both, single-clause when it has one."""
    weights, text_keys, math_keys = _query_weights(index, subquery)
    matched: dict[int, list[tuple[str, str]]] = {}
    text_hits: set[int] = set()
    math_hits: set[int] = set()
    for keys, hits in ((text_keys, text_hits), (math_keys, math_hits)):
        for key in keys:
            plist = index.lookup(key[1], key[0])
            if plist is None:
                continue
            for internal, _ in plist.postings:
                matched.setdefault(internal, []).append(key)
                hits.add(internal)
    if text_keys and math_keys:
        candidates = text_hits & math_hits
    else:
        candidates = text_hits or math_hits
    ranked = sorted(
        ((index.score(d, matched[d], weights), d) for d in candidates),
        key=lambda pair: (-pair[0], index.docs[pair[1]].doc_id),
    )
    return [(index.docs[d].doc_id, s) for s, d in ranked[:limit]]


T = TypeVar("T")


def interleave(lists: Sequence[Sequence[T]], key: Callable[[T], object] = lambda x: x) -> list[T]:
    """Round-robin merge in list order; an item's key appears only at its
    first emission; exhausted lists are skipped."""
    out: list[T] = []
    seen: set[object] = set()
    positions = [0] * len(lists)
    emitted = True
    while emitted:
        emitted = False
        for i, items in enumerate(lists):
            p = positions[i]
            while p < len(items) and key(items[p]) in seen:
                p += 1
            if p < len(items):
                out.append(items[p])
                seen.add(key(items[p]))
                p += 1
                emitted = True
            positions[i] = p
    return out


def highlight(index: Index, doc_id: str, query: Query) -> Highlights:
    """Spans of stored terms matching a query stem, indices of stored
    formulae sharing a variant token with a query formula, and a snippet
    window around the first text match."""
    doc = index.get(doc_id)
    if doc is None:
        raise UnknownDocument(doc_id)
    stems = {t.stem for t in query.terms}
    text_spans = tuple((t.start, t.end) for t in doc.terms if t.stem in stems)

    query_tokens: set[str] = set()
    for tree in query.formulae:
        query_tokens.update(t.token for t in tokens_for_query(tree, index.config))
    math_indices = tuple(
        i for i, tree in enumerate(doc.formulae)
        if query_tokens and not query_tokens.isdisjoint(
            t.token for t in tokens_for_index(tree, index.config)
        )
    )

    snippet, snippet_span = _snippet(doc.text, text_spans[0] if text_spans else None)
    return Highlights(text_spans, math_indices, snippet, snippet_span)


def _snippet(text: str, first_span: tuple[int, int] | None) -> tuple[str, tuple[int, int]]:
    """A window of at most SNIPPET_CHARS characters centered on the first
    highlight (document start when there is none); byte span returned."""
    if first_span is None:
        center = 0
    else:
        center = len(text.encode("utf-8")[: first_span[0]].decode("utf-8", errors="ignore"))
    start = max(0, center - SNIPPET_CHARS // 2)
    end = min(len(text), start + SNIPPET_CHARS)
    if end - start < SNIPPET_CHARS:
        start = max(0, end - SNIPPET_CHARS)  # window hit the right edge
    snippet = text[start:end]
    byte_start = len(text[:start].encode("utf-8"))
    byte_end = byte_start + len(snippet.encode("utf-8"))
    return snippet, (byte_start, byte_end)


def search(
    index: Index,
    raw_query: str,
    limit: int | None = None,
    config: SearchConfig = DEFAULT_SEARCH_CONFIG,
) -> tuple[Query, list[Subquery], list[SearchResult]]:
    """Full pipeline. Returns the parsed query, its subqueries, and the
    interleaved, deduplicated, highlighted results."""
    query = parse_query(raw_query)
    subqueries = generate_subqueries(query)
    lists = [
        [
            (doc_id, score, sq.priority)
            for doc_id, score in execute_subquery(index, sq, config.per_subquery_limit)
        ]
        for sq in subqueries
    ]
    final_limit = config.final_limit if limit is None else limit
    merged = interleave(lists, key=lambda item: item[0])[:final_limit]
    results = [
        SearchResult(doc_id, score, priority, highlight(index, doc_id, query))
        for doc_id, score, priority in merged
    ]
    return query, subqueries, results


def to_response(
    index: Index,
    raw_query: str,
    limit: int | None = None,
    config: SearchConfig = DEFAULT_SEARCH_CONFIG,
) -> dict:
    """The JSON search response shared by the CLI and the HTTP service;
    highlight spans are byte offsets relative to the snippet."""
    started = time.perf_counter()
    query, subqueries, results = search(index, raw_query, limit, config)
    body = {
        "query": raw_query,
        "subqueries": [
            {
                "priority": sq.priority,
                "terms": [t.stem for t in sq.terms],
                "formulae": [serialize(f) for f in sq.formulae],
            }
            for sq in subqueries
        ],
        "results": [
            {
                "doc_id": r.doc_id,
                "score": r.score,
                "priority": r.priority,
                "snippet": r.highlights.snippet,
                "text_highlights": _snippet_relative(r.highlights),
                "math_highlights": list(r.highlights.math_indices),
            }
            for r in results
        ],
        "timing_ms": (time.perf_counter() - started) * 1000.0,
    }
    return body


def _snippet_relative(h: Highlights) -> list[list[int]]:
    s0, s1 = h.snippet_span
    spans = []
    for start, end in h.text_spans:
        if start < s1 and s0 < end:
            spans.append([max(start, s0) - s0, min(end, s1) - s0])
    return spans
