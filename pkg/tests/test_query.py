import pytest

from mathsearch.formula import Var, parse_infix, serialize
from mathsearch.index import Index
from mathsearch.search import (
    EmptyQuery,
    FormulaError,
    Query,
    QuerySyntaxError,
    Subquery,
    UnknownDocument,
    execute_subquery,
    generate_subqueries,
    highlight,
    interleave,
    parse_query,
    search,
)
from mathsearch.text import TextTerm


def test_parse_query_mixed():
    query = parse_query("quadratic $3*x^2-2*x+2$")
    assert [t.stem for t in query.terms] == ["quadrat"]
    assert len(query.formulae) == 1
    assert serialize(query.formulae[0]).count("(n ") == 4


def test_parse_query_math_only_and_text_only():
    math_only = parse_query("$a$")
    assert math_only.terms == () and math_only.formulae == (Var("a"),)
    text_only = parse_query("plain words only")
    assert [t.stem for t in text_only.terms] == ["plain", "word", "onli"]
    assert text_only.formulae == ()


def test_parse_query_mathml_segment():
    query = parse_query("power <math><msup><mi>b</mi><mi>a</mi></msup></math>")
    assert [t.stem for t in query.terms] == ["power"]
    assert serialize(query.formulae[0]) == "(^ (v b) (v a))"


def test_parse_query_errors():
    with pytest.raises(QuerySyntaxError):
        parse_query("odd $a+b")
    with pytest.raises(FormulaError) as failed:
        parse_query("bad $a+$ here")
    assert failed.value.segment_index == 0
    with pytest.raises(EmptyQuery):
        parse_query("  ! ")
    with pytest.raises(EmptyQuery):
        parse_query("a b")  # single-letter tokens are dropped


def _query(m, n):
    terms = tuple(TextTerm(f"t{i + 1}", i * 10, i * 10 + 2) for i in range(n))
    formulae = tuple(Var(f"f{i + 1}") for i in range(m))
    return Query(terms, formulae)


def _shape(subquery):
    return (
        [v.name for v in subquery.formulae],
        [t.stem for t in subquery.terms],
    )


def test_generate_subqueries_reproduces_lro_figure():
    subqueries = generate_subqueries(_query(2, 3))
    assert [sq.priority for sq in subqueries] == [1, 2, 3, 4, 5, 6]
    assert [_shape(sq) for sq in subqueries] == [
        (["f1", "f2"], ["t1", "t2", "t3"]),
        (["f1", "f2"], ["t1", "t2"]),
        (["f1", "f2"], ["t1"]),
        (["f1", "f2"], []),
        (["f1"], ["t1", "t2", "t3"]),
        ([], ["t1", "t2", "t3"]),
    ]


def test_generate_subqueries_degenerate_shapes():
    assert [_shape(sq) for sq in generate_subqueries(_query(0, 2))] == [
        ([], ["t1", "t2"]),
        ([], ["t1"]),
    ]
    assert [_shape(sq) for sq in generate_subqueries(_query(1, 0))] == [(["f1"], [])]


def test_generate_subqueries_count_and_prefix_containment(rng):
    for _ in range(50):
        m, n = rng.randint(1, 5), rng.randint(1, 6)
        query = _query(m, n)
        subqueries = generate_subqueries(query)
        assert len(subqueries) == m + n + 1
        assert [sq.priority for sq in subqueries] == list(range(1, len(subqueries) + 1))
        phase1 = subqueries[: n + 1]
        for earlier, later in zip(phase1, phase1[1:]):
            assert later.terms == earlier.terms[: len(later.terms)]
            assert len(later.terms) == len(earlier.terms) - 1
            assert later.formulae == query.formulae
        phase2 = subqueries[n + 1 :]
        for earlier, later in zip(phase2, phase2[1:]):
            assert later.formulae == earlier.formulae[: len(later.formulae)]
            assert later.terms == query.terms


def test_generate_subqueries_unknown_strategy():
    with pytest.raises(ValueError):
        generate_subqueries(_query(1, 1), strategy="mystery")


def _paper_pair_index():
    index = Index()
    index.add_document("D1", "", "left doc $a+b$", [parse_infix("a+b")])
    index.add_document("D2", "", "right doc $c+d$", [parse_infix("c+d")])
    return index


def test_execute_subquery_unified_recall_exact_first():
    index = _paper_pair_index()
    sq = Subquery(1, (), (parse_infix("a+b"),))
    results = execute_subquery(index, sq)
    assert [doc_id for doc_id, _ in results] == ["D1", "D2"]
    scores = dict(results)
    assert scores["D1"] > scores["D2"] > 0


def test_execute_subquery_conjunction_requires_both_categories():
    index = _paper_pair_index()
    sq = Subquery(1, (TextTerm("absent", 0, 6),), (parse_infix("a+b"),))
    assert execute_subquery(index, sq) == []
    # formula satisfied + term satisfied -> hit
    sq = Subquery(1, (TextTerm("left", 0, 4),), (parse_infix("a+b"),))
    assert [doc for doc, _ in execute_subquery(index, sq)] == ["D1"]


def test_execute_subquery_empty_index():
    assert execute_subquery(Index(), Subquery(1, (), (Var("a"),))) == []


def test_execute_subquery_respects_limit():
    index = Index()
    for i in range(30):
        index.add_document(f"d{i:02d}", "", "common term here")
    sq = Subquery(1, (TextTerm("common", 0, 6),), ())
    assert len(execute_subquery(index, sq, limit=7)) == 7


def test_interleave_examples():
    assert interleave([["d1", "d2"], ["d3", "d1"]]) == ["d1", "d3", "d2"]
    assert interleave([["a", "b", "c"]]) == ["a", "b", "c"]
    assert interleave([[], ["d5"]]) == ["d5"]


def _interleave_oracle(lists):
    """Definitional re-implementation with queues, for cross-checking."""
    from collections import deque

    queues = [deque(items) for items in lists]
    seen, out = set(), []
    progressed = True
    while progressed:
        progressed = False
        for queue in queues:
            while queue and queue[0] in seen:
                queue.popleft()
            if queue:
                item = queue.popleft()
                out.append(item)
                seen.add(item)
                progressed = True
    return out


def test_interleave_matches_oracle_and_covers_union(rng):
    for _ in range(200):
        lists = [
            list(dict.fromkeys(f"d{rng.randint(0, 20)}" for _ in range(rng.randint(0, 8))))
            for _ in range(rng.randint(1, 5))
        ]
        merged = interleave(lists)
        assert merged == _interleave_oracle([list(items) for items in lists])
        union = set().union(*(set(items) for items in lists))
        assert len(merged) == len(set(merged)) == len(union)
        nonempty = [items for items in lists if items]
        if nonempty:
            assert merged[0] == nonempty[0][0]


def test_highlight_text_and_math():
    index = _paper_pair_index()
    query = parse_query("left $b+a$")
    h = highlight(index, "D1", query)
    text = index.get("D1").text.encode("utf-8")
    assert [text[s:e].decode() for s, e in h.text_spans] == ["left"]
    assert h.math_indices == (0,)  # ordering makes b+a match the stored a+b
    assert h.snippet  # window exists
    assert h.snippet_span[0] <= h.text_spans[0][0] < h.snippet_span[1]


def test_highlight_no_match_falls_back_to_document_start():
    index = _paper_pair_index()
    # a product shares no variant token with the stored sums
    query = parse_query("right $w*z$")
    h = highlight(index, "D1", query)
    assert h.text_spans == ()
    assert h.math_indices == ()
    assert h.snippet.startswith("left doc")
    assert h.snippet_span[0] == 0


def test_highlight_unknown_document():
    with pytest.raises(UnknownDocument):
        highlight(_paper_pair_index(), "missing", parse_query("$a$"))


def test_snippet_window_bounded_and_centered():
    index = Index()
    filler = "prefix " * 60
    index.add_document("big", "", filler + "needle " + "suffix " * 60)
    h = highlight(index, "big", parse_query("needle"))
    assert len(h.snippet) <= 200
    assert "needle" in h.snippet


def test_search_end_to_end_ranking_and_dedup():
    index = Index()
    index.add_document("exact", "", "target doc $a+b^a$", [parse_infix("a+b^a")])
    index.add_document("renamed", "", "other doc $x+y^x$", [parse_infix("x+y^x")])
    index.add_document("unrelated", "", "nothing here", [])
    query, subqueries, results = search(index, "$a+b^a$")
    assert len(subqueries) == 1
    doc_ids = [r.doc_id for r in results]
    assert doc_ids[0] == "exact"
    assert "renamed" in doc_ids
    assert len(doc_ids) == len(set(doc_ids))
    by_id = {r.doc_id: r for r in results}
    assert by_id["exact"].score > by_id["renamed"].score


def test_search_result_limit():
    index = Index()
    for i in range(20):
        index.add_document(f"d{i:02d}", "", "shared words")
    _, _, results = search(index, "shared", limit=5)
    assert len(results) == 5
