"""Command-line entry point: index, search, eval, bench, serve.

Exit codes: 0 success, 1 operational error, 2 usage or query error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .corpus import CorpusError, read_corpus_file
from .evaluation import InsufficientPoints, ParseError as EvalParseError, bench_indexing, evaluate
from .index import CorruptIndex, DuplicateDocId, FormatVersionMismatch, Index
from .search import EmptyQuery, FormulaError, QuerySyntaxError, to_response

ENV_INDEX_DIR = "MIAS_INDEX_DIR"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mathsearch",
        description="Math-aware search: index mixed text+math corpora and query them.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_index = sub.add_parser("index", help="build an index from a JSONL corpus")
    p_index.add_argument("corpus", help="corpus file, one JSON document per line")
    p_index.add_argument("--out", required=True, help="output index directory")

    p_search = sub.add_parser("search", help="query an index")
    p_search.add_argument("index_dir", metavar="index", help="index directory")
    p_search.add_argument("query", help="free text with $infix$ or <math>...</math> segments")
    p_search.add_argument("--limit", type=int, default=None, help="maximum results (default 50)")
    p_search.add_argument("--json", action="store_true", help="emit the service JSON response")

    p_eval = sub.add_parser("eval", help="score a run file against qrels")
    p_eval.add_argument("--run", required=True)
    p_eval.add_argument("--qrels", required=True)
    p_eval.add_argument("--levels", default="1,3", help="relevance thresholds (default 1,3)")

    p_bench = sub.add_parser("bench", help="indexing-speed benchmark on synthetic corpora")
    p_bench.add_argument("--sizes", required=True, help="comma-separated document counts")
    p_bench.add_argument("--seed", type=int, default=0)

    p_serve = sub.add_parser("serve", help="run the HTTP search service")
    p_serve.add_argument("--index", default=None, help=f"index directory (or ${ENV_INDEX_DIR})")
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.add_argument("--cors-origin", default=None, help="origin allowed for CORS")
    return parser


def cmd_index(args) -> int:
    started = time.perf_counter()
    index = Index()
    n_lines = 0
    try:
        for doc in read_corpus_file(args.corpus):
            n_lines += 1
            index.add_document(doc.doc_id, doc.title, doc.text, doc.formulae)
    except FileNotFoundError:
        print(f"error: corpus file not found: {args.corpus}", file=sys.stderr)
        return 1
    except (CorpusError, DuplicateDocId) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if n_lines == 0:
        print(f"warning: corpus {args.corpus} is empty; writing an empty index", file=sys.stderr)
    try:
        index.persist(args.out)
    except OSError as exc:
        print(f"error: cannot write index: {exc}", file=sys.stderr)
        return 1
    elapsed = time.perf_counter() - started
    print(f"docs={index.n_docs} math_tokens={index.total_math_tokens} time={elapsed:.2f}")
    return 0


def _open_index(path: str) -> Index:
    try:
        return Index.open(path)
    except (CorruptIndex, FormatVersionMismatch, OSError) as exc:
        raise SystemExit(f"error: cannot open index {path}: {exc}")


def cmd_search(args) -> int:
    try:
        index = Index.open(args.index_dir)
    except (CorruptIndex, FormatVersionMismatch, OSError) as exc:
        print(f"error: cannot open index {args.index_dir}: {exc}", file=sys.stderr)
        return 1
    try:
        response = to_response(index, args.query, args.limit)
    except (QuerySyntaxError, EmptyQuery, FormulaError) as exc:
        print(f"query error: {exc}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps(response, ensure_ascii=False))
        return 0
    results = response["results"]
    if not results:
        print("0 results")
        return 0
    for position, result in enumerate(results, start=1):
        snippet = " ".join(result["snippet"].split())
        print(
            f"{position:>3}. {result['doc_id']}  score={result['score']:.4f}"
            f"  subquery={result['priority']}"
        )
        if snippet:
            print(f"     {snippet}")
    return 0


def cmd_eval(args) -> int:
    try:
        levels = tuple(int(part) for part in args.levels.split(",") if part)
    except ValueError:
        print(f"error: bad --levels value {args.levels!r}", file=sys.stderr)
        return 2
    try:
        report = evaluate(args.run, args.qrels, levels)
    except (EvalParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(report.as_text())
    return 0


def cmd_bench(args) -> int:
    try:
        sizes = [int(part) for part in args.sizes.split(",") if part]
    except ValueError:
        print(f"error: bad --sizes value {args.sizes!r}", file=sys.stderr)
        return 2
    try:
        report = bench_indexing(sizes, seed=args.seed)
    except InsufficientPoints as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(report.as_text())
    return 0


def cmd_serve(args) -> int:
    index_dir = args.index or os.environ.get(ENV_INDEX_DIR)
    if not index_dir:
        print(f"error: no index directory (use --index or ${ENV_INDEX_DIR})", file=sys.stderr)
        return 1
    try:
        index = Index.open(index_dir)
    except (CorruptIndex, FormatVersionMismatch, OSError) as exc:
        print(f"error: cannot open index {index_dir}: {exc}", file=sys.stderr)
        return 1
    import uvicorn

    from .service import create_app

    app = create_app(index, cors_origin=args.cors_origin)
    uvicorn.run(app, host="127.0.0.1", port=args.port, log_level="warning")
    return 0


_COMMANDS = {
    "index": cmd_index,
    "search": cmd_search,
    "eval": cmd_eval,
    "bench": cmd_bench,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
