"""Retrieval quality metrics and the indexing-speed benchmark.

Quality follows the TREC file conventions: a qrels file of graded
relevance judgments and a run file of ranked results per topic. MAP, P@5
and P@10 are computed at relevance-level thresholds (a judgment counts as
relevant when its level is at or above the threshold). MAP averages over
the topics present in the qrels; a topic the run never returns scores 0.

The benchmark generates a reproducible synthetic corpus, indexes growing
prefixes of it, and fits indexing time against document count to check
that cost stays linear in corpus size.
"""
from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass
from pathlib import Path

from .corpus import read_corpus_file
from .formula import FormulaTree, Num, Op, Var, render
from .index import Index, prepare_document


class ParseError(ValueError):
    """Malformed qrels or run file; carries the line number."""

    def __init__(self, path, line_no: int | None, message: str):
        self.line_no = line_no
        where = f"{path}:{line_no}" if line_no is not None else str(path)
        super().__init__(f"{where}: {message}")


class InsufficientPoints(ValueError):
    pass


@dataclass(frozen=True)
class RunEntry:
    topic_id: str
    doc_id: str
    rank: int
    score: float


class Qrels:
    """Graded relevance judgments keyed by (topic, doc)."""

    def __init__(self, levels: dict[tuple[str, str], int]):
        self.levels = levels
        self._topics = sorted({topic for topic, _ in levels})

    def topics(self) -> list[str]:
        return self._topics

    def relevant(self, topic_id: str, level: int) -> set[str]:
        return {
            doc for (topic, doc), lv in self.levels.items()
            if topic == topic_id and lv >= level
        }


def load_qrels(path: str | Path) -> Qrels:
    """TREC qrels: ``topic 0 doc_id level`` per line."""
    levels: dict[tuple[str, str], int] = {}
    for line_no, fields in _read_fields(path):
        if len(fields) != 4:
            raise ParseError(path, line_no, f"expected 4 fields, got {len(fields)}")
        topic, _, doc, level = fields
        try:
            value = int(level)
        except ValueError:
            raise ParseError(path, line_no, f"relevance level {level!r} is not an integer")
        if value < 0:
            raise ParseError(path, line_no, "relevance level must be >= 0")
        if (topic, doc) in levels:
            raise ParseError(path, line_no, f"duplicate judgment for ({topic}, {doc})")
        levels[(topic, doc)] = value
    return Qrels(levels)


def load_run(path: str | Path) -> dict[str, list[RunEntry]]:
    """TREC run: ``topic Q0 doc_id rank score tag`` per line; entries are
    returned rank-sorted, with dense unique ranks per topic enforced."""
    runs: dict[str, list[RunEntry]] = {}
    seen_docs: set[tuple[str, str]] = set()
    for line_no, fields in _read_fields(path):
        if len(fields) != 6:
            raise ParseError(path, line_no, f"expected 6 fields, got {len(fields)}")
        topic, _, doc, rank, score, _ = fields
        try:
            entry = RunEntry(topic, doc, int(rank), float(score))
        except ValueError as exc:
            raise ParseError(path, line_no, str(exc))
        if (topic, doc) in seen_docs:
            raise ParseError(path, line_no, f"duplicate document {doc} for topic {topic}")
        seen_docs.add((topic, doc))
        runs.setdefault(topic, []).append(entry)
    for topic, entries in runs.items():
        entries.sort(key=lambda e: e.rank)
        if [e.rank for e in entries] != list(range(1, len(entries) + 1)):
            raise ParseError(path, None, f"ranks for topic {topic} are not dense from 1")
    return runs


def _read_fields(path):
    with Path(path).open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if line.strip():
                yield line_no, line.split()


def average_precision(run: list[RunEntry], qrels: Qrels, level: int) -> float:
    """Mean of precision@k over the ranks holding relevant documents,
    divided by the total number of relevant documents for the topic."""
    if not run:
        return 0.0
    relevant = qrels.relevant(run[0].topic_id, level)
    if not relevant:
        return 0.0
    hits = 0
    total = 0.0
    for position, entry in enumerate(run, start=1):
        if entry.doc_id in relevant:
            hits += 1
            total += hits / position
    return total / len(relevant)


def precision_at_k(run: list[RunEntry], qrels: Qrels, level: int, k: int) -> float:
    """Relevant among the top k over k; the divisor stays k even when the
    run is shorter."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not run:
        return 0.0
    relevant = qrels.relevant(run[0].topic_id, level)
    return sum(1 for entry in run[:k] if entry.doc_id in relevant) / k


@dataclass
class EvalReport:
    levels: tuple[int, ...]
    n_topics: int
    values: dict[tuple[str, int], float]  # (measure, level) -> value

    MEASURES = ("MAP", "P@5", "P@10")

    def as_text(self) -> str:
        lines = [f"{'Measure':<8} {'Level':>5} {'Value':>8}"]
        for level in self.levels:
            for measure in self.MEASURES:
                lines.append(f"{measure:<8} {level:>5} {self.values[(measure, level)]:>8.4f}")
        lines.append(f"topics: {self.n_topics}")
        return "\n".join(lines)

    def as_json(self) -> dict:
        return {
            "n_topics": self.n_topics,
            "levels": list(self.levels),
            "measures": {
                f"{measure}@level>={level}": self.values[(measure, level)]
                for level in self.levels
                for measure in self.MEASURES
            },
        }


def evaluate(run_path, qrels_path, levels=(1, 3)) -> EvalReport:
    """MAP/P@5/P@10 per relevance level, averaged over the qrels topics."""
    return evaluate_loaded(load_run(run_path), load_qrels(qrels_path), levels)


def evaluate_loaded(runs: dict[str, list[RunEntry]], qrels: Qrels, levels=(1, 3)) -> EvalReport:
    topics = qrels.topics()
    values: dict[tuple[str, int], float] = {}
    for level in levels:
        ap_sum = p5_sum = p10_sum = 0.0
        for topic in topics:
            run = runs.get(topic, [])
            ap_sum += average_precision(run, qrels, level)
            p5_sum += precision_at_k(run, qrels, level, 5)
            p10_sum += precision_at_k(run, qrels, level, 10)
        n = len(topics) or 1
        values[("MAP", level)] = ap_sum / n
        values[("P@5", level)] = p5_sum / n
        values[("P@10", level)] = p10_sum / n
    return EvalReport(tuple(levels), len(topics), values)


# ---------------------------------------------------------------------------
# Synthetic corpus and indexing benchmark
# ---------------------------------------------------------------------------

_VOCABULARY = (
    "algebra analysis angle axiom basis bounded calculus circle closed compact "
    "complete complex conjecture continuous convergent curve degree dense derivative "
    "dimension discrete domain dual equation euclidean field finite fixed function "
    "graph group homomorphism ideal identity infinite integral inverse kernel lattice "
    "lemma limit linear manifold matrix measure metric modular monotone norm open "
    "operator orbit order orthogonal partial polynomial prime product proof quadratic "
    "rational regular ring sequence series smooth space spectrum subgroup surface "
    "symmetric tensor theorem topology transform uniform unique variety vector zero"
).split()

_LEAF_VARIABLES = "abcdefghijklmnopqrstuvwxyz"
_TREE_OPERATORS = ("+", "-", "*", "/", "^", "sqrt")

MIN_WORDS, MAX_WORDS = 5, 50
MIN_FORMULAE, MAX_FORMULAE = 1, 10
MAX_TREE_HEIGHT = 4


def random_formula(rng: random.Random, max_height: int = MAX_TREE_HEIGHT) -> FormulaTree:
    if max_height == 0 or rng.random() < 0.3:
        if rng.random() < 0.5:
            return Var(rng.choice(_LEAF_VARIABLES))
        return Num(str(rng.randint(0, 99)))
    symbol = rng.choice(_TREE_OPERATORS)
    arity = 1 if symbol == "sqrt" else 2
    return Op(symbol, tuple(random_formula(rng, max_height - 1) for _ in range(arity)))


def generate_corpus(n_docs: int, seed: int, path: str | Path) -> Path:
    """Write a deterministic synthetic JSONL corpus: each document carries
    5-50 vocabulary words and 1-10 inline formulae of height <= 4."""
    if n_docs < 1:
        raise ValueError("n_docs must be >= 1")
    rng = random.Random(seed)
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for i in range(n_docs):
            words = [rng.choice(_VOCABULARY) for _ in range(rng.randint(MIN_WORDS, MAX_WORDS))]
            formulae = [
                random_formula(rng) for _ in range(rng.randint(MIN_FORMULAE, MAX_FORMULAE))
            ]
            pieces = list(words)
            for tree in formulae:
                pieces.insert(rng.randint(0, len(pieces)), f"${render(tree)}$")
            record = {
                "id": f"doc-{i:06d}",
                "title": f"{words[0]} {words[1 % len(words)]}",
                "text": " ".join(pieces),
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    return path


@dataclass(frozen=True)
class BenchRow:
    docs: int
    input_formulae: int
    indexed_tokens: int
    wall_s: float
    cpu_s: float


@dataclass
class BenchReport:
    rows: list[BenchRow]
    r_squared: float
    seconds_per_kdoc: float
    workers: int = 1

    def as_text(self) -> str:
        header = f"{'Docs':>8} {'Input formulae':>15} {'Indexed tokens':>15} {'Real (s)':>10} {'CPU (s)':>10}"
        lines = [header]
        for row in self.rows:
            lines.append(
                f"{row.docs:>8} {row.input_formulae:>15} {row.indexed_tokens:>15}"
                f" {row.wall_s:>10.2f} {row.cpu_s:>10.2f}"
            )
        lines.append(
            f"linear fit: R^2 = {self.r_squared:.4f}, {self.seconds_per_kdoc:.3f} s"
            f" per 1000 docs ({self.workers} worker{'s' if self.workers != 1 else ''})"
        )
        return "\n".join(lines)

    def as_json(self) -> dict:
        return {
            "rows": [row.__dict__ for row in self.rows],
            "r_squared": self.r_squared,
            "seconds_per_kdoc": self.seconds_per_kdoc,
            "workers": self.workers,
        }


def bench_indexing(
    sizes: list[int], seed: int = 0, workdir: str | Path | None = None, workers: int = 1
) -> BenchReport:
    """Index growing prefixes of one synthetic corpus and fit time vs docs.

    Timing is single-threaded by default; with ``workers > 1`` document
    preparation (the pure part) runs on a thread pool and the report's
    wall column shows the multi-threaded time against unchanged CPU cost.
    """
    if len(sizes) < 3:
        raise InsufficientPoints("need at least 3 corpus sizes")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise InsufficientPoints("sizes must be strictly increasing")
    import tempfile

    with tempfile.TemporaryDirectory(dir=workdir) as tmp:
        corpus_path = generate_corpus(sizes[-1], seed, Path(tmp) / "corpus.jsonl")
        documents = list(read_corpus_file(corpus_path))
        rows = []
        for size in sizes:
            wall0, cpu0 = time.perf_counter(), time.process_time()
            index = Index()
            batch = documents[:size]
            if workers > 1:
                from concurrent.futures import ThreadPoolExecutor

                with ThreadPoolExecutor(max_workers=workers) as pool:
                    prepared = pool.map(
                        lambda d: prepare_document(d.doc_id, d.title, d.text, d.formulae),
                        batch,
                    )
                    for p in prepared:  # map preserves order: deterministic merge
                        index.add_prepared(p)
            else:
                for doc in batch:
                    index.add_document(doc.doc_id, doc.title, doc.text, doc.formulae)
            wall, cpu = time.perf_counter() - wall0, time.process_time() - cpu0
            rows.append(
                BenchRow(size, index.total_input_formulae, index.total_math_tokens, wall, cpu)
            )
    xs = [float(r.docs) for r in rows]
    ys = [r.wall_s for r in rows]
    slope, r_squared = _least_squares(xs, ys)
    return BenchReport(rows, r_squared, slope * 1000.0, workers)


def _least_squares(xs: list[float], ys: list[float]) -> tuple[float, float]:
    n = len(xs)
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    sxx = sum((x - mean_x) ** 2 for x in xs)
    sxy = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = mean_y - slope * mean_x
    ss_res = sum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys))
    ss_tot = sum((y - mean_y) ** 2 for y in ys)
    r_squared = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return slope, r_squared
