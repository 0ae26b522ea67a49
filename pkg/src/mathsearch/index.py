"""Weighted inverted index over text stems and math tokens.

Text and math live in disjoint namespaces so the query engine can demand
"at least one term and at least one formula" without collisions. Postings
accumulate weighted term frequencies: a text occurrence contributes 1,
a math token contributes its unifier weight, and this is exactly where
subformula and unification weights enter ranking.

A built index is immutable in practice: writes happen during a build or
load, after which any number of threads may search it concurrently.
Persistence is a small directory of JSON files plus a checksum.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .canonical import normalize
from .corpus import math_byte_ranges
from .formula import FormulaTree, parse_infix, render
from .text import TextTerm, analyze
from .tokens import DEFAULT_CONFIG, FormulaToken, UnifierConfig, tokens_for_index

FORMAT_VERSION = 1

TEXT = "text"
MATH = "math"

_FILES = ("meta.json", "docs.jsonl", "postings.jsonl")


class DuplicateDocId(ValueError):
    pass


class CorruptIndex(Exception):
    """Missing files or checksum mismatch."""


class FormatVersionMismatch(Exception):
    def __init__(self, found):
        self.found = found
        super().__init__(f"index format version {found!r}, expected {FORMAT_VERSION}")


@dataclass
class StoredDocument:
    doc_id: str
    title: str
    text: str
    formulae: list[FormulaTree]  # canonical and ordered
    terms: list[TextTerm] = field(default_factory=list)  # token stats for highlighting
    norm: float = 0.0


@dataclass(frozen=True)
class PostingList:
    token: str
    kind: str
    df: int
    postings: list[tuple[int, float]]  # (internal id, summed weight), id-sorted


@dataclass
class PreparedDocument:
    """Per-document analysis output; computing these is pure, so callers
    may parallelize preparation and merge deterministically."""

    doc_id: str
    title: str
    text: str
    terms: list[TextTerm]
    formulae: list[FormulaTree]  # canonical and ordered
    formula_tokens: list[list[FormulaToken]]


def prepare_document(
    doc_id: str,
    title: str = "",
    text: str = "",
    formulae: list[FormulaTree] | None = None,
    config: UnifierConfig = DEFAULT_CONFIG,
) -> PreparedDocument:
    canonical = [normalize(f) for f in (formulae or [])]
    return PreparedDocument(
        doc_id,
        title,
        text,
        _document_terms(text),
        canonical,
        [tokens_for_index(tree, config) for tree in canonical],
    )


def _damped_tf(tf_w: float) -> float:
    # log damping for repeated occurrences; linear below 1 so fractional
    # math-token weights keep contributions positive and monotone
    return 1.0 + math.log(tf_w) if tf_w >= 1.0 else tf_w


class Index:
    def __init__(self, config: UnifierConfig = DEFAULT_CONFIG):
        self.config = config
        self.docs: list[StoredDocument] = []
        self._by_doc_id: dict[str, int] = {}
        self._postings: dict[tuple[str, str], dict[int, float]] = {}
        self.total_math_tokens = 0
        self.total_input_formulae = 0

    @property
    def n_docs(self) -> int:
        return len(self.docs)

    def add_document(
        self,
        doc_id: str,
        title: str = "",
        text: str = "",
        formulae: list[FormulaTree] | None = None,
    ) -> int:
        """Analyze and add one document; returns its internal id.

        ``text`` is stored verbatim; tokens inside inline math segments
        are skipped by text analysis (the formulae argument carries the
        parsed math), so stored spans stay valid for highlighting.
        """
        return self.add_prepared(prepare_document(doc_id, title, text, formulae, self.config))

    def add_prepared(self, prepared: PreparedDocument) -> int:
        """Merge one prepared document; must run under exclusive access."""
        if prepared.doc_id in self._by_doc_id:
            raise DuplicateDocId(prepared.doc_id)
        internal = len(self.docs)

        token_count = 0
        for term in prepared.terms:
            self._add_posting(TEXT, term.stem, internal, 1.0)
            token_count += 1
        for toks in prepared.formula_tokens:
            for tok in toks:
                self._add_posting(MATH, tok.token, internal, tok.weight)
            token_count += len(toks)
            self.total_math_tokens += len(toks)
        self.total_input_formulae += len(prepared.formulae)

        doc = StoredDocument(
            prepared.doc_id, prepared.title, prepared.text,
            prepared.formulae, prepared.terms, math.sqrt(token_count),
        )
        self.docs.append(doc)
        self._by_doc_id[doc.doc_id] = internal
        return internal

    def _add_posting(self, kind: str, token: str, internal: int, weight: float):
        bucket = self._postings.setdefault((kind, token), {})
        bucket[internal] = bucket.get(internal, 0.0) + weight

    def get(self, doc_id: str) -> StoredDocument | None:
        internal = self._by_doc_id.get(doc_id)
        return self.docs[internal] if internal is not None else None

    def internal_id(self, doc_id: str) -> int | None:
        return self._by_doc_id.get(doc_id)

    def tokens(self) -> list[tuple[str, str]]:
        """All (kind, token) pairs present in the index, sorted."""
        return sorted(self._postings)

    def lookup(self, token: str, kind: str) -> PostingList | None:
        bucket = self._postings.get((kind, token))
        if bucket is None:
            return None
        postings = sorted(bucket.items())
        return PostingList(token, kind, len(postings), postings)

    def score(
        self,
        internal: int,
        matched: list[tuple[str, str]],
        query_weights: dict[tuple[str, str], float],
    ) -> float:
        """TF-IDF with damped weighted tf and a length norm.

        score = sum over matched (kind, token) of
            q(t) * damp(tf_w(t, d)) * ln(1 + N / (df(t) + 1)) / norm(d)
        """
        doc = self.docs[internal]
        n = self.n_docs
        total = 0.0
        for key in matched:
            bucket = self._postings[key]
            tf_w = bucket[internal]
            df = len(bucket)
            total += query_weights[key] * _damped_tf(tf_w) * math.log(1.0 + n / (df + 1))
        return total / doc.norm

    # -- persistence --------------------------------------------------------

    def persist(self, path: str | Path):
        """Write the index as a directory; deterministic byte-for-byte."""
        root = Path(path)
        root.mkdir(parents=True, exist_ok=True)
        meta = {
            "version": FORMAT_VERSION,
            "n_docs": self.n_docs,
            "config": self.config.as_meta(),
        }
        (root / "meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")

        with (root / "docs.jsonl").open("w", encoding="utf-8") as fh:
            for doc in self.docs:
                fh.write(json.dumps({
                    "doc_id": doc.doc_id,
                    "title": doc.title,
                    "text": doc.text,
                    "formulae": [render(f) for f in doc.formulae],
                    "norm": doc.norm,
                }, ensure_ascii=False) + "\n")

        with (root / "postings.jsonl").open("w", encoding="utf-8") as fh:
            for (kind, token) in sorted(self._postings):
                postings = sorted(self._postings[(kind, token)].items())
                fh.write(json.dumps({
                    "token": token,
                    "kind": kind,
                    "df": len(postings),
                    "postings": [[i, w] for i, w in postings],
                }, ensure_ascii=False) + "\n")

        digests = [
            f"{_sha256(root / name)}  {name}\n" for name in _FILES
        ]
        (root / "CHECKSUM").write_text("".join(digests), encoding="utf-8")

    @classmethod
    def open(cls, path: str | Path) -> "Index":
        root = Path(path)
        for name in (*_FILES, "CHECKSUM"):
            if not (root / name).is_file():
                raise CorruptIndex(f"missing {name} in {root}")
        recorded = {}
        for line in (root / "CHECKSUM").read_text(encoding="utf-8").splitlines():
            if line.strip():
                digest, _, name = line.partition("  ")
                recorded[name.strip()] = digest.strip()
        for name in _FILES:
            if recorded.get(name) != _sha256(root / name):
                raise CorruptIndex(f"checksum mismatch for {name}")

        meta = json.loads((root / "meta.json").read_text(encoding="utf-8"))
        if meta.get("version") != FORMAT_VERSION:
            raise FormatVersionMismatch(meta.get("version"))
        index = cls(UnifierConfig.from_meta(meta["config"]))

        with (root / "docs.jsonl").open(encoding="utf-8") as fh:
            for internal, line in enumerate(fh):
                rec = json.loads(line)
                formulae = [normalize(parse_infix(s)) for s in rec["formulae"]]
                doc = StoredDocument(
                    rec["doc_id"], rec["title"], rec["text"], formulae,
                    _document_terms(rec["text"]), rec["norm"],
                )
                index.docs.append(doc)
                index._by_doc_id[doc.doc_id] = internal

        with (root / "postings.jsonl").open(encoding="utf-8") as fh:
            for line in fh:
                rec = json.loads(line)
                index._postings[(rec["kind"], rec["token"])] = {
                    int(i): float(w) for i, w in rec["postings"]
                }
        if meta["n_docs"] != len(index.docs):
            raise CorruptIndex("n_docs in meta.json does not match docs.jsonl")
        return index


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _document_terms(text: str) -> list[TextTerm]:
    """Text terms of a document, skipping tokens inside inline math."""
    ranges = math_byte_ranges(text)
    terms = analyze(text)
    if not ranges:
        return terms
    return [
        t for t in terms
        if not any(t.start < end and start < t.end for start, end in ranges)
    ]
