"""Mixed text+math input: inline math segments and the JSONL corpus format.

Document text and queries share one convention: ``$...$`` wraps infix
math, ``<math>...</math>`` wraps the MathML subset, everything else is
text. There is no nesting or escaping. The splitter reports byte spans so
callers can keep original text while excluding math from text analysis.

A corpus file is JSONL, one document per line:
``{"id", "title", "text"}`` where text may embed inline math, plus an
optional ``"mathml": [...]`` list of standalone MathML formulae.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from .formula import FormulaTree, ParseError, parse_infix, parse_mathml

INFIX = "infix"
MATHML = "mathml"

_MATHML_OPEN = "<math"
_MATHML_CLOSE = "</math>"


class UnclosedMathSegment(ValueError):
    """A '$' or '<math>' without its closing delimiter."""

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} (byte {position})")


class CorpusError(ValueError):
    """A corpus line that cannot be ingested; carries file and line number."""

    def __init__(self, path, line_no: int, message: str):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


@dataclass(frozen=True)
class MathSegment:
    kind: str  # INFIX or MATHML
    body: str  # inner text for infix, the whole element for mathml
    start: int  # byte span of the segment including delimiters
    end: int


def _byte_len(s: str) -> int:
    return len(s.encode("utf-8"))


def split_math_segments(text: str) -> list[MathSegment]:
    """Find inline math segments; byte spans cover the delimiters."""
    segments: list[MathSegment] = []
    i = 0
    byte = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "$":
            close = text.find("$", i + 1)
            if close < 0:
                raise UnclosedMathSegment("unbalanced '$'", byte)
            body = text[i + 1 : close]
            end_byte = byte + _byte_len(text[i : close + 1])
            segments.append(MathSegment(INFIX, body, byte, end_byte))
            byte = end_byte
            i = close + 1
        elif text.startswith(_MATHML_OPEN, i) and text[i + len(_MATHML_OPEN) : i + len(_MATHML_OPEN) + 1] in (">", " ", ""):
            close = text.find(_MATHML_CLOSE, i)
            if close < 0:
                raise UnclosedMathSegment("unterminated <math> element", byte)
            stop = close + len(_MATHML_CLOSE)
            body = text[i:stop]
            end_byte = byte + _byte_len(text[i:stop])
            segments.append(MathSegment(MATHML, body, byte, end_byte))
            byte = end_byte
            i = stop
        else:
            byte += _byte_len(ch)
            i += 1
    return segments


def parse_segment(segment: MathSegment) -> FormulaTree:
    if segment.kind == INFIX:
        return parse_infix(segment.body)
    return parse_mathml(segment.body)


def math_byte_ranges(text: str) -> list[tuple[int, int]]:
    return [(s.start, s.end) for s in split_math_segments(text)]


@dataclass
class CorpusDocument:
    doc_id: str
    title: str
    text: str
    formulae: list[FormulaTree] = field(default_factory=list)  # as parsed, not normalized


def read_corpus_file(path: str | Path) -> Iterator[CorpusDocument]:
    """Stream documents from a JSONL corpus; errors name file and line."""
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(path, line_no, f"invalid JSON: {exc.msg}") from exc
            if not isinstance(record, dict) or "id" not in record:
                raise CorpusError(path, line_no, "document object must have an 'id'")
            doc_id = str(record["id"])
            title = str(record.get("title", ""))
            text = str(record.get("text", ""))
            formulae = []
            try:
                for segment in split_math_segments(text):
                    formulae.append(parse_segment(segment))
                for xml in record.get("mathml", []):
                    formulae.append(parse_mathml(xml))
            except (ParseError, UnclosedMathSegment) as exc:
                raise CorpusError(path, line_no, f"bad formula: {exc}") from exc
            yield CorpusDocument(doc_id, title, text, formulae)
