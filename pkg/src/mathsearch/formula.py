"""Formula trees and the parsers that produce them.

A formula is an ordered rooted tree. Leaves are variables, number
literals, or unification placeholders; interior nodes are operators with
one or more children. Trees are immutable and hashable, so they can be
used as dict keys and compared structurally.

Two input syntaxes are supported: a small Presentation-MathML subset
(``parse_mathml``) and a plain infix notation (``parse_infix``). Both
produce identical trees for equivalent inputs. ``serialize`` maps a tree
to its canonical prefix token string, the exact-match key used by the
index; ``render`` pretty-prints a tree back to infix.
"""
from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field


class ParseError(ValueError):
    """Input does not conform to the expected grammar.

    ``position`` is a byte offset into the input where known, else None.
    """

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (byte {position})"
        super().__init__(message)


class UnsupportedElement(ParseError):
    """Well-formed MathML using an element outside the supported subset."""

    def __init__(self, tag: str):
        self.tag = tag
        super().__init__(f"unsupported MathML element <{tag}>")


class EmptyFormula(ParseError):
    """A math container with no content."""

    def __init__(self, message: str = "empty formula"):
        super().__init__(message)


_NUM_RE = re.compile(r"-?[0-9]+(\.[0-9]+)?$")


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("variable name must be non-empty")


@dataclass(frozen=True)
class Num:
    # Literal kept as text, never converted to float: exact and stable.
    # A leading "-" only ever comes from folding a unary minus.
    literal: str

    def __post_init__(self):
        if not _NUM_RE.match(self.literal):
            raise ValueError(f"bad number literal {self.literal!r}")


@dataclass(frozen=True)
class Const:
    """Placeholder a numeric constant unifies to."""


@dataclass(frozen=True)
class Id:
    """Numbered placeholder a variable unifies to; indices are dense from 1."""

    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("identifier index must be >= 1")


@dataclass(frozen=True)
class Unif:
    """Structural placeholder (the generic box) for a replaced subtree."""


@dataclass(frozen=True)
class Op:
    symbol: str
    children: tuple["FormulaTree", ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise ValueError(f"operator {self.symbol!r} needs at least one child")


FormulaTree = Var | Num | Const | Id | Unif | Op

CONST = Const()
UNIF = Unif()

# Binary operator table: symbol -> (precedence, associativity). Shared by
# the infix parser, MathML sequence grouping, and the pretty-printer.
BINARY_OPS: dict[str, tuple[int, str]] = {
    "=": (1, "left"),
    "<": (1, "left"),
    ">": (1, "left"),
    "+": (2, "left"),
    "-": (2, "left"),
    "*": (3, "left"),
    "/": (3, "left"),
    "^": (4, "right"),
}

_FUNCTION_ARITY = {"sqrt": 1, "root": 2, "sub": 2}
_FUNCTION_SYMBOL = {"sqrt": "sqrt", "root": "root", "sub": "_"}


def node_count(tree: FormulaTree) -> int:
    if isinstance(tree, Op):
        return 1 + sum(node_count(c) for c in tree.children)
    return 1


def height(tree: FormulaTree) -> int:
    """Maximum node depth, with the root at depth 0."""
    if isinstance(tree, Op):
        return 1 + max(height(c) for c in tree.children)
    return 0


def serialize(tree: FormulaTree) -> str:
    """Canonical prefix token string; injective on trees."""
    if isinstance(tree, Var):
        return f"(v {tree.name})"
    if isinstance(tree, Num):
        return f"(n {tree.literal})"
    if isinstance(tree, Const):
        return "(c)"
    if isinstance(tree, Id):
        return f"(i {tree.index})"
    if isinstance(tree, Unif):
        return "(u)"
    parts = " ".join(serialize(c) for c in tree.children)
    return f"({tree.symbol} {parts})"


def parse_token(token: str) -> FormulaTree:
    """Inverse of ``serialize``; accepts exactly the token-string grammar."""
    tree, rest = _parse_token_at(token, 0)
    if rest != len(token):
        raise ParseError("trailing characters in token string", rest)
    return tree


def _parse_token_at(s: str, i: int) -> tuple[FormulaTree, int]:
    if i >= len(s) or s[i] != "(":
        raise ParseError("expected '('", i)
    i += 1
    j = i
    while j < len(s) and s[j] not in " )":
        j += 1
    head = s[i:j]
    if not head:
        raise ParseError("missing node tag", i)
    if head == "c" and s[j : j + 1] == ")":
        return CONST, j + 1
    if head == "u" and s[j : j + 1] == ")":
        return UNIF, j + 1
    if head in ("v", "n", "i"):
        if s[j : j + 1] != " ":
            raise ParseError(f"'{head}' node needs an argument", j)
        k = s.find(")", j + 1)
        if k < 0:
            raise ParseError("unterminated node", j)
        arg = s[j + 1 : k]
        try:
            if head == "v":
                return Var(arg), k + 1
            if head == "n":
                return Num(arg), k + 1
            return Id(int(arg)), k + 1
        except ValueError as exc:
            raise ParseError(str(exc), j + 1) from exc
    # operator node
    children = []
    while j < len(s) and s[j] == " ":
        child, j = _parse_token_at(s, j + 1)
        children.append(child)
    if s[j : j + 1] != ")":
        raise ParseError("expected ')'", j)
    if not children:
        raise ParseError(f"operator {head!r} without children", i)
    return Op(head, tuple(children)), j + 1


# ---------------------------------------------------------------------------
# Infix notation
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<number>[0-9]+(\.[0-9]+)?)
      | (?P<ident>[^\W\d_][\w]*)
      | (?P<op>[-+*/^=<>(),])
    """,
    re.VERBOSE | re.UNICODE,
)


def _byte_offset(text: str, char_pos: int) -> int:
    return len(text[:char_pos].encode("utf-8"))


def _lex_infix(text: str) -> list[tuple[str, str, int]]:
    """Yields (kind, value, char_pos); kind in {number, ident, op}."""
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(
                f"unexpected character {text[pos]!r}", _byte_offset(text, pos)
            )
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    return tokens


class _InfixParser:
    """Recursive-descent parser for the infix grammar.

    expr  := rel
    rel   := add {("=" | "<" | ">") add}
    add   := mul {("+" | "-") mul}
    mul   := unary {("*" | "/") unary}
    unary := "-" unary | pow
    pow   := atom ["^" unary]
    atom  := ident | number | "(" expr ")"
           | "sqrt(" expr ")" | "root(" expr "," expr ")" | "sub(" expr "," expr ")"

    A unary minus directly before a bare number literal folds into the
    literal (producing a negative Num); anywhere else it becomes a "neg"
    node. Relation chains fold left-associatively.
    """

    def __init__(self, text: str):
        self.text = text
        self.tokens = _lex_infix(text)
        self.i = 0

    def _peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def _error(self, message: str, tok=None) -> ParseError:
        if tok is None:
            tok = self._peek()
        pos = _byte_offset(self.text, tok[2]) if tok else len(self.text.encode())
        return ParseError(message, pos)

    def _accept_op(self, symbols) -> str | None:
        tok = self._peek()
        if tok and tok[0] == "op" and tok[1] in symbols:
            self.i += 1
            return tok[1]
        return None

    def _expect_op(self, symbol: str):
        if not self._accept_op((symbol,)):
            raise self._error(f"expected {symbol!r}")

    def parse(self) -> FormulaTree:
        if not self.tokens:
            raise EmptyFormula("empty formula text")
        tree = self._rel()
        if self._peek() is not None:
            raise self._error("unexpected trailing input")
        return tree

    def _chain(self, sub, symbols) -> FormulaTree:
        left = sub()
        while (op := self._accept_op(symbols)) is not None:
            left = Op(op, (left, sub()))
        return left

    def _rel(self):
        return self._chain(self._add, "=<>")

    def _add(self):
        return self._chain(self._mul, "+-")

    def _mul(self):
        return self._chain(self._unary, "*/")

    def _unary(self):
        if self._accept_op(("-",)):
            mark = self.i
            operand = self._unary()
            bare_literal = (
                self.i == mark + 1
                and isinstance(operand, Num)
                and not operand.literal.startswith("-")
            )
            if bare_literal:
                return Num("-" + operand.literal)
            return Op("neg", (operand,))
        return self._pow()

    def _pow(self):
        base = self._atom()
        if self._accept_op(("^",)):
            return Op("^", (base, self._unary()))
        return base

    def _atom(self):
        tok = self._peek()
        if tok is None:
            raise self._error("unexpected end of input")
        kind, value, _ = tok
        if kind == "number":
            self.i += 1
            return Num(value)
        if kind == "ident":
            self.i += 1
            nxt = self._peek()
            if value in _FUNCTION_ARITY and nxt and nxt[0] == "op" and nxt[1] == "(":
                return self._call(value)
            return Var(value)
        if kind == "op" and value == "(":
            self.i += 1
            inner = self._rel()
            self._expect_op(")")
            return inner
        raise self._error(f"unexpected {value!r}")

    def _call(self, name: str):
        self._expect_op("(")
        args = [self._rel()]
        while self._accept_op((",",)):
            args.append(self._rel())
        self._expect_op(")")
        if len(args) != _FUNCTION_ARITY[name]:
            raise self._error(f"{name} takes {_FUNCTION_ARITY[name]} argument(s)")
        return Op(_FUNCTION_SYMBOL[name], tuple(args))


def parse_infix(text: str) -> FormulaTree:
    """Parse plain infix notation into a formula tree.

    Raises ParseError with a byte offset on syntax errors and
    EmptyFormula for blank input.
    """
    if not text.strip():
        raise EmptyFormula("empty formula text")
    return _InfixParser(text).parse()


# ---------------------------------------------------------------------------
# Presentation MathML subset
# ---------------------------------------------------------------------------

_MATHML_NS = "http://www.w3.org/1998/Math/MathML"

# mo content normalized to the operator table's symbols
_MO_ALIASES = {
    "⋅": "*",  # dot operator
    "·": "*",  # middle dot
    "×": "*",  # multiplication sign
    "∗": "*",  # asterisk operator
    "⁢": "*",  # invisible times
    "−": "-",  # minus sign
    "÷": "/",
    "∕": "/",  # division slash
}

_SUPPORTED_ELEMENTS = {"math", "mrow", "mi", "mn", "mo", "msup", "msub", "mfrac", "msqrt", "mroot"}


def _localname(tag) -> str:
    if isinstance(tag, str) and tag.startswith("{"):
        return tag.rsplit("}", 1)[1]
    return tag


def parse_mathml(xml: str) -> FormulaTree:
    """Parse a Presentation-MathML fragment into a formula tree.

    Supported elements: math, mrow, mi, mn, mo, msup, msub, mfrac, msqrt,
    mroot. Flat token runs inside math/mrow/msqrt are grouped by operator
    precedence, with implicit multiplication between adjacent operands.
    """
    try:
        root = ET.fromstring(xml)
    except ET.ParseError as exc:
        line, col = exc.position
        offset = _byte_offset(xml, sum(len(l) + 1 for l in xml.split("\n")[: line - 1]) + col)
        raise ParseError(f"malformed XML: {exc.msg}", offset) from exc
    name = _localname(root.tag)
    if name not in ("math", "mrow"):
        raise ParseError(f"root element must be <math> or <mrow>, got <{name}>")
    children = list(root)
    if not children:
        raise EmptyFormula(f"<{name}> has no content")
    return _group_row([_convert(child) for child in children])


def _convert(elem) -> FormulaTree | str:
    """Element -> operand tree, or an operator symbol string for <mo>."""
    name = _localname(elem.tag)
    if name not in _SUPPORTED_ELEMENTS:
        raise UnsupportedElement(name)
    text = (elem.text or "").strip()
    if name == "mi":
        if not text:
            raise ParseError("<mi> with empty content")
        if not (text[0].isalpha() and all(c.isalnum() for c in text)):
            raise ParseError(f"<mi> content {text!r} is not an identifier")
        return Var(text)
    if name == "mn":
        try:
            return Num(text)
        except ValueError as exc:
            raise ParseError(f"<mn> content {text!r} is not a number literal") from exc
    if name == "mo":
        symbol = _MO_ALIASES.get(text, text)
        if symbol not in BINARY_OPS:
            raise UnsupportedElement(f"mo {text!r}")
        return symbol
    children = list(elem)
    if name in ("mrow", "msqrt", "math"):
        if not children:
            raise EmptyFormula(f"<{name}> has no content")
        row = _group_row([_convert(c) for c in children])
        return Op("sqrt", (row,)) if name == "msqrt" else row
    # fixed-arity layout elements
    if len(children) != 2:
        raise ParseError(f"<{name}> needs exactly 2 children, got {len(children)}")
    a, b = (_require_operand(_convert(c), name) for c in children)
    symbol = {"msup": "^", "msub": "_", "mfrac": "/", "mroot": "root"}[name]
    return Op(symbol, (a, b))


def _require_operand(item, context: str) -> FormulaTree:
    if isinstance(item, str):
        raise ParseError(f"operator {item!r} cannot be a child of <{context}>")
    return item


def _group_row(items: list[FormulaTree | str]) -> FormulaTree:
    """Group a flat run of operands and operator symbols by precedence.

    Adjacent operands multiply implicitly; a prefix minus folds into a
    following number literal, otherwise wraps its operand in "neg".
    """
    pos = 0

    def peek():
        return items[pos] if pos < len(items) else None

    def parse_operand() -> FormulaTree:
        nonlocal pos
        item = peek()
        if item is None:
            raise ParseError("formula ends with an operator")
        if isinstance(item, str):
            if item != "-":
                raise ParseError(f"operator {item!r} in operand position")
            pos += 1
            operand = parse_operand()
            if isinstance(operand, Num) and not operand.literal.startswith("-"):
                return Num("-" + operand.literal)
            return Op("neg", (operand,))
        pos += 1
        return item

    def parse_expr(min_prec: int) -> FormulaTree:
        nonlocal pos
        left = parse_operand()
        while True:
            item = peek()
            if item is None:
                return left
            if isinstance(item, str):
                symbol, explicit = item, True
            else:
                symbol, explicit = "*", False  # implicit multiplication
            prec, assoc = BINARY_OPS[symbol]
            if prec < min_prec:
                return left
            if explicit:
                pos += 1
            right = parse_expr(prec + 1 if assoc == "left" else prec)
            left = Op(symbol, (left, right))

    tree = parse_expr(1)
    if pos != len(items):
        raise ParseError("could not group the token sequence")
    return tree


# ---------------------------------------------------------------------------
# Pretty-printer (inverse of parse_infix on its image)
# ---------------------------------------------------------------------------

# Grammar level at which a node can appear without parentheses; higher
# binds tighter. Levels: rel=1, add=2, mul=3, unary=3.5, pow=4, atom=5.
_LEVEL_ATOM = 5.0
_LEVEL_UNARY = 3.5


def _level(tree: FormulaTree) -> float:
    if isinstance(tree, Op):
        if tree.symbol == "neg":
            return _LEVEL_UNARY
        if tree.symbol in BINARY_OPS:
            return float(BINARY_OPS[tree.symbol][0])
        return _LEVEL_ATOM  # function-call syntax
    if isinstance(tree, Num) and tree.literal.startswith("-"):
        return _LEVEL_UNARY  # prints as unary minus + literal
    return _LEVEL_ATOM


def _wrap(child: FormulaTree, min_level: float) -> str:
    text = render(child)
    return f"({text})" if _level(child) < min_level else text


def render(tree: FormulaTree) -> str:
    """Infix form with minimal parentheses.

    Exact inverse of parse_infix for trees in the parser's image (binary
    operators, no placeholders). Placeholder nodes render for display
    only: id1, const, and the box.
    """
    if isinstance(tree, Var):
        return tree.name
    if isinstance(tree, Num):
        return tree.literal
    if isinstance(tree, Id):
        return f"id{tree.index}"
    if isinstance(tree, Const):
        return "const"
    if isinstance(tree, Unif):
        return "◻"
    symbol = tree.symbol
    if symbol == "neg":
        operand = tree.children[0]
        if isinstance(operand, Num) and not operand.literal.startswith("-"):
            # "-3" would re-parse as a folded literal, not as neg
            return f"-({operand.literal})"
        return "-" + _wrap(operand, _LEVEL_UNARY)
    if symbol == "sqrt":
        return f"sqrt({render(tree.children[0])})"
    if symbol == "root":
        return f"root({render(tree.children[0])}, {render(tree.children[1])})"
    if symbol == "_":
        return f"sub({render(tree.children[0])}, {render(tree.children[1])})"
    prec, assoc = BINARY_OPS[symbol]
    if symbol == "^":
        return _wrap(tree.children[0], _LEVEL_ATOM) + "^" + _wrap(tree.children[1], _LEVEL_UNARY)
    # left-associative chain: first operand may sit at the same level,
    # later operands must bind strictly tighter
    parts = [_wrap(tree.children[0], prec)]
    rest_level = _LEVEL_UNARY if prec == 3 else prec + 1
    parts.extend(_wrap(c, rest_level) for c in tree.children[1:])
    return symbol.join(parts)
