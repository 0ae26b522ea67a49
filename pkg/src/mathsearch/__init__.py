"""Math-aware search engine.

Formulae in documents and queries are canonicalized, commutatively
ordered, tokenized into weighted subformulae, and unified into
generalization variants; mixed text+math queries expand into prioritized
subqueries whose result lists interleave into the final ranking.
"""

from .canonical import canonicalize, normalize, order_commutative
from .formula import parse_infix, parse_mathml, render, serialize
from .index import Index
from .search import search
from .tokens import tokens_for_index, tokens_for_query

__all__ = [
    "Index",
    "canonicalize",
    "normalize",
    "order_commutative",
    "parse_infix",
    "parse_mathml",
    "render",
    "search",
    "serialize",
    "tokens_for_index",
    "tokens_for_query",
]

__version__ = "0.1.0"
