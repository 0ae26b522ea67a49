"""Canonical form for formula trees.

Two passes. ``canonicalize`` normalizes structure: nested applications of
the associative operators + and * are flattened into a single n-ary node.
``order_commutative`` then sorts the operands of commutative operators by
their serialized form, so notational variants like b+a and a+b index and
query identically. Both passes are idempotent and pure.
"""
from __future__ import annotations

from .formula import FormulaTree, Op, serialize

COMMUTATIVE = frozenset({"+", "*", "="})
FLATTENABLE = frozenset({"+", "*"})


def canonicalize(tree: FormulaTree) -> FormulaTree:
    """Flatten nested +/* chains bottom-up; a fixed point of itself."""
    if not isinstance(tree, Op):
        return tree
    children = [canonicalize(c) for c in tree.children]
    if tree.symbol in FLATTENABLE:
        flat: list[FormulaTree] = []
        for child in children:
            if isinstance(child, Op) and child.symbol == tree.symbol:
                flat.extend(child.children)
            else:
                flat.append(child)
        if len(flat) == 1:
            return flat[0]
        children = flat
    return Op(tree.symbol, tuple(children))


def order_commutative(tree: FormulaTree) -> FormulaTree:
    """Sort children of commutative operators by serialized form, bottom-up."""
    if not isinstance(tree, Op):
        return tree
    children = [order_commutative(c) for c in tree.children]
    if tree.symbol in COMMUTATIVE:
        children.sort(key=serialize)
    return Op(tree.symbol, tuple(children))


def normalize(tree: FormulaTree) -> FormulaTree:
    """The full canonical form every indexed or queried formula goes through."""
    return order_commutative(canonicalize(tree))
