"""Shared random-tree generators for property tests.

Seeded explicitly so every run exercises the same cases.
"""
import random

import pytest

from mathsearch.formula import CONST, UNIF, Const, Id, Num, Op, Unif, Var

VAR_NAMES = list("abcdxyz") + ["alpha", "x1", "beta2"]
INFIX_BINARY = ["+", "-", "*", "/", "^", "=", "<", ">"]


def random_num(rng, signed=True):
    literal = str(rng.randint(0, 999))
    if rng.random() < 0.3:
        literal += f".{rng.randint(0, 99):02d}"
    if signed and rng.random() < 0.2:
        literal = "-" + literal
    return Num(literal)


def random_parser_tree(rng, max_depth=4):
    """A tree in the infix parser's image: binary operators, neg, the
    function-call operators, variables and (possibly negative) literals."""
    if max_depth == 0 or rng.random() < 0.35:
        if rng.random() < 0.6:
            return Var(rng.choice(VAR_NAMES))
        return random_num(rng)
    roll = rng.random()
    if roll < 0.10:
        return Op("neg", (random_parser_tree(rng, max_depth - 1),))
    if roll < 0.18:
        return Op("sqrt", (random_parser_tree(rng, max_depth - 1),))
    if roll < 0.26:
        symbol = rng.choice(["root", "_"])
        return Op(symbol, (
            random_parser_tree(rng, max_depth - 1),
            random_parser_tree(rng, max_depth - 1),
        ))
    symbol = rng.choice(INFIX_BINARY)
    return Op(symbol, (
        random_parser_tree(rng, max_depth - 1),
        random_parser_tree(rng, max_depth - 1),
    ))


def random_any_tree(rng, max_depth=4):
    """Any valid tree, including placeholder leaves and n-ary operators."""
    if max_depth == 0 or rng.random() < 0.35:
        roll = rng.random()
        if roll < 0.45:
            return Var(rng.choice(VAR_NAMES))
        if roll < 0.75:
            return random_num(rng, signed=False)
        if roll < 0.85:
            return CONST
        if roll < 0.95:
            return Id(rng.randint(1, 5))
        return UNIF
    symbol = rng.choice(INFIX_BINARY + ["neg", "sqrt", "root", "_"])
    if symbol in ("neg", "sqrt"):
        arity = 1
    elif symbol in ("+", "*"):
        arity = rng.randint(2, 4)
    else:
        arity = 2
    return Op(symbol, tuple(random_any_tree(rng, max_depth - 1) for _ in range(arity)))


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
