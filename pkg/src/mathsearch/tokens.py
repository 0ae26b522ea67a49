"""Weighted token expansion of canonical formulae.

One formula becomes many index tokens: every subformula is emitted in
four unification variants (exact, variables renamed to numbered ids,
numeric constants collapsed, both), weighted down with subformula depth,
plus a ladder of structural generalizations of the whole formula where
entire depth levels are replaced by a generic placeholder. Query-side
expansion is identical except that subformulae are not enumerated: a
document containing a larger formula should match, a document containing
only a fragment of the query should not.
"""
from __future__ import annotations

from dataclasses import dataclass

from .formula import CONST, UNIF, FormulaTree, Id, Num, Op, Var, height, serialize


class InvalidLevel(ValueError):
    """Structural level outside 1..height."""


class Variant:
    """Marker base for the unification variant of a token."""

    __slots__ = ()


@dataclass(frozen=True)
class Exact(Variant):
    pass


@dataclass(frozen=True)
class VarUnified(Variant):
    pass


@dataclass(frozen=True)
class ConstUnified(Variant):
    pass


@dataclass(frozen=True)
class VarConstUnified(Variant):
    pass


@dataclass(frozen=True)
class Structural(Variant):
    level: int


EXACT = Exact()
VAR_UNIFIED = VarUnified()
CONST_UNIFIED = ConstUnified()
VAR_CONST_UNIFIED = VarConstUnified()


@dataclass(frozen=True)
class FormulaToken:
    """A serialized formula variant with its indexing weight."""

    token: str
    weight: float
    variant: Variant


@dataclass(frozen=True)
class SubformulaOccurrence:
    subtree: FormulaTree
    depth: int


@dataclass(frozen=True)
class UnifierConfig:
    """Weighting knobs, persisted into index metadata so an index is
    self-describing. ``depth_weight`` names the formula (only "inverse"
    exists); the factors scale unified variants relative to exact ones.
    """

    var_unified: float = 0.8
    const_unified: float = 0.8
    depth_weight: str = "inverse"
    structural_enabled: bool = True

    def as_meta(self) -> dict:
        return {
            "weight.var_unified": self.var_unified,
            "weight.const_unified": self.const_unified,
            "depth_weight": self.depth_weight,
            "structural.enabled": self.structural_enabled,
        }

    @classmethod
    def from_meta(cls, meta: dict) -> "UnifierConfig":
        return cls(
            var_unified=meta["weight.var_unified"],
            const_unified=meta["weight.const_unified"],
            depth_weight=meta["depth_weight"],
            structural_enabled=meta["structural.enabled"],
        )


DEFAULT_CONFIG = UnifierConfig()


def extract_subformulae(tree: FormulaTree) -> list[SubformulaOccurrence]:
    """Every node of the tree as a subtree root, pre-order."""
    out: list[SubformulaOccurrence] = []

    def walk(node: FormulaTree, depth: int):
        out.append(SubformulaOccurrence(node, depth))
        if isinstance(node, Op):
            for child in node.children:
                walk(child, depth + 1)

    walk(tree, 0)
    return out


def depth_weight(depth: int) -> float:
    """1/(depth+1): the whole formula keeps weight 1, fragments decay."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    return 1.0 / (depth + 1)


def unify_variables(tree: FormulaTree) -> FormulaTree:
    """Replace variables with numbered ids, assigned by first pre-order
    occurrence; equal names share an id."""
    mapping: dict[str, int] = {}

    def go(node: FormulaTree) -> FormulaTree:
        if isinstance(node, Var):
            index = mapping.setdefault(node.name, len(mapping) + 1)
            return Id(index)
        if isinstance(node, Op):
            return Op(node.symbol, tuple(go(c) for c in node.children))
        return node

    return go(tree)


def unify_constants(tree: FormulaTree) -> FormulaTree:
    """Replace every number literal with the constant placeholder."""
    if isinstance(tree, Num):
        return CONST
    if isinstance(tree, Op):
        return Op(tree.symbol, tuple(unify_constants(c) for c in tree.children))
    return tree


def structural_unify(tree: FormulaTree) -> list[tuple[FormulaTree, int]]:
    """Generalization ladder: for each level from height(tree) down to 1,
    a copy with every subtree rooted at that depth replaced by the
    placeholder. Empty for single-node formulae."""
    h = height(tree)
    return [(_replace_level(tree, 0, level), level) for level in range(h, 0, -1)]


def _replace_level(node: FormulaTree, depth: int, level: int) -> FormulaTree:
    if depth == level:
        return UNIF
    if isinstance(node, Op):
        return Op(node.symbol, tuple(_replace_level(c, depth + 1, level) for c in node.children))
    return node


def variant_factor(variant: Variant, h: int, config: UnifierConfig = DEFAULT_CONFIG) -> float:
    """Weight multiplier of a unification variant, for a formula of height h.

    Structural replacements closer to the leaves keep more of the formula
    and weigh more: level/(h+1) stays below the exact token's 1.0.
    """
    if isinstance(variant, Exact):
        return 1.0
    if isinstance(variant, VarUnified):
        return config.var_unified
    if isinstance(variant, ConstUnified):
        return config.const_unified
    if isinstance(variant, VarConstUnified):
        return config.var_unified * config.const_unified
    if isinstance(variant, Structural):
        if not 1 <= variant.level <= h:
            raise InvalidLevel(f"structural level {variant.level} outside 1..{h}")
        return variant.level / (h + 1)
    raise TypeError(f"unknown variant {variant!r}")


def _variant_emissions(tree: FormulaTree, base_weight: float, config: UnifierConfig):
    yield FormulaToken(serialize(tree), base_weight, EXACT)
    yield FormulaToken(
        serialize(unify_variables(tree)), base_weight * config.var_unified, VAR_UNIFIED
    )
    const_unified = unify_constants(tree)
    yield FormulaToken(
        serialize(const_unified), base_weight * config.const_unified, CONST_UNIFIED
    )
    yield FormulaToken(
        serialize(unify_variables(const_unified)),
        base_weight * config.var_unified * config.const_unified,
        VAR_CONST_UNIFIED,
    )


def _structural_emissions(tree: FormulaTree, config: UnifierConfig):
    h = height(tree)
    for unified, level in structural_unify(tree):
        variant = Structural(level)
        yield FormulaToken(serialize(unified), variant_factor(variant, h, config), variant)


def _dedup(emissions) -> list[FormulaToken]:
    # repeated subterms reinforce each other: same token string -> weights sum
    merged: dict[str, FormulaToken] = {}
    for tok in emissions:
        prev = merged.get(tok.token)
        if prev is None:
            merged[tok.token] = tok
        else:
            merged[tok.token] = FormulaToken(prev.token, prev.weight + tok.weight, prev.variant)
    return list(merged.values())


def tokens_for_index(tree: FormulaTree, config: UnifierConfig = DEFAULT_CONFIG) -> list[FormulaToken]:
    """Index-side expansion: all subformulae x all variants, plus the
    structural ladder of the whole formula; duplicates merged by summed
    weight. The tree must already be canonical and ordered."""
    emissions = []
    for occ in extract_subformulae(tree):
        emissions.extend(_variant_emissions(occ.subtree, depth_weight(occ.depth), config))
    if config.structural_enabled:
        emissions.extend(_structural_emissions(tree, config))
    return _dedup(emissions)


def tokens_for_query(tree: FormulaTree, config: UnifierConfig = DEFAULT_CONFIG) -> list[FormulaToken]:
    """Query-side expansion: the whole formula's variants only, no
    subformula enumeration."""
    emissions = list(_variant_emissions(tree, depth_weight(0), config))
    if config.structural_enabled:
        emissions.extend(_structural_emissions(tree, config))
    return _dedup(emissions)
