"""Frame-class layering and the strict-semantics rewrite of the canonicity base.

``frame_layer_translate`` prefixes a formula with a root-layer marker and
relativizes each modality to the next layer, so satisfaction over arbitrary
frames coincides with satisfaction of the original formula over the
layer-respecting subrelation; composing with reflexive-transitive closure
gives the hardness transfer to frame classes between S4 and K.

``strict_rewrite_max`` eliminates the single diamond of the offset-
canonicity formula and switches its splits to the strict disjunction, which
is sound because the affected disjuncts are downward closed.
"""

from __future__ import annotations

from typing import Iterable

from . import formula as F
from .formula import Formula
from .structure import KripkeStructure


def layer_names(k: int, avoid=frozenset()) -> list:
    """``l_0 .. l_k``, renamed with a trailing underscore on collision."""
    names = []
    for i in range(k + 1):
        name = f"l_{i}"
        while name in avoid:
            name += "_"
        names.append(name)
    return names


def frame_layer_translate(f: Formula, k: int, layers=None) -> Formula:
    """Relativize modalities to consecutive layers; returns ``l_0 & f^0``."""
    if f.md > k:
        raise ValueError(f"formula has modal depth {f.md} > k = {k}")
    if not _lax_only(f):
        raise ValueError("frame layering is defined for lax formulas")
    if layers is None:
        layers = layer_names(k, avoid=F.props_of(f))
    if len(layers) < k + 1:
        raise ValueError(f"need {k + 1} layer names")
    if set(layers) & F.props_of(f):
        raise ValueError("layer names collide with the formula's propositions")

    def walk(g: Formula, i: int) -> Formula:
        kind = g.kind
        if kind in (F.TOP, F.PROP):
            return g
        if kind == F.MLNEG:
            return F.MLNeg(walk(g.args[0], i))
        if kind == F.TEAMNEG:
            return F.TeamNeg(walk(g.args[0], i))
        if kind == F.AND:
            return F.And(walk(g.args[0], i), walk(g.args[1], i))
        if kind == F.LAXOR:
            return F.LaxOr(walk(g.args[0], i), walk(g.args[1], i))
        if kind == F.DIA:
            return F.Dia(F.And(F.Prop(layers[i + 1]), walk(g.args[0], i + 1)))
        if kind == F.BOX:
            return F.Box(F.hook(F.Prop(layers[i + 1]), walk(g.args[0], i + 1)))
        raise ValueError(f"unsupported connective {kind} in frame layering")

    return F.And(F.Prop(layers[0]), walk(f, 0))


def _lax_only(f: Formula) -> bool:
    return f.kind not in (F.STROR, F.STRDIA) and all(_lax_only(a) for a in f.args)


def restrict_edges_by_layers(structure: KripkeStructure, layers: Iterable[str]) -> KripkeStructure:
    """Keep only edges from layer i into layer i+1."""
    layers = list(layers)
    masks = [structure.prop_mask(name) for name in layers]
    allowed = []
    for i in range(len(structure.worlds)):
        bit = 1 << i
        keep = 0
        for j in range(len(masks) - 1):
            if masks[j] & bit:
                keep |= masks[j + 1]
        allowed.append(keep)
    edges = [
        (u, v)
        for (u, v) in structure.edges()
        if allowed[structure.index(u)] >> structure.index(v) & 1
    ]
    return KripkeStructure(
        structure.worlds,
        edges,
        {p: structure.mask_worlds(m) for p, m in structure.valuation.items()},
    )


def reflexive_transitive_closure(structure: KripkeStructure) -> KripkeStructure:
    masks = list(structure.succ_masks)
    n = len(masks)
    for i in range(n):
        masks[i] |= 1 << i
    changed = True
    while changed:
        changed = False
        for i in range(n):
            ext = masks[i]
            m = masks[i]
            while m:
                low = m & -m
                ext |= masks[low.bit_length() - 1]
                m ^= low
            if ext != masks[i]:
                masks[i] = ext
                changed = True
    edges = []
    for i, w in enumerate(structure.worlds):
        for j, v in enumerate(structure.worlds):
            if masks[i] >> j & 1:
                edges.append((w, v))
    return KripkeStructure(
        structure.worlds,
        edges,
        {p: structure.mask_worlds(m) for p, m in structure.valuation.items()},
    )


def strict_rewrite_max(props: Iterable[str], i: int) -> Formula:
    """Diamond-free, strict-split variant of the offset-0-canonicity formula."""
    props = F.sorted_props(frozenset(props))
    body = F.And(
        F.MLNeg(F.box_n(i, F.Bot())),
        F.TeamNeg(
            F.strict_disj(
                [
                    F.ovee(
                        F.MLNeg(F.box_n(i, F.Prop(p))),
                        F.MLNeg(F.box_n(i, F.MLNeg(F.Prop(p)))),
                    )
                    for p in props
                ]
            )
        ),
    )
    return F.StrictOr(F.Top(), body)
