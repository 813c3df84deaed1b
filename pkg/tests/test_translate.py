import random

import pytest

from helpers import random_formula, random_structure, random_team
from modalteam import canonical as CN
from modalteam import encodings as E
from modalteam import formula as F
from modalteam import translate as TR
from modalteam.checker import ModelChecker, check
from modalteam.structure import KripkeStructure, Team


def test_translate_examples():
    p = F.Prop("p")
    assert TR.frame_layer_translate(p, 0) is F.And(F.Prop("l_0"), p)
    got = TR.frame_layer_translate(F.Dia(p), 1)
    assert got is F.And(F.Prop("l_0"), F.Dia(F.And(F.Prop("l_1"), p)))
    got = TR.frame_layer_translate(F.Box(p), 1)
    assert got is F.And(F.Prop("l_0"), F.Box(F.hook(F.Prop("l_1"), p)))


def test_translate_md_preserved_and_renaming():
    rng = random.Random(101)
    for _ in range(40):
        f = random_formula(rng, size=7)
        assert TR.frame_layer_translate(f, f.md).md == f.md
    # collision triggers renaming
    f = F.Dia(F.Prop("l_1"))
    out = TR.frame_layer_translate(f, 1)
    assert F.props_of(out) >= {"l_0", "l_1_", "l_1"}
    with pytest.raises(ValueError):
        TR.frame_layer_translate(F.Dia(F.Prop("p")), 0)


def test_restrict_edges_examples():
    K = KripkeStructure(["a", "b"], [], {"l_0": ["a"], "l_1": ["b"]})
    assert list(TR.restrict_edges_by_layers(K, ["l_0", "l_1"]).edges()) == []
    K2 = KripkeStructure(["a", "b"], [("a", "b")], {"l_0": ["a", "b"], "l_1": []})
    assert list(TR.restrict_edges_by_layers(K2, ["l_0", "l_1"]).edges()) == []
    K3 = KripkeStructure(["a", "b"], [("a", "b")], {"l_0": ["a"], "l_1": ["b"]})
    assert list(TR.restrict_edges_by_layers(K3, ["l_0", "l_1"]).edges()) == [("a", "b")]


def _random_layered(rng, k, max_worlds=6):
    """Random structure with a random layer labelling (not necessarily a forest)."""
    K = random_structure(rng, max_worlds=max_worlds, props=("p",))
    names = TR.layer_names(k)
    val = {p: K.mask_worlds(m) for p, m in K.valuation.items()}
    for name in names:
        val[name] = [w for w in K.worlds if rng.random() < 0.6]
    return KripkeStructure(K.worlds, list(K.edges()), val), names


def test_layer_claim_random():
    # (K, T) |= f^i  iff  (K-restricted, T) |= f, for T inside layer i
    rng = random.Random(103)
    checked = 0
    while checked < 60:
        k = rng.choice((1, 2))
        K, names = _random_layered(rng, k)
        i = rng.randrange(k + 1)
        f = random_formula(rng, props=("p",), max_depth=k - i, size=6)
        translated = TR.frame_layer_translate(f, k, layers=names)
        f_i = translated.args[1] if i == 0 else _shift(f, names, i, k)
        layer_i = K.team([w for w in K.worlds if K.prop_mask(names[i]) >> K.index(w) & 1])
        T = Team(K, layer_i.mask & random_team(rng, K).mask)
        restricted = TR.restrict_edges_by_layers(K, names)
        assert check(K, T, f_i) == check(restricted, Team(restricted, T.mask), f), (i, k)
        checked += 1


def _shift(f, names, i, k):
    # re-run the translation recursion starting at layer i
    def walk(g, j):
        if g.kind in (F.TOP, F.PROP):
            return g
        if g.kind == F.MLNEG:
            return F.MLNeg(walk(g.args[0], j))
        if g.kind == F.TEAMNEG:
            return F.TeamNeg(walk(g.args[0], j))
        if g.kind == F.AND:
            return F.And(walk(g.args[0], j), walk(g.args[1], j))
        if g.kind == F.LAXOR:
            return F.LaxOr(walk(g.args[0], j), walk(g.args[1], j))
        if g.kind == F.DIA:
            return F.Dia(F.And(F.Prop(names[j + 1]), walk(g.args[0], j + 1)))
        return F.Box(F.hook(F.Prop(names[j + 1]), walk(g.args[0], j + 1)))

    return walk(f, i)


def test_closure_restriction_recovers_forest():
    # label a forest by depth, close reflexively-transitively, restrict back
    rng = random.Random(107)
    for _ in range(30):
        res = CN.decide(random_formula(rng, props=("p",), max_depth=1, size=6))
        if not res.answer:
            continue
        W, T = res.witness
        k = 3
        names = TR.layer_names(k)
        val = {p: W.mask_worlds(m) for p, m in W.valuation.items()}
        mask = T.mask
        for name in names:
            val[name] = W.mask_worlds(mask)
            mask = W.image_mask(mask)
        labelled = KripkeStructure(W.worlds, list(W.edges()), val)
        closed = TR.reflexive_transitive_closure(labelled)
        back = TR.restrict_edges_by_layers(closed, names)
        assert sorted(back.edges()) == sorted(labelled.edges())


def test_sat_preservation_direction():
    # UNSAT certification over the layered prop set can exceed the search
    # budget; only SAT outcomes are asserted here
    from modalteam.errors import BudgetExceededError

    rng = random.Random(109)
    hits = 0
    while hits < 12:
        f = random_formula(rng, props=(), max_depth=1, size=5)
        translated = TR.frame_layer_translate(f, f.md)
        try:
            res = CN.decide(translated)
        except BudgetExceededError:
            continue
        hits += 1
        if res.answer:
            assert CN.decide(f).answer


def test_strict_rewrite_max():
    out = TR.strict_rewrite_max(["p"], 1)
    assert _no_dia(out)
    # i = 0 instance uses plain negations over props
    z = TR.strict_rewrite_max(["p"], 0)
    assert _no_dia(z) and z.kind == F.STROR
    # lax/strict agreement on random models
    rng = random.Random(113)
    for _ in range(60):
        K = random_structure(rng, max_worlds=5, props=("p",))
        T = random_team(rng, K)
        for i in (0, 1, 2):
            lax = check(K, T, E.gen_max(["p"], i))
            strict = check(K, T, TR.strict_rewrite_max(["p"], i), mode="strict")
            assert lax == strict, i


def _no_dia(f):
    return f.kind not in (F.DIA, F.STRDIA) and all(_no_dia(a) for a in f.args)
