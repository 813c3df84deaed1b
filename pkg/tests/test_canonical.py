import random

import pytest

from helpers import random_formula, random_structure, random_team
from modalteam import canonical as CN
from modalteam import encodings as E
from modalteam import formula as F
from modalteam import typesys as TY
from modalteam.checker import ModelChecker, check
from modalteam.errors import BudgetExceededError, WellFormednessError
from modalteam.structure import KripkeStructure, Team


def test_build_canonical_model_examples():
    K, layers = CN.build_canonical_model([], 1)
    assert len(K) == 3 and len(layers[1]) == 2
    K3, layers3 = CN.build_canonical_model([], 3)
    assert len(layers3[3]) == 16
    Kp, layersp = CN.build_canonical_model(["p"], 0)
    assert len(layersp[0]) == 2


def test_layers_are_canonical():
    K, layers = CN.build_canonical_model(["p"], 2, budget=10**4)
    for i, layer in enumerate(layers):
        got = TY.types_of_team(K, K.team(layer), ["p"], i)
        assert got == frozenset(TY.enumerate_types(["p"], i))


def test_canonical_budget():
    with pytest.raises(BudgetExceededError):
        CN.build_canonical_model(["p", "q"], 2, budget=1000)


def test_world_naming_is_stable():
    K, layers = CN.build_canonical_model([], 1)
    assert layers[0] == ["L0_0"] and layers[1] == ["L1_0", "L1_1"]


def test_staircase_examples():
    sc = CN.build_staircase([], 3)
    assert [len(sc.stair_team(s)) for s in sc.stairs] == [1, 2, 4, 16]
    assert sc.validate() == []
    sc1 = CN.build_staircase([], 1, with_prime=True)
    assert sc1.validate() == []
    assert sc1.prime == "s_1p"
    scp = CN.build_staircase(["p"], 1)
    assert scp.validate() == []
    assert [len(scp.stair_team(s)) for s in scp.stairs] == [2, 8]


def test_staircase_validator_catches_damage():
    sc = CN.build_staircase([], 1)
    base = sc.structure.to_json_dict(sc.team)
    # relabel one stair world with the other stair: breaks disjointness
    val = {p: list(ws) for p, ws in base["valuation"].items()}
    val["s_0"].append(val["s_1"][0])
    K2 = KripkeStructure(base["worlds"], base["edges"], val)
    bad = CN.Staircase(K2, K2.team(base["team"]), sc.stairs, sc.k, sc.props)
    assert bad.validate() != []


def test_decide_examples():
    assert not CN.decide(F.parse("~top")).answer
    r = CN.decide(F.parse("p & !p"))
    assert r.answer and r.canonical_team == []
    # bounded-canon instance (k = 1)
    f = F.And(
        F.And(E.gen_canon([], 1), E.gen_scopes(1, ["s_0", "s_1"])),
        F.box_n(2, F.Bot()),
    )
    res = CN.decide(f)
    assert res.answer
    W, T = res.witness
    sc = CN.Staircase(W, T, ("s_0", "s_1"), 1, ())
    assert sc.validate() == []


def test_decide_rejects_strict():
    with pytest.raises(WellFormednessError):
        CN.decide(F.parse("p |s q"))


def test_decide_duality_and_soundness_random():
    rng = random.Random(71)
    done = 0
    while done < 40:
        f = random_formula(rng, props=("p",), max_depth=1, size=8)
        sat = CN.decide(f, "sat")
        assert sat.answer == (not CN.decide(F.TeamNeg(f), "val").answer)
        K = random_structure(rng, max_worlds=4, props=("p",))
        T = random_team(rng, K)
        if check(K, T, f):
            assert sat.answer
        done += 1


def test_decide_matches_top_or_check_small():
    # the spec's formulation: check(K, W, top | f) on the canonical model
    rng = random.Random(73)
    for _ in range(25):
        f = random_formula(rng, props=(), max_depth=1, size=6)
        K, _ = CN.build_canonical_model([], f.md)
        direct = check(K, K.full_team(), F.LaxOr(F.Top(), f))
        assert CN.decide(f).answer == direct


def test_decide_peel_matches_unpeeled_small():
    rng = random.Random(79)
    for _ in range(25):
        f = random_formula(rng, props=(), max_depth=1, size=6)
        g = F.And(f, F.box_n(f.md + 1, F.Bot()))
        assert CN.decide(g, peel=True).answer == CN.decide(g, peel=False).answer


def test_model_restrict_height_equality():
    rng = random.Random(83)
    for _ in range(30):
        f = random_formula(rng, props=("p",), max_depth=1, size=7)
        g = F.And(f, F.box_n(f.md + 1, F.Bot()))
        assert CN.decide(f).answer == CN.decide(g).answer


def test_witness_is_forest_of_bounded_height():
    rng = random.Random(89)
    found = 0
    while found < 25:
        f = random_formula(rng, props=("p",), max_depth=1, size=7)
        res = CN.decide(f)
        if not res.answer:
            continue
        W, T = res.witness
        found += 1
        preds = [0] * len(W.worlds)
        for u, v in W.edges():
            preds[W.index(v)] += 1
        assert all(c <= 1 for c in preds)
        roots = [w for i, w in enumerate(W.worlds) if preds[i] == 0]
        assert set(roots) == set(T)
        mask = T.mask
        for _ in range(f.md + 1):
            mask = W.image_mask(mask)
        assert mask == 0
        assert check(W, T, f)


def test_search_limit_reports():
    with pytest.raises(BudgetExceededError) as e:
        CN.decide(F.parse("~top"), search_limit=1)
    assert e.value.what == "canonical subteam search"
