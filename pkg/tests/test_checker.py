import random

import pytest

from helpers import random_classical, random_formula, random_structure, random_team, scoped_structure
from modalteam import formula as F
from modalteam import typesys as TY
from modalteam.checker import ModelChecker, check, check_point
from modalteam.errors import WellFormednessError
from modalteam.structure import KripkeStructure, Team, image, restrict, select


@pytest.fixture
def fork():
    return KripkeStructure(["w", "a", "b"], [("w", "a"), ("w", "b")], {"p": ["a"], "q": ["b"]})


def test_check_point_examples(fork):
    assert check_point(fork, "w", F.parse("top"))
    assert check_point(fork, "a", F.parse("[]bot"))
    assert not check_point(fork, "a", F.parse("<>top"))
    with pytest.raises(WellFormednessError):
        check_point(fork, "w", F.parse("~p"))


def test_empty_team_cases(fork):
    empty = fork.team([])
    assert check(fork, empty, F.parse("bot"))
    assert not check(fork, empty, F.parse("E top"))
    assert check(fork, fork.team(["w"]), F.parse("E top"))


def test_dep_team_example():
    K = KripkeStructure(["x", "y"], [], {"p": ["x"]})
    assert not check(K, K.full_team(), F.parse("dep(p)"))
    assert check(K, K.team(["x"]), F.parse("dep(p)"))


def test_mode_gate(fork):
    f = F.parse("p |s q")
    with pytest.raises(WellFormednessError):
        check(fork, fork.full_team(), f, mode="lax")
    assert isinstance(check(fork, fork.team(["a"]), f, mode="strict"), bool)
    # mixed formulas evaluate connective-wise in strict mode
    mixed = F.parse("(p | q) & (p |s q)")
    assert check(fork, fork.team(["a", "b"]), mixed, mode="strict")


def test_flatness_random():
    rng = random.Random(23)
    for _ in range(120):
        K = random_structure(rng)
        T = random_team(rng, K)
        alpha = random_classical(rng)
        mc = ModelChecker(K)
        team_val = mc.check(T, alpha)
        point_val = all(mc.check_point(w, alpha) for w in T)
        singleton_val = all(mc.check(K.team([w]), alpha) for w in T)
        assert team_val == point_val == singleton_val


def test_downward_closure_classical():
    rng = random.Random(29)
    for _ in range(80):
        K = random_structure(rng)
        T = random_team(rng, K)
        S = Team(K, T.mask & random_team(rng, K).mask)
        alpha = random_classical(rng)
        if check(K, T, alpha):
            assert check(K, S, alpha)


def test_strict_implies_lax():
    rng = random.Random(31)
    mc_cache = {}
    for _ in range(60):
        K = random_structure(rng, max_worlds=5)
        T = random_team(rng, K)
        phi = random_formula(rng, size=5)
        psi = random_formula(rng, size=5)
        mc = ModelChecker(K)
        if mc.check(T, F.StrictOr(phi, psi), mode="strict"):
            assert mc.check(T, F.LaxOr(phi, psi))
        if phi.md == 0 and mc.check(T, F.StrictDia(F.Dia(phi)), mode="strict"):
            assert mc.check(T, F.Dia(F.Dia(phi)))


def test_strict_lax_agree_on_downward_closed():
    # classical left disjunct / diamond argument
    rng = random.Random(37)
    for _ in range(100):
        K = random_structure(rng, max_worlds=5)
        T = random_team(rng, K)
        alpha = random_classical(rng)
        psi = random_formula(rng, size=6)
        mc = ModelChecker(K)
        assert mc.check(T, F.LaxOr(alpha, psi)) == mc.check(T, F.StrictOr(alpha, psi), mode="strict")
        assert mc.check(T, F.Dia(alpha)) == mc.check(T, F.StrictDia(alpha), mode="strict")


def test_hook_shortcut_matches_expansion():
    rng = random.Random(41)
    for _ in range(60):
        K = random_structure(rng, max_worlds=5)
        T = random_team(rng, K)
        alpha = random_classical(rng, max_depth=1, size=3)
        psi = random_formula(rng, size=5)
        hooked = F.hook(alpha, psi)
        mc = ModelChecker(K, debug=True)  # debug re-checks via raw covers
        assert mc.check(T, hooked) == mc.check(restrict(K, T, alpha), psi)


def test_optimized_equals_reference_random():
    rng = random.Random(43)
    for _ in range(120):
        K = random_structure(rng, max_worlds=4)
        T = random_team(rng, K)
        f = random_formula(rng, size=7, strict=True)
        assert check(K, T, f, mode="strict") == check(K, T, f, mode="strict", debug=True)


def test_bisimulation_invariance():
    rng = random.Random(47)
    for _ in range(50):
        K = random_structure(rng, max_worlds=5, props=("p",))
        T = random_team(rng, K)
        k = 2
        f = random_formula(rng, props=("p",), max_depth=k, size=7)
        # rebuild a bisimilar team from minimal realizations of its types
        worlds, edges, val = [], [], {}
        roots = []
        for i, t in enumerate(sorted(TY.types_of_team(K, T, ["p"], k), key=TY._sort_key)):
            from helpers import realize_type

            roots.append(realize_type(t, f"c{i}", "copy", worlds, edges, val))
        val.pop("copy", None)
        K2 = KripkeStructure(worlds, edges, {"p": val.get("p", [])})
        T2 = K2.team(roots)
        assert check(K, T, f) == check(K2, T2, f)


def test_substitution_lemma():
    rng = random.Random(53)
    done = 0
    while done < 60:
        K = random_structure(rng, max_worlds=6)
        alpha = random_classical(rng, max_depth=1, size=3)
        beta = random_classical(rng, max_depth=1, size=3)
        if alpha is beta:
            continue
        phi = random_formula(rng, size=6)
        # splice alpha into phi so the substitution actually does something
        phi = F.And(phi, F.LaxOr(alpha, F.TeamNeg(alpha)))
        k = phi.md
        T = random_team(rng, K)
        mc = ModelChecker(K)
        iff = F.ml_iff(alpha, beta)
        if not all(mc.check(image(K, T, i), iff) for i in range(k + 1)):
            continue
        assert mc.check(T, phi) == mc.check(T, F.sub(phi, alpha, beta))
        done += 1


def test_memo_is_stable_across_calls(fork):
    mc = ModelChecker(fork)
    f = F.parse("E p | E q")
    T = fork.full_team()
    assert mc.check(T, f) == mc.check(T, f)
    mc.clear_cache()
    assert mc.check(T, f)
