import json
import random

import pytest

from helpers import random_structure, random_team, scoped_structure
from modalteam import formula as F
from modalteam.errors import ModelFormatError, WellFormednessError
from modalteam.structure import (
    KripkeStructure,
    Team,
    image,
    is_scope,
    model_from_json_dict,
    restrict,
    select,
    splits,
    successor_teams,
)


@pytest.fixture
def fork():
    return KripkeStructure(["w", "a", "b"], [("w", "a"), ("w", "b")], {"p": ["a"]})


def test_image_examples(fork):
    T = fork.team(["w"])
    assert image(fork, T, 0) == T
    assert set(image(fork, T, 1)) == {"a", "b"}
    assert len(image(fork, fork.team([]), 3)) == 0


def test_successor_teams_examples(fork):
    T = fork.team(["w"])
    lax = [set(s) for s in successor_teams(fork, T, "lax")]
    assert {frozenset(x) for x in lax} == {frozenset({"a"}), frozenset({"b"}), frozenset({"a", "b"})}
    strict = [set(s) for s in successor_teams(fork, T, "strict")]
    assert {frozenset(x) for x in strict} == {frozenset({"a"}), frozenset({"b"})}
    # dead-end world kills the stream
    dead = fork.team(["w", "a"])
    assert list(successor_teams(fork, dead, "lax")) == []
    assert list(successor_teams(fork, dead, "strict")) == []
    # empty team has the single successor team {}
    assert [t.mask for t in successor_teams(fork, fork.team([]), "lax")] == [0]


def test_splits_counts(fork):
    T = fork.team(["a", "b"])
    assert len(list(splits(T, "lax"))) == 9
    assert len(list(splits(T, "strict"))) == 4
    empty = fork.team([])
    assert list(splits(empty, "lax")) == [(empty, empty)]
    for s, u in splits(T, "lax"):
        assert (s | u) == T
    for s, u in splits(T, "strict"):
        assert (s | u) == T and not (s.mask & u.mask)


def test_strict_enumerations_are_subsets_of_lax(fork):
    T = fork.team(["w", "a"])
    T2 = fork.team(["w"])
    assert set(splits(T, "strict")) <= set(splits(T, "lax"))
    assert {s.mask for s in successor_teams(fork, T2, "strict")} <= {
        s.mask for s in successor_teams(fork, T2, "lax")
    }


def test_restrict_and_select(fork):
    T = fork.full_team()
    assert restrict(fork, T, F.Top()) == T
    assert set(restrict(fork, T, F.Prop("p"))) == {"a"}
    assert len(restrict(fork, T, F.Bot())) == 0
    S = fork.team(["a"])
    t_a = restrict(fork, T, F.Prop("p"))
    assert select(fork, T, F.Prop("p"), t_a) == T
    assert select(fork, T, F.Prop("p"), fork.team([])) == restrict(fork, T, F.MLNeg(F.Prop("p")))
    with pytest.raises(WellFormednessError):
        restrict(fork, T, F.TeamNeg(F.Prop("p")))


def test_is_scope(fork):
    assert not is_scope(fork, F.Prop("p"))  # edge w->a crosses the boundary
    edgeless = KripkeStructure(["x", "y"], [], {"p": ["x"]})
    assert is_scope(edgeless, F.Prop("p"))
    comp = KripkeStructure(["x", "y"], [("x", "x"), ("y", "y")], {"p": ["x"]})
    assert is_scope(comp, F.Prop("p"))


def test_scope_laws_random():
    rng = random.Random(11)
    a, b = F.Prop("a_1"), F.Prop("a_2")
    for _ in range(150):
        K = scoped_structure(rng)
        T, S, U = (random_team(rng, K) for _ in range(3))
        ra = lambda X: restrict(K, X, a)  # noqa: E731
        assert ra(T & S) == (ra(T) & S) == (T & ra(S)) == (ra(T) & ra(S))
        assert ra(T | S) == (ra(T) | ra(S))
        assert select(K, select(K, T, a, S), b, U) == select(K, select(K, T, b, U), a, S)
        assert ra(select(K, select(K, T, a, S), b, U)) == (ra(T) & S)
        assert ra(image(K, T, 1)) == image(K, ra(T), 1)
        sub = T & S  # some subteam of T
        assert image(K, select(K, T, a, sub), 1) == select(
            K, image(K, T, 1), a, image(K, sub, 1)
        )


def test_image_monotone():
    rng = random.Random(5)
    for _ in range(60):
        K = random_structure(rng)
        T = random_team(rng, K)
        S = Team(K, T.mask & random_team(rng, K).mask)
        assert image(K, S, 1) <= image(K, T, 1)


def test_model_json_validation():
    good = {"worlds": ["a"], "edges": [], "valuation": {"p": ["a"]}, "team": ["a"]}
    s, t = model_from_json_dict(good)
    assert list(t) == ["a"]
    with pytest.raises(ModelFormatError):
        model_from_json_dict({**good, "bogus": 1})
    with pytest.raises(ModelFormatError):
        model_from_json_dict({"worlds": ["a", "a"], "edges": []})
    with pytest.raises(ModelFormatError):
        model_from_json_dict({"worlds": ["a"], "edges": [["a", "zz"]]})
    with pytest.raises(ModelFormatError):
        model_from_json_dict({"worlds": ["a"], "edges": [], "valuation": {"p": ["zz"]}})


def test_json_roundtrip(fork):
    d = fork.to_json_dict(fork.team(["w"]))
    s2, t2 = model_from_json_dict(json.loads(json.dumps(d)))
    assert s2.worlds == fork.worlds
    assert list(t2) == ["w"]
    assert s2.to_json_dict(t2) == d
