"""Shared builders for the test suite: random structures and formulas,
staircases with marked worlds, and the micro machines used by the
reduction tests."""

import random

from modalteam import canonical as CN
from modalteam import formula as F
from modalteam import reduction as R
from modalteam import typesys as TY
from modalteam.structure import KripkeStructure


def random_structure(rng, max_worlds=8, props=("p", "q"), edge_p=0.3):
    n = rng.randint(1, max_worlds)
    worlds = [f"w{i}" for i in range(n)]
    edges = [(u, v) for u in worlds for v in worlds if rng.random() < edge_p]
    valuation = {p: [w for w in worlds if rng.random() < 0.5] for p in props}
    return KripkeStructure(worlds, edges, valuation)


def random_team(rng, structure, allow_empty=True):
    lo = 0 if allow_empty else 1
    names = [w for w in structure.worlds if rng.random() < 0.5]
    if len(names) < lo and structure.worlds:
        names = [rng.choice(structure.worlds)]
    return structure.team(names)


def scoped_structure(rng, scope_names=("a_1", "a_2"), max_worlds=8, props=("p",)):
    """Random structure in which the scope names label unions of connected
    components, so they are scopes and pairwise disjoint by construction."""
    s = random_structure(rng, max_worlds=max_worlds, props=props)
    # undirected components
    n = len(s.worlds)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for (u, v) in s.edges():
        a, b = find(s.index(u)), find(s.index(v))
        if a != b:
            parent[a] = b
    comps = {}
    for i, w in enumerate(s.worlds):
        comps.setdefault(find(i), []).append(w)
    valuation = {p: s.mask_worlds(m) for p, m in s.valuation.items()}
    for name in scope_names:
        valuation.setdefault(name, [])
    buckets = list(scope_names) + [None]
    for comp in comps.values():
        pick = rng.choice(buckets)
        if pick is not None:
            valuation[pick].extend(comp)
    return KripkeStructure(s.worlds, list(s.edges()), valuation)


def random_classical(rng, props=("p", "q"), max_depth=2, size=4):
    def go(depth, budget):
        if budget <= 1 or rng.random() < 0.3:
            r = rng.random()
            if r < 0.6 and props:
                return F.Prop(rng.choice(props))
            return F.Top() if r < 0.8 else F.Bot()
        op = rng.choice(["neg", "and", "or", "box", "dia"] if depth > 0 else ["neg", "and", "or"])
        if op == "neg":
            return F.MLNeg(go(depth, budget - 1))
        if op == "box":
            return F.Box(go(depth - 1, budget - 1))
        if op == "dia":
            return F.Dia(go(depth - 1, budget - 1))
        l = go(depth, budget // 2)
        r_ = go(depth, budget - budget // 2)
        return F.And(l, r_) if op == "and" else F.LaxOr(l, r_)

    return go(max_depth, size)


def random_formula(rng, props=("p",), max_depth=2, size=8, strict=False):
    """Random lax (or mixed) team formula within the given md and node budget."""

    def go(depth, budget):
        if budget <= 1 or rng.random() < 0.25:
            return random_classical(rng, props, max_depth=min(depth, 1), size=2)
        ops = ["tneg", "and", "or", "box", "classical"]
        if depth > 0:
            ops += ["dia"]
        if strict:
            ops += ["sor"] + (["sdia"] if depth > 0 else [])
        op = rng.choice(ops)
        if op == "classical":
            return random_classical(rng, props, max_depth=depth, size=min(4, budget))
        if op == "tneg":
            return F.TeamNeg(go(depth, budget - 1))
        if op == "box":
            return F.Box(go(depth - 1, budget - 1)) if depth > 0 else go(depth, budget - 1)
        if op == "dia":
            return F.Dia(go(depth - 1, budget - 1))
        if op == "sdia":
            return F.StrictDia(go(depth - 1, budget - 1))
        l = go(depth, budget // 2)
        r_ = go(depth, budget - budget // 2)
        if op == "and":
            return F.And(l, r_)
        if op == "sor":
            return F.StrictOr(l, r_)
        return F.LaxOr(l, r_)

    return go(max_depth, size)


def realize_type(t, prefix, label, worlds, edges, val):
    """Append a minimal tree realizing the type, all nodes labelled ``label``."""
    worlds.append(prefix)
    val.setdefault(label, []).append(prefix)
    for p in t.props:
        val.setdefault(p, []).append(prefix)
    for i, c in enumerate(t.children):
        child = f"{prefix}_{i}"
        realize_type(c, child, label, worlds, edges, val)
        edges.append((prefix, child))
    return prefix


def staircase_with_markers(props, k, marks, with_prime=False):
    """A built staircase plus one marker-labelled realization tree per mark.

    ``marks`` is a list of (scope_label, TypeId); returns (structure,
    team_names, marker_roots, staircase).
    """
    sc = CN.build_staircase(props, k, with_prime=with_prime)
    base = sc.structure.to_json_dict(sc.team)
    worlds = list(base["worlds"])
    edges = [tuple(e) for e in base["edges"]]
    val = {p: list(ws) for p, ws in base["valuation"].items()}
    team = list(base["team"])
    roots = []
    for i, (label, t) in enumerate(marks):
        root = realize_type(t, f"mk{i}", label, worlds, edges, val)
        team.append(root)
        roots.append(root)
    return KripkeStructure(worlds, edges, val), team, roots, sc


MICRO_MACHINE = R.ATMSpec(
    states=(("q0", "exists"), ("qa", "accept")),
    initial="q0",
    alphabet=("z", "b"),
    blank="b",
    delta=(("q0", "z", "qa", "z", "R"),),
    alternations=2,
    depth=1,
    phi_size=0,
)

MICRO_MACHINE_ALT = R.ATMSpec(
    states=(("q0", "exists"), ("q1", "forall"), ("qa", "accept"), ("qr", "reject")),
    initial="q0",
    alphabet=("z", "o", "b"),
    blank="b",
    delta=(
        ("q0", "z", "q1", "o", "R"),
        ("q0", "o", "q0", "z", "R"),
        ("q1", "o", "qa", "o", "L"),
        ("q1", "z", "qr", "z", "R"),
        ("q1", "b", "qa", "b", "L"),
    ),
    alternations=2,
    depth=1,
    phi_size=0,
)


def config_successors(machine, conf):
    """Successive-configuration oracle; halting configurations repeat."""
    heads = [i for i, c in enumerate(conf) if c[0] == "head"]
    assert len(heads) == 1
    h = heads[0]
    _, q, a = conf[h]
    if machine.kind(q) in ("accept", "reject"):
        yield conf
        return
    for (q1, a1, q2, a2, d) in machine.delta:
        if q1 == q and a1 == a:
            h2 = h + 1 if d == "R" else h - 1
            if 0 <= h2 < len(conf):
                row = list(conf)
                row[h] = ("sym", a2)
                row[h2] = ("head", q2, row[h2][1])
                yield tuple(row)


def harvest_windows(machine, width=5):
    """All 2x3 sub-blocks of legal configuration pairs at the given width."""
    import itertools

    tape = [("sym", a) for a in machine.alphabet]
    heads = [("head", q, a) for q, _ in machine.states for a in machine.alphabet]
    blocks = set()
    for h in range(width):
        for rest in itertools.product(tape, repeat=width - 1):
            for hd in heads:
                conf = rest[:h] + (hd,) + rest[h:]
                for succ in config_successors(machine, conf):
                    for j in range(width - 2):
                        blocks.add(conf[j : j + 3] + succ[j : j + 3])
    return blocks
