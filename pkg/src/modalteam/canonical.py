"""Canonical-model construction, staircases, and the SAT/VAL decision procedure.

The canonical model for (Phi, k) is built layer by layer: layer 0 holds one
world per proposition subset, and layer i one world per (proposition subset,
subset of layer i-1) with exactly that image.  Layer i then realizes every
(Phi, i)-type exactly once, so a formula of modal depth k is satisfiable iff
some subteam of layer k satisfies it.

Satisfiability search enumerates subteams of the top layer in deterministic
size-ascending order.  Two sound reductions keep this tractable at desk
scale: top-level conjuncts of the form ``[]^m bot`` with m exceeding the
modal depth of the rest are dropped (a depth-k satisfiable formula always
has a model of height at most k), and candidate teams are restricted to the
top layer (teams with equal type sets satisfy the same formulas of fitting
modal depth).  Both the type budget and the search budget report exact
requirements when exceeded.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from . import formula as F
from . import typesys as TY
from .checker import ModelChecker
from .errors import BudgetExceededError, WellFormednessError
from .formula import Formula
from .structure import KripkeStructure, Team, image, is_scope

DEFAULT_SEARCH_LIMIT = 1 << 18


def build_canonical_model(props, k: int, budget: int = TY.DEFAULT_BUDGET):
    """Return ``(structure, layers)``; ``layers[i]`` lists the layer-i world names."""
    props = F.sorted_props(frozenset(props))
    total = sum(TY.count_types(props, i) for i in range(k + 1))
    if total > budget:
        raise BudgetExceededError(total, budget, what=f"canonical model for ({len(props)} props, k={k})")
    layers = []
    worlds = []
    edges = []
    valuation = {p: [] for p in props}
    prev = []
    for depth in range(k + 1):
        layer = []
        n_prev = len(prev)
        for pm in range(1 << len(props)):
            for sv in range(1 << n_prev) if depth else (0,):
                name = f"L{depth}_{pm * (1 << n_prev) + sv}" if depth else f"L0_{pm}"
                layer.append(name)
                worlds.append(name)
                for i, p in enumerate(props):
                    if pm >> i & 1:
                        valuation[p].append(name)
                for i in range(n_prev):
                    if sv >> i & 1:
                        edges.append((name, prev[i]))
        layers.append(layer)
        prev = layer
    return KripkeStructure(worlds, edges, valuation), layers


@dataclass
class Staircase:
    """A k-staircase: stair i (scope ``stairs[i]``) is i-canonical with offset k-i."""

    structure: KripkeStructure
    team: Team
    stairs: tuple
    k: int
    props: tuple
    prime: Optional[str] = None

    def stair_team(self, name: str) -> Team:
        return Team(self.structure, self.team.mask & self.structure.prop_mask(name))

    def validate(self) -> list:
        """All violated invariants, as human-readable strings; empty when valid."""
        problems = []
        s = self.structure
        labels = list(self.stairs) + ([self.prime] if self.prime else [])
        for name in labels:
            if not is_scope(s, F.Prop(name)):
                problems.append(f"{name} is not a scope")
        for a, b in itertools.combinations(labels, 2):
            if s.prop_mask(a) & s.prop_mask(b):
                problems.append(f"stairs {a} and {b} are not disjoint")
        for i, name in enumerate(self.stairs):
            problems.extend(self._check_offset_canonical(name, i, self.k - i))
        if self.prime:
            problems.extend(self._check_offset_canonical(self.prime, self.k, 0))
        problems.extend(self._check_forest())
        return problems

    def _check_offset_canonical(self, stair: str, depth: int, offset: int) -> list:
        s = self.structure
        want = set(TY.enumerate_types(self.props, depth))
        got = set()
        for w in self.stair_team(stair):
            reach = image(s, s.team([w]), offset)
            ts = TY.types_of_team(s, reach, self.props, depth)
            if len(ts) == 1:
                got.add(next(iter(ts)))
        if got != want:
            return [
                f"stair {stair}: realizes {len(got)}/{len(want)} depth-{depth} types at offset {offset}"
            ]
        return []

    def _check_forest(self) -> list:
        s = self.structure
        problems = []
        preds = [0] * len(s.worlds)
        for i in range(len(s.worlds)):
            for j in TY._bits(s.succ_masks[i]):
                preds[j] += 1
        roots = s.world_mask(w for i, w in enumerate(s.worlds) if preds[i] == 0)
        if any(c > 1 for c in preds):
            problems.append("a world has more than one predecessor")
        if roots != self.team.mask:
            problems.append("roots differ from the team")
        # height bound doubles as the acyclicity check
        mask = self.team.mask
        for _ in range(self.k + 1):
            mask = s.image_mask(mask)
        if mask:
            problems.append(f"height exceeds {self.k}")
        return problems


def stair_names(k: int) -> list:
    return [f"s_{i}" for i in range(k + 1)]


def prime_stair_name(k: int) -> str:
    return f"s_{k}p"


def build_staircase(props, k: int, with_prime: bool = False, budget: int = TY.DEFAULT_BUDGET) -> Staircase:
    """A finite k-staircase: per stair i one root per (Phi,i)-type, each root
    reaching a minimal realization tree of its type after k-i chain steps."""
    props = tuple(F.sorted_props(frozenset(props)))
    names = stair_names(k)
    worlds, edges = [], []
    valuation = {p: [] for p in props}
    for name in names + ([prime_stair_name(k)] if with_prime else []):
        valuation[name] = []
    team = []

    def emit(name, label, type_props):
        worlds.append(name)
        valuation[label].append(name)
        for p in type_props:
            valuation[p].append(name)

    def realize(t: TY.TypeId, name: str, label: str):
        emit(name, label, t.props)
        for idx, c in enumerate(t.children):
            child = f"{name}_{idx}"
            realize(c, child, label)
            edges.append((name, child))

    def build_stair(label: str, depth: int, offset: int):
        for j, t in enumerate(TY.enumerate_types(props, depth, budget)):
            root = f"{label}_t{j}"
            team.append(root)
            prev = None
            for step in range(offset):
                cname = root if step == 0 else f"{root}_c{step}"
                emit(cname, label, ())
                if prev is not None:
                    edges.append((prev, cname))
                prev = cname
            leaf = f"{root}_r" if offset else root
            realize(t, leaf, label)
            if prev is not None:
                edges.append((prev, leaf))

    for i, name in enumerate(names):
        build_stair(name, i, k - i)
    if with_prime:
        build_stair(prime_stair_name(k), k, 0)
    structure = KripkeStructure(worlds, edges, valuation)
    return Staircase(
        structure=structure,
        team=structure.team(team),
        stairs=tuple(names),
        k=k,
        props=props,
        prime=prime_stair_name(k) if with_prime else None,
    )


@dataclass
class DecisionResult:
    answer: bool
    mode: str
    props: tuple
    depth: int
    canonical_team: Optional[list] = None
    witness: Optional[tuple] = None  # (KripkeStructure, Team), forest-shaped
    candidates_checked: int = 0

    def __bool__(self):
        return self.answer


def _flatten_and(f: Formula) -> list:
    if f.kind == F.AND:
        return _flatten_and(f.args[0]) + _flatten_and(f.args[1])
    return [f]


def _box_bot_height(f: Formula) -> Optional[int]:
    n = 0
    while f.kind == F.BOX:
        n += 1
        f = f.args[0]
    if n and f.kind == F.MLNEG and f.args[0].kind == F.TOP:
        return n
    return None


def _normalize(f: Formula) -> Formula:
    """Drop double team negations and redundant []^m bot conjuncts.

    A conjunct ``[]^m bot`` whose m exceeds the modal depth of the remaining
    conjuncts does not change satisfiability: a depth-d satisfiable formula
    has a forest model of height at most d, on which the conjunct holds.
    """
    while True:
        while f.kind == F.TEAMNEG and f.args[0].kind == F.TEAMNEG:
            f = f.args[0].args[0]
        if f.kind != F.AND:
            return f
        parts = _flatten_and(f)
        bots = [(p, _box_bot_height(p)) for p in parts]
        rest = [p for p, h in bots if h is None]
        rest_md = max((p.md for p in rest), default=0)
        keep = [p for p, h in bots if h is None or h <= rest_md]
        if len(keep) == len(parts):
            return f
        f = F.conj(keep) if keep else F.Top()


def unravel_forest(structure: KripkeStructure, team: Team, depth: int):
    """Unfold the depth-bounded reachable part into a directed forest.

    Every copied world keeps the valuation of its original; roots are exactly
    the copies of the team, so the result is team-bisimilar to the input at
    every rank up to ``depth``.
    """
    worlds, edges = [], []
    valuation = {}
    roots = []
    counter = itertools.count()

    def copy(i: int, remaining: int) -> str:
        name = f"w{next(counter)}"
        worlds.append(name)
        for p, mask in structure.valuation.items():
            if mask >> i & 1:
                valuation.setdefault(p, []).append(name)
        if remaining > 0:
            for j in TY._bits(structure.succ_masks[i]):
                child = copy(j, remaining - 1)
                edges.append((name, child))
        return name

    for w in team:
        roots.append(copy(structure.index(w), depth))
    out = KripkeStructure(worlds, edges, valuation)
    return out, out.team(roots)


def decide(
    f: Formula,
    mode: str = "sat",
    budget: int = TY.DEFAULT_BUDGET,
    search_limit: int = DEFAULT_SEARCH_LIMIT,
    peel: bool = True,
) -> DecisionResult:
    """Decide satisfiability or validity over all structures with teams.

    Satisfiability checks ``top | f`` on the canonical model, implemented as
    a direct search over subteams of the top layer; validity of ``f`` is the
    unsatisfiability of ``~f``.  On SAT, a forest-shaped witness model of
    height at most md(f) is attached.
    """
    if mode not in ("sat", "val"):
        raise ValueError(f"mode must be 'sat' or 'val', got {mode!r}")
    from .checker import _strict_free

    if not _strict_free(f):
        raise WellFormednessError(
            "decide handles lax formulas only; the canonical-model bound does not apply to strict semantics"
        )
    target = f if mode == "sat" else F.TeamNeg(f)
    target = _normalize(target) if peel else target
    props = tuple(F.sorted_props(F.props_of(target)))
    k = target.md
    n_types = TY.count_types(props, k)
    if n_types > budget:
        raise BudgetExceededError(n_types, budget, what=f"canonical model for ({len(props)} props, k={k})")
    structure, layers = build_canonical_model(props, k, budget)
    top = layers[-1]
    checker = ModelChecker(structure)
    checked = 0
    found = None
    for size in range(len(top) + 1):
        stop = False
        for combo in itertools.combinations(range(len(top)), size):
            checked += 1
            if checked > search_limit:
                raise BudgetExceededError(
                    1 << len(top), search_limit, what="canonical subteam search"
                )
            mask = 0
            for i in combo:
                mask |= structure.bit(top[i])
            if checker.check(Team(structure, mask), target):
                found = mask
                stop = True
                break
        if stop:
            break
    if mode == "sat":
        answer = found is not None
    else:
        answer = found is None
    result = DecisionResult(
        answer=answer,
        mode=mode,
        props=props,
        depth=k,
        candidates_checked=checked,
    )
    if found is not None:
        team = Team(structure, found)
        result.canonical_team = structure.mask_worlds(found)
        result.witness = unravel_forest(structure, team, k)
    return result
