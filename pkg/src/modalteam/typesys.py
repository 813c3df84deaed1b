"""(Phi,k)-types as canonical interned values, plus the machinery around them:
enumeration and exact counting, point/team bisimulation, Hintikka formulas,
and the strict total orders on types and type sets.

A depth-k type is the pair (propositions true at the point, set of depth-(k-1)
types of its successors); depth-0 types carry only the propositions.  Types
are hash-consed, so equality is identity.
"""

from __future__ import annotations

import threading
from typing import Iterable, Optional

from . import formula as F
from .errors import BudgetExceededError
from .formula import Formula
from .structure import KripkeStructure, Team

DEFAULT_BUDGET = 10**6


def exp_tower(k: int, n: int) -> int:
    """Iterated exponential: exp_0(n) = n, exp_{k+1}(n) = 2^exp_k(n)."""
    for _ in range(k):
        n = 1 << n
    return n


def exp_star(k: int, n: int) -> int:
    """exp*_0(n) = n, exp*_{k+1}(n) = n * 2^exp*_k(n); exact big integer."""
    out = n
    for _ in range(k):
        out = n * (1 << out)
    return out


def count_types(props: Iterable[str], k: int) -> int:
    """|Delta_k| over the given proposition set: exp*_k(2^|props|)."""
    return exp_star(k, 1 << len(frozenset(props)))


class TypeId:
    """One interned (Phi,k)-type.

    ``children`` is the sorted (by the order on depth-(k-1) types) duplicate-
    free tuple of successor types; it is empty exactly when ``k == 0``.
    """

    __slots__ = ("k", "props", "children", "__weakref__")

    def __repr__(self):
        return f"TypeId({render_type(self)})"

    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return object.__hash__(self)


_intern: dict = {}
_intern_lock = threading.Lock()


def make_type(k: int, props: Iterable[str], children: Iterable["TypeId"] = ()) -> TypeId:
    """Intern-or-get the type with the given constituents."""
    return _make(k, frozenset(props), tuple(sorted(set(children), key=_sort_key)))


def _make(k: int, props: frozenset, kids: tuple) -> TypeId:
    # kids must be duplicate-free and ascending in the depth-(k-1) order
    for c in kids:
        if c.k != k - 1:
            raise ValueError(f"child depth {c.k} does not match parent depth {k}")
    if k == 0 and kids:
        raise ValueError("depth-0 types have no children")
    key = (k, props, kids)
    with _intern_lock:
        found = _intern.get(key)
        if found is None:
            found = object.__new__(TypeId)
            found.k = k
            found.props = props
            found.children = kids
            _intern[key] = found
        return found


def _props_lt(a: frozenset, b: frozenset) -> bool:
    # lexicographic subset order: compare name sequences from the largest
    # element downwards; running out first means smaller
    xs = sorted(a, key=F.prop_sort_key, reverse=True)
    ys = sorted(b, key=F.prop_sort_key, reverse=True)
    for x, y in zip(xs, ys):
        if x != y:
            return F.prop_lt(x, y)
    return len(xs) < len(ys)


def type_lt(a: TypeId, b: TypeId) -> bool:
    """The strict total order on same-depth types.

    Propositions compare first (lexicographic subset order over the global
    name order); ties recurse into the lexicographic order on child sets.
    """
    if a.k != b.k:
        raise ValueError(f"cannot compare types of depths {a.k} and {b.k}")
    if a is b:
        return False
    if a.props != b.props:
        return _props_lt(a.props, b.props)
    return _sorted_typeset_lt(a.children, b.children)


def typeset_lt(xs, ys) -> bool:
    """Lexicographic order on finite sets of same-depth types."""
    xs = tuple(sorted(set(xs), key=_sort_key))
    ys = tuple(sorted(set(ys), key=_sort_key))
    if xs and ys and xs[0].k != ys[0].k:
        raise ValueError("cannot compare type sets of different depths")
    return _sorted_typeset_lt(xs, ys)


def _sorted_typeset_lt(xs: tuple, ys: tuple) -> bool:
    # compare from the largest element downwards; running out first = smaller
    for x, y in zip(reversed(xs), reversed(ys)):
        if x is not y:
            return type_lt(x, y)
    return len(xs) < len(ys)


class _sort_key:
    """Wrapper making ``sorted`` usable with the recursive type order."""

    __slots__ = ("t",)

    def __init__(self, t):
        self.t = t

    def __lt__(self, other):
        return type_lt(self.t, other.t)


def type_of(structure: KripkeStructure, world: str, props: Iterable[str], k: int) -> TypeId:
    """The (Phi,k)-type of a pointed structure, computed by direct recursion."""
    props = frozenset(props)
    prop_masks = [(p, structure.prop_mask(p)) for p in sorted(props)]
    memo = {}

    def walk(i: int, depth: int) -> TypeId:
        key = (i, depth)
        hit = memo.get(key)
        if hit is not None:
            return hit
        bit = 1 << i
        here = frozenset(p for p, m in prop_masks if m & bit)
        if depth == 0:
            t = make_type(0, here)
        else:
            succ = structure.succ_masks[i]
            kids = {walk(j, depth - 1) for j in _bits(succ)}
            t = make_type(depth, here, kids)
        memo[key] = t
        return t

    return walk(structure.index(world), k)


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def types_of_team(structure: KripkeStructure, team: Team, props, k: int) -> frozenset:
    return frozenset(type_of(structure, w, props, k) for w in team)


def enumerate_types(props: Iterable[str], k: int, budget: int = DEFAULT_BUDGET):
    """All of Delta_k in ascending type order, built level by level.

    Refuses with :class:`BudgetExceededError` (carrying the exact count) when
    |Delta_k| would exceed ``budget``.
    """
    props = F.sorted_props(frozenset(props))
    required = count_types(props, k)
    if required > budget:
        raise BudgetExceededError(required, budget, what=f"Delta_{k} over {len(props)} props")
    # subset bitmasks over the ascending name order enumerate the prop sets
    # in exactly the lexicographic subset order
    prop_subsets = [
        frozenset(p for i, p in enumerate(props) if pm >> i & 1) for pm in range(1 << len(props))
    ]
    level = [_make(0, s, ()) for s in prop_subsets]
    for depth in range(1, k + 1):
        # the level list is ascending, so subset bitmasks enumerate child sets
        # both presorted and in ascending set order
        nxt = []
        for pm_set in prop_subsets:
            for sv in range(1 << len(level)):
                kids = tuple(level[i] for i in range(len(level)) if sv >> i & 1)
                nxt.append(_make(depth, pm_set, kids))
        level = nxt
    return level


def bisimilar(
    s1: KripkeStructure,
    x1,
    s2: KripkeStructure,
    x2,
    props,
    k: int,
    level: str = "point",
) -> bool:
    """Literal recursive (Phi,k)-bisimulation, independent of the type machinery.

    ``level='point'`` takes world names, ``level='team'`` takes teams.
    """
    props = frozenset(props)
    pm1 = {p: s1.prop_mask(p) for p in props}
    pm2 = {p: s2.prop_mask(p) for p in props}
    memo = {}

    def point(i1, i2, depth):
        key = (i1, i2, depth)
        hit = memo.get(key)
        if hit is not None:
            return hit
        ok = all((pm1[p] >> i1 & 1) == (pm2[p] >> i2 & 1) for p in props)
        if ok and depth > 0:
            succ1 = list(_bits(s1.succ_masks[i1]))
            succ2 = list(_bits(s2.succ_masks[i2]))
            ok = all(any(point(v1, v2, depth - 1) for v2 in succ2) for v1 in succ1) and all(
                any(point(v1, v2, depth - 1) for v1 in succ1) for v2 in succ2
            )
        memo[key] = ok
        return ok

    if level == "point":
        return point(s1.index(x1), s2.index(x2), k)
    if level == "team":
        t1 = list(_bits(x1.mask))
        t2 = list(_bits(x2.mask))
        return all(any(point(w1, w2, k) for w2 in t2) for w1 in t1) and all(
            any(point(w1, w2, k) for w1 in t1) for w2 in t2
        )
    raise ValueError(f"level must be 'point' or 'team', got {level!r}")


def hintikka(t: TypeId, props) -> Formula:
    """Classical formula satisfied exactly by the points of type ``t``.

    Built as the literal description of the propositions plus, for positive
    depth, one diamond per child type and a box over their disjunction (the
    empty disjunction being ``bot``).  Modal depth is at most ``t.k``; it is
    exactly ``t.k`` whenever the type has a full-depth successor chain.
    """
    props = F.sorted_props(frozenset(props))
    parts = []
    for p in props:
        parts.append(F.Prop(p) if p in t.props else F.MLNeg(F.Prop(p)))
    if t.k > 0:
        kid_formulas = [hintikka(c, props) for c in t.children]
        parts.extend(F.Dia(z) for z in kid_formulas)
        parts.append(F.Box(F.lax_disj(kid_formulas)))
    return F.conj(parts)


def render_type(t: TypeId) -> str:
    """Textual rendering: depth 0 as ``{p,q}``, else ``({p},[child,...])``."""
    props = "{" + ",".join(F.sorted_props(t.props)) + "}"
    if t.k == 0:
        return props
    return "(" + props + ",[" + ",".join(render_type(c) for c in t.children) + "])"


def rank_of_typeset(types, all_types) -> int:
    """1-based rank of a set of types within the lexicographic order on the
    power set of ``all_types`` (which must be ascending)."""
    index = {t: i for i, t in enumerate(all_types)}
    return 1 + sum(1 << index[t] for t in set(types))
