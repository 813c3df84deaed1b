"""Generators for the team-logic formula families.

All generators are pure and deterministic: equal inputs yield structurally
identical (hence, by interning, identical) formulas.  Scope parameters are
atomic propositions from the reserved namespace (prefixes ``s_``, ``g_``,
``a_``); internally the combined scope ``a | b`` of two scopes is used where
the construction calls for it.

The bisimulation family ``chi`` and the order family ``zeta`` are built by
mutual recursion with exactly one embedded copy of the next-lower level, so
their size stays polynomial in the depth and the proposition count.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

from . import formula as F
from .formula import Formula

QUANTIFIER_KINDS = ("exists_sub", "forall_sub", "exists_pt", "forall_pt")


def _scope(x) -> Formula:
    return F.Prop(x) if isinstance(x, str) else x


def exists_sub(alpha, body: Formula) -> Formula:
    """Subteam quantifier: some subteam of the scope part makes the body true."""
    return F.LaxOr(_scope(alpha), body)


def forall_sub(alpha, body: Formula) -> Formula:
    return F.TeamNeg(exists_sub(alpha, F.TeamNeg(body)))


def exists_pt(alpha, body: Formula) -> Formula:
    """Point quantifier: some single world of the scope part makes the body true."""
    a = _scope(alpha)
    e = F.exists_world(a)
    return exists_sub(a, F.And(e, forall_sub(a, F.material_impl(e, body))))


def forall_pt(alpha, body: Formula) -> Formula:
    return F.TeamNeg(exists_pt(alpha, F.TeamNeg(body)))


def gen_quantifier(kind: str, alpha, body: Formula) -> Formula:
    builders = {
        "exists_sub": exists_sub,
        "forall_sub": forall_sub,
        "exists_pt": exists_pt,
        "forall_pt": forall_pt,
    }
    if kind not in builders:
        raise ValueError(f"unknown quantifier kind {kind!r}; choose from {QUANTIFIER_KINDS}")
    return builders[kind](alpha, body)


def gen_max(props: Iterable[str], i: int) -> Formula:
    """True exactly on teams that are 0-canonical with offset i: some subteam
    realizes every propositional assignment in its i-step images, one
    assignment per world."""
    props = F.sorted_props(frozenset(props))
    body = F.And(
        F.dia_n(i, F.Top()),
        F.TeamNeg(
            F.lax_disj(
                [F.ovee(F.dia_n(i, F.Prop(p)), F.dia_n(i, F.MLNeg(F.Prop(p)))) for p in props]
            )
        ),
    )
    return F.LaxOr(F.Top(), body)


def gen_chi(props: Iterable[str], k: int, alpha, beta, starred: bool = False) -> Formula:
    """Scope-relative bisimilarity test.

    ``chi_k(a, b)`` on a team whose a- and b-parts are single marked points
    holds iff the points are (Phi,k)-bisimilar; the starred variant compares
    the whole a- and b-parts as teams.
    """
    a, b = _scope(alpha), _scope(beta)
    if a is b:
        raise ValueError("chi needs two distinct scopes")
    props = F.sorted_props(frozenset(props))

    chi0 = F.hook(F.LaxOr(a, b), F.conj([F.dep([F.Prop(p)]) for p in props]))

    def chi(depth):
        if depth == 0:
            return chi0
        return F.And(chi0, F.Box(chi_star(depth - 1)))

    def chi_star(depth):
        pair = exists_pt(a, exists_pt(b, chi(depth)))
        e_both = F.And(F.exists_world(a), F.exists_world(b))
        inner = F.LaxOr(F.ovee(a, b), F.And(e_both, F.TeamNeg(pair)))
        return F.ovee(
            F.And(F.MLNeg(a), F.MLNeg(b)),
            F.And(e_both, F.TeamNeg(inner)),
        )

    return chi_star(k) if starred else chi(k)


def gen_zeta(
    props: Iterable[str],
    k: int,
    alpha,
    beta,
    stairs: Sequence[str],
    starred: bool = False,
) -> Formula:
    """Scope-relative type-order test; meaningful on k-staircase models.

    ``zeta_k(a, b)`` on marked points w, v holds iff the type of w strictly
    precedes the type of v; the starred variant compares the type sets of
    the a- and b-parts lexicographically.  ``stairs`` are the staircase
    scopes; level j of the recursion pivots on ``stairs[j]``.
    """
    a, b = _scope(alpha), _scope(beta)
    if len(stairs) < (k + 1 if starred else k):
        raise ValueError(f"zeta at depth {k} needs stairs s_0..s_{k if starred else k - 1}")
    props = F.sorted_props(frozenset(props))

    def zeta0(x, y):
        parts = []
        for p in props:
            smaller = [q for q in props if F.prop_lt(q, p)]
            parts.append(
                F.conj(
                    [F.hook(x, F.MLNeg(F.Prop(p))), F.hook(y, F.Prop(p))]
                    + [F.hook(F.LaxOr(x, y), F.dep([F.Prop(q)])) for q in smaller]
                )
            )
        return F.lax_disj(parts)

    def zeta(depth, x, y):
        if depth == 0:
            return zeta0(x, y)
        chi0 = gen_chi(props, 0, x, y)
        return F.ovee(zeta0(x, y), F.And(chi0, F.Box(zeta_star(depth - 1, x, y))))

    def zeta_star(depth, x, y):
        pivot = F.Prop(stairs[depth])
        xy = F.LaxOr(x, y)
        agree_above = F.LaxOr(
            F.And(gen_chi(props, depth, x, y, starred=True), xy),
            forall_pt(xy, F.TeamNeg(zeta(depth, pivot, xy))),
        )
        return exists_pt(
            pivot,
            F.And(
                exists_pt(y, gen_chi(props, depth, pivot, y)),
                F.And(F.TeamNeg(exists_pt(x, gen_chi(props, depth, pivot, x))), agree_above),
            ),
        )

    return zeta_star(k, a, b) if starred else zeta(k, a, b)


def gen_rho(props: Iterable[str], depth: int, offset: int, stairs_pair) -> Formula:
    """Depth-canonicity with an offset, relative to one or two stair scopes.

    ``gen_rho(props, 0, i, beta)`` states that the beta part is 0-canonical
    with offset i; ``gen_rho(props, k+1, i, (alpha, beta))`` lifts canonicity
    from the alpha stair to the beta stair.
    """
    if depth == 0:
        beta = _scope(stairs_pair if not isinstance(stairs_pair, tuple) else stairs_pair[-1])
        return F.hook(beta, gen_max(props, offset))
    alpha, beta = (_scope(x) for x in stairs_pair)
    chi_star = gen_chi(props, depth - 1, alpha, beta, starred=True)
    body = F.And(
        gen_rho(props, 0, offset, beta),
        F.box_n(offset, forall_pt(beta, F.Box(chi_star))),
    )
    return forall_sub(alpha, exists_sub(beta, body))


def gen_canon(props: Iterable[str], k: int, stairs: Optional[Sequence[str]] = None) -> Formula:
    """Satisfied exactly by the k-staircases (given disjoint stair scopes)."""
    if stairs is None:
        stairs = [f"s_{i}" for i in range(k + 1)]
    if len(stairs) != k + 1 or len(set(stairs)) != k + 1:
        raise ValueError(f"canon_{k} needs {k + 1} pairwise distinct stair names")
    parts = [gen_rho(props, 0, k, stairs[0])]
    for m in range(1, k + 1):
        parts.append(gen_rho(props, m, k - m, (stairs[m - 1], stairs[m])))
    return F.conj(parts)


def gen_canon_prime(props: Iterable[str], k: int, stairs: Sequence[str], prime: str) -> Formula:
    """canon_k plus a duplicate k-canonical top stair."""
    if k < 1:
        raise ValueError("the primed construction needs k >= 1")
    if prime in stairs:
        raise ValueError("the primed stair must be distinct from the others")
    return F.And(gen_canon(props, k, stairs), gen_rho(props, k, 0, (stairs[k - 1], prime)))


def gen_scopes(k: int, names: Iterable[str]) -> Formula:
    """Forces the names to behave as pairwise disjoint scopes up to height k."""
    names = F.sorted_props(set(names))
    parts = []
    for i, x in enumerate(names):
        for y in names[i + 1 :]:
            parts.append(F.MLNeg(F.And(F.Prop(x), F.Prop(y))))
    for x in names:
        p = F.Prop(x)
        for i in range(1, k + 1):
            parts.append(
                F.LaxOr(
                    F.And(p, F.box_n(i, p)),
                    F.And(F.MLNeg(p), F.box_n(i, F.MLNeg(p))),
                )
            )
    return F.conj(parts)


def gen_canon_family(
    props: Iterable[str],
    k: int,
    stairs: Optional[Sequence[str]] = None,
    prime: Optional[str] = None,
) -> dict:
    """The canonicity bundle: rho components, canon_k, optional primed variant,
    and the scopes formula over all stair names."""
    if stairs is None:
        stairs = [f"s_{i}" for i in range(k + 1)]
    out = {
        "canon": gen_canon(props, k, stairs),
        "scopes": gen_scopes(k, list(stairs) + ([prime] if prime else [])),
        "rho": {
            (0, k): gen_rho(props, 0, k, stairs[0]),
            **{
                (m, k - m): gen_rho(props, m, k - m, (stairs[m - 1], stairs[m]))
                for m in range(1, k + 1)
            },
        },
    }
    if prime is not None:
        out["canon_prime"] = gen_canon_prime(props, k, stairs, prime)
    return out
