"""Team-semantics model checker (lax and strict) and the classical point evaluator.

Evaluation is clause-by-clause over the core connectives.  Three ingredients
keep it tractable at desk scale:

* classical subtrees are evaluated pointwise via per-node satisfying-world
  masks, so a team check of a classical formula is one mask comparison;
* splitting disjunctions are evaluated through sound shortcuts where a
  provably equivalent bounded search exists (conditioned evaluation via the
  hook, subteam/point quantifier shapes, Boolean combinations of classical
  guards, support bounds from classical conjuncts), falling back to full
  cover enumeration otherwise;
* results are memoized per (subformula, team bitmask) for the lifetime of
  the checker instance.

``debug=True`` re-evaluates every shortcut through the unoptimized cover
enumeration and asserts agreement; tests exercise this on small instances.
"""

from __future__ import annotations

from typing import Optional

from . import _kernels as K
from . import formula as F
from .errors import WellFormednessError
from .formula import Formula
from .structure import LAX, STRICT, KripkeStructure, Team

# Shape classification is structural and structure-independent, so the cache
# is shared across checker instances.  Interned nodes live for the session.
_classify_cache: dict = {}
_dc_cache: dict = {}
_strictfree_cache: dict = {}


def _is_E(node: Formula, alpha: Formula) -> bool:
    return (
        node.kind == F.TEAMNEG
        and node.args[0].kind == F.MLNEG
        and node.args[0].args[0] is alpha
    )


def _classify(f: Formula):
    """Recognize generated shapes with known direct semantics.

    Returns one of ``("exists_point", alpha, body)``, ``("hook", alpha,
    body)``, ``("select", alpha, cond, body)`` or ``None``.  Each rule is an
    equivalence that holds for every formula of that shape, so accidental
    matches are still evaluated correctly.
    """
    hit = _classify_cache.get(f, False)
    if hit is not False:
        return hit
    out = None
    if f.kind == F.LAXOR:
        left, right = f.args
        # exists-point quantifier: a | (E a & ~(a | ~(E a => body)))
        if left.classical and right.kind == F.AND and _is_E(right.args[0], left):
            q = right.args[1]
            if (
                q.kind == F.TEAMNEG
                and q.args[0].kind == F.LAXOR
                and q.args[0].args[0] is left
                and q.args[0].args[1].kind == F.TEAMNEG
            ):
                psi = q.args[0].args[1].args[0]
                if (
                    psi.kind == F.TEAMNEG
                    and psi.args[0].kind == F.AND
                    and psi.args[0].args[0].kind == F.TEAMNEG
                    and psi.args[0].args[0].args[0].kind == F.TEAMNEG
                    and _is_E(psi.args[0].args[0].args[0].args[0], left)
                    and psi.args[0].args[1].kind == F.TEAMNEG
                ):
                    out = ("exists_point", left, psi.args[0].args[1].args[0])
        # grid-component selection: (a & !q) | ((a ?> q) & body)
        if (
            out is None
            and left.kind == F.AND
            and left.args[1].kind == F.MLNEG
            and right.kind == F.AND
        ):
            alpha, negq = left.args
            cond = negq.args[0]
            hook_part = right.args[0]
            if (
                alpha.classical
                and cond.classical
                and hook_part.kind == F.LAXOR
                and hook_part.args[0].kind == F.MLNEG
                and hook_part.args[0].args[0] is alpha
                and hook_part.args[1].kind == F.AND
                and hook_part.args[1].args[0] is alpha
                and hook_part.args[1].args[1] is cond
            ):
                out = ("select", alpha, cond, right.args[1])
        # hook: !a | (a & body)
        if (
            out is None
            and left.kind == F.MLNEG
            and right.kind == F.AND
            and right.args[0] is left.args[0]
        ):
            out = ("hook", left.args[0], right.args[1])
    _classify_cache[f] = out
    return out


def _dc_parts(f: Formula):
    """Classical guards g1..gm when ``T |= f  iff  T is all-gi for some i``.

    Covers classical formulas and their Boolean disjunctions (the ovee
    pattern ``~(~x & ~y)``); returns None otherwise.
    """
    hit = _dc_cache.get(f, False)
    if hit is not False:
        return hit
    out = None
    if f.classical:
        out = (f,)
    elif (
        f.kind == F.TEAMNEG
        and f.args[0].kind == F.AND
        and f.args[0].args[0].kind == F.TEAMNEG
        and f.args[0].args[1].kind == F.TEAMNEG
    ):
        a = _dc_parts(f.args[0].args[0].args[0])
        b = _dc_parts(f.args[0].args[1].args[0])
        if a is not None and b is not None:
            out = a + b
    _dc_cache[f] = out
    return out


def _strict_free(f: Formula) -> bool:
    hit = _strictfree_cache.get(f)
    if hit is not None:
        return hit
    stack = [f]
    seen = set()
    out = True
    while stack:
        g = stack.pop()
        cached = _strictfree_cache.get(g)
        if cached is False:
            out = False
            break
        if cached is True or g in seen:
            continue
        seen.add(g)
        if g.kind in (F.STROR, F.STRDIA):
            out = False
            break
        stack.extend(g.args)
    if out:
        for g in seen:
            _strictfree_cache[g] = True
    _strictfree_cache[f] = out
    return out


class ModelChecker:
    """Evaluator bound to one structure; caches persist across calls."""

    def __init__(self, structure: KripkeStructure, debug: bool = False):
        self.structure = structure
        self.debug = debug
        self._sat = {}
        self._memo = {}
        self._supp = {}

    # -- classical layer ------------------------------------------------

    def sat_mask(self, alpha: Formula) -> int:
        """Bitmask of worlds satisfying the classical formula ``alpha``."""
        if not alpha.classical:
            raise WellFormednessError("point evaluation requires a classical formula")
        hit = self._sat.get(alpha)
        if hit is not None:
            return hit
        s = self.structure
        full = s.full_mask
        kind = alpha.kind
        if kind == F.TOP:
            out = full
        elif kind == F.PROP:
            out = s.prop_mask(alpha.name)
        elif kind == F.MLNEG:
            out = ~self.sat_mask(alpha.args[0]) & full
        elif kind == F.AND:
            out = self.sat_mask(alpha.args[0]) & self.sat_mask(alpha.args[1])
        elif kind == F.LAXOR:
            out = self.sat_mask(alpha.args[0]) | self.sat_mask(alpha.args[1])
        elif kind == F.BOX:
            inner = self.sat_mask(alpha.args[0])
            out = 0
            for i, succ in enumerate(s.succ_masks):
                if succ & ~inner == 0:
                    out |= 1 << i
        elif kind == F.DIA:
            inner = self.sat_mask(alpha.args[0])
            out = 0
            for i, succ in enumerate(s.succ_masks):
                if succ & inner:
                    out |= 1 << i
        else:  # pragma: no cover - classical flag excludes the rest
            raise WellFormednessError(f"non-classical node {kind} in classical formula")
        self._sat[alpha] = out
        return out

    def check_point(self, world: str, alpha: Formula) -> bool:
        """Standard Kripke satisfaction at a single world."""
        return bool(self.sat_mask(alpha) >> self.structure.index(world) & 1)

    # -- team layer -------------------------------------------------------

    def check(self, team: Team, f: Formula, mode: str = LAX) -> bool:
        """Team satisfaction; connectives evaluate by their own kind.

        ``mode=LAX`` rejects formulas containing strict connectives, matching
        the plain-MTL reading; ``mode=STRICT`` admits mixed formulas.
        """
        if team.structure is not self.structure:
            raise ValueError("team belongs to a different structure")
        if mode == LAX and not _strict_free(f):
            raise WellFormednessError("formula contains strict connectives; use mode='strict'")
        return self._eval(team.mask, f)

    def clear_cache(self):
        self._memo.clear()

    def _eval(self, mask: int, f: Formula) -> bool:
        if f.classical:
            return mask & ~self.sat_mask(f) == 0
        key = (f, mask)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        kind = f.kind
        if kind == F.TEAMNEG:
            out = not self._eval(mask, f.args[0])
        elif kind == F.AND:
            out = self._eval(mask, f.args[0]) and self._eval(mask, f.args[1])
        elif kind == F.BOX:
            out = self._eval(self.structure.image_mask(mask), f.args[0])
        elif kind == F.DIA:
            out = self._eval_dia(mask, f.args[0], strict=False)
        elif kind == F.STRDIA:
            out = self._eval_dia(mask, f.args[0], strict=True)
        elif kind == F.LAXOR:
            out = self._eval_laxor(mask, f)
        elif kind == F.STROR:
            out = self._eval_stror(mask, f)
        else:  # pragma: no cover
            raise WellFormednessError(f"unknown node kind {kind}")
        self._memo[key] = out
        return out

    def _eval_dia(self, mask: int, body: Formula, strict: bool) -> bool:
        s = self.structure
        succ = [s.succ_masks[i] for i in K.iter_bits(mask)]
        gen = K.iter_strict_successors(succ) if strict else K.iter_lax_successors(succ)
        return any(self._eval(m, body) for m in gen)

    def _supp_mask(self, f: Formula) -> int:
        """Sound overapproximation: every team satisfying ``f`` lies inside it."""
        hit = self._supp.get(f)
        if hit is not None:
            return hit
        if f.classical:
            out = self.sat_mask(f)
        elif f.kind == F.AND:
            out = self._supp_mask(f.args[0]) & self._supp_mask(f.args[1])
        elif f.kind in (F.LAXOR, F.STROR):
            out = self._supp_mask(f.args[0]) | self._supp_mask(f.args[1])
        else:
            dc = _dc_parts(f)
            if dc is not None:
                out = 0
                for g in dc:
                    out |= self.sat_mask(g)
            else:
                out = self.structure.full_mask
        self._supp[f] = out
        return out

    def _eval_laxor(self, mask: int, f: Formula) -> bool:
        left, right = f.args
        shape = _classify(f)
        if shape is not None:
            if shape[0] == "hook":
                out = self._eval(mask & self.sat_mask(shape[1]), shape[2])
            elif shape[0] == "select":
                _, alpha, cond, body = shape
                a = self.sat_mask(alpha)
                out = self._eval((mask & ~a) | (mask & a & self.sat_mask(cond)), body)
            else:  # exists_point
                _, alpha, body = shape
                a = mask & self.sat_mask(alpha)
                rest = mask & ~self.sat_mask(alpha)
                out = any(self._eval(rest | (1 << i), body) for i in K.iter_bits(a))
            if self.debug:
                assert out == self._eval_or_reference(mask, left, right, strict=False)
            return out
        # Boolean combinations of classical guards on one side admit a
        # quantifier-style bounded search (downward closure).
        for guards, other in ((_dc_parts(left), right), (_dc_parts(right), left)):
            if guards is None:
                continue
            out = False
            for g in guards:
                gm = mask & self.sat_mask(g)
                rest = mask & ~gm
                if any(self._eval(rest | x, other) for x in K.iter_subsets(gm)):
                    out = True
                    break
            if self.debug:
                assert out == self._eval_or_reference(mask, left, right, strict=False)
            return out
        # generic cover search, bounded by support masks
        suppl = self._supp_mask(left)
        suppr = self._supp_mask(right)
        out = False
        if not mask & ~(suppl | suppr):
            mand_s = mask & suppl & ~suppr
            mand_u = mask & suppr & ~suppl
            flex = mask & suppl & suppr
            for xs, xu in K.iter_covers(flex):
                if self._eval(mand_s | xs, left) and self._eval(mand_u | xu, right):
                    out = True
                    break
        if self.debug:
            assert out == self._eval_or_reference(mask, left, right, strict=False)
        return out

    def _eval_stror(self, mask: int, f: Formula) -> bool:
        left, right = f.args
        for guards, other in ((_dc_parts(left), right), (_dc_parts(right), left)):
            if guards is None:
                continue
            # the non-guard part is forced to be the exact complement
            out = False
            for g in guards:
                gm = mask & self.sat_mask(g)
                if any(self._eval(mask & ~x, other) for x in K.iter_subsets(gm)):
                    out = True
                    break
            if self.debug:
                assert out == self._eval_or_reference(mask, left, right, strict=True)
            return out
        suppl = self._supp_mask(left)
        suppr = self._supp_mask(right)
        out = False
        if not mask & ~(suppl | suppr):
            mand_s = mask & suppl & ~suppr
            mand_u = mask & suppr & ~suppl
            flex = mask & suppl & suppr
            for xs in K.iter_subsets(flex):
                if self._eval(mand_s | xs, left) and self._eval(mand_u | (flex & ~xs), right):
                    out = True
                    break
        if self.debug:
            assert out == self._eval_or_reference(mask, left, right, strict=True)
        return out

    def _eval_or_reference(self, mask: int, left: Formula, right: Formula, strict: bool) -> bool:
        """Unoptimized split enumeration; the debug cross-check route."""
        gen = K.iter_partitions(mask) if strict else K.iter_covers(mask)
        return any(self._eval(s, left) and self._eval(u, right) for s, u in gen)


def check(structure: KripkeStructure, team: Team, f: Formula, mode: str = LAX, debug: bool = False) -> bool:
    """One-shot convenience wrapper around :class:`ModelChecker`."""
    return ModelChecker(structure, debug=debug).check(team, f, mode=mode)


def check_point(structure: KripkeStructure, world: str, alpha: Formula) -> bool:
    return ModelChecker(structure).check_point(world, alpha)
