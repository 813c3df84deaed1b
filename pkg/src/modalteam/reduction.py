"""Hardness pipeline: alternating-machine descriptions, legal windows, the
run-encoding formula family, and the full input-to-formula reduction.

A run of the machine is a square matrix of cells (tape symbol, or state plus
symbol under the head).  Runs are stored in a team by giving every cell
world a *location*: the pair of ranks, in the lexicographic order on type
sets, of the types realized by its timestep-marked and position-marked
successors.  Cell contents are carried by one proposition per element of the
cell alphabet.  The formula family then defines grids, pre-tableaus,
tableaus, window-legality, input loading, and the alternation chaining, all
relative to scope propositions; the reduction output conjoins the canonicity
and scope machinery with the first run formula.

Desk-scale testing uses witness structures built on top of a staircase; the
window set is locked against the brute-force configuration-pair oracle in
the test suite.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from . import encodings as E
from . import formula as F
from . import typesys as TY
from .canonical import Staircase, build_staircase, prime_stair_name, stair_names
from .errors import ModelFormatError, WellFormednessError
from .formula import Formula
from .structure import KripkeStructure, Team

TIME_MARK = "m_t"
POS_MARK = "m_p"

_NAME_RE = re.compile(r"[A-Za-z0-9_]+")


@dataclass(frozen=True)
class ATMSpec:
    """Single-tape alternating Turing machine, plus the reduction parameters.

    ``alternations`` is padded up to an even number; the initial state must
    be existential.  ``depth`` (k >= 1) and ``phi_size`` (g) must dominate
    the machine's runtime as exp_{k+1}(g(n)); this is the caller's
    obligation and is not verified here.
    """

    states: tuple  # of (name, kind)
    initial: str
    alphabet: tuple
    blank: str
    delta: tuple  # of (q, a, q2, a2, "L"|"R")
    alternations: int
    depth: int
    phi_size: int

    def __post_init__(self):
        kinds = dict(self.states)
        if len(kinds) != len(self.states):
            raise ModelFormatError("duplicate state names")
        for name, kind in self.states:
            if kind not in ("exists", "forall", "accept", "reject"):
                raise ModelFormatError(f"state {name!r} has unknown kind {kind!r}")
            if not _NAME_RE.fullmatch(name):
                raise ModelFormatError(f"state name {name!r} is not identifier-safe")
        for a in self.alphabet:
            if not _NAME_RE.fullmatch(a):
                raise ModelFormatError(f"symbol {a!r} is not identifier-safe")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ModelFormatError("duplicate alphabet symbols")
        if self.blank not in self.alphabet:
            raise ModelFormatError("blank symbol missing from the alphabet")
        if kinds.get(self.initial) != "exists":
            raise ModelFormatError("the initial state must be existential")
        if self.depth < 1:
            raise ModelFormatError("depth must be at least 1")
        if self.alternations % 2:
            object.__setattr__(self, "alternations", self.alternations + 1)
        for (q, a, q2, a2, d) in self.delta:
            if q not in kinds or q2 not in kinds:
                raise ModelFormatError(f"transition mentions unknown state: {(q, a, q2, a2, d)}")
            if a not in self.alphabet or a2 not in self.alphabet:
                raise ModelFormatError(f"transition mentions unknown symbol: {(q, a, q2, a2, d)}")
            if d not in ("L", "R"):
                raise ModelFormatError("transition direction must be 'L' or 'R'")
            if kinds[q] in ("accept", "reject"):
                raise ModelFormatError("halting states have no outgoing transitions")

    def kind(self, state: str) -> str:
        return dict(self.states)[state]

    def states_of_kind(self, kind: str) -> list:
        return [name for name, k in self.states if k == kind]

    @staticmethod
    def from_json_dict(data: dict) -> "ATMSpec":
        required = {"states", "initial", "alphabet", "blank", "delta", "alternations", "depth", "phi_size"}
        if not isinstance(data, dict) or set(data) != required:
            raise ModelFormatError(f"machine file must have exactly the keys {sorted(required)}")
        return ATMSpec(
            states=tuple((s["name"], s["kind"]) for s in data["states"]),
            initial=data["initial"],
            alphabet=tuple(data["alphabet"]),
            blank=data["blank"],
            delta=tuple(tuple(t) for t in data["delta"]),
            alternations=int(data["alternations"]),
            depth=int(data["depth"]),
            phi_size=int(data["phi_size"]),
        )

    @staticmethod
    def load(path) -> "ATMSpec":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ModelFormatError(f"invalid JSON: {exc}") from None
        return ATMSpec.from_json_dict(data)


def cells_of(machine: ATMSpec) -> list:
    """The cell alphabet: tape symbols, then (state, symbol) pairs, in spec order."""
    out = [("sym", a) for a in machine.alphabet]
    for q, _ in machine.states:
        for a in machine.alphabet:
            out.append(("head", q, a))
    return out


def cell_prop(cell) -> str:
    if cell[0] == "sym":
        return f"x_{cell[1]}"
    return f"x_{cell[1]}_{cell[2]}"


def legal_windows(machine: ATMSpec) -> frozenset:
    """All allowed 2x3 sub-blocks of successive configurations.

    Built Cook-style from the transition relation: head transitions with the
    head in each window column, head entry from either side, unchanged tape,
    and repetition of halting heads (halting configurations repeat, so runs
    that finish early still fill the square grid).
    """
    tape = [("sym", a) for a in machine.alphabet]
    halting = set(machine.states_of_kind("accept")) | set(machine.states_of_kind("reject"))
    wins = set()
    for b in tape:
        for c in tape:
            for d in tape:
                wins.add((b, c, d, b, c, d))
    for q in halting:
        for a in machine.alphabet:
            h = ("head", q, a)
            for b in tape:
                for c in tape:
                    wins.add((h, b, c, h, b, c))
                    wins.add((b, h, c, b, h, c))
                    wins.add((b, c, h, b, c, h))
    enter_left = set()
    enter_right = set()
    for (q, a, q2, a2, d) in machine.delta:
        h = ("head", q, a)
        w = ("sym", a2)
        for b in tape:
            for c in tape:
                if d == "R":
                    wins.add((h, b, c, w, ("head", q2, b[1]), c))
                    wins.add((b, h, c, b, w, ("head", q2, c[1])))
                    wins.add((b, c, h, b, c, w))
                else:
                    wins.add((h, b, c, w, b, c))
                    wins.add((b, h, c, ("head", q2, b[1]), w, c))
                    wins.add((b, c, h, b, ("head", q2, c[1]), w))
        (enter_left if d == "R" else enter_right).add(q2)
    for q2 in enter_left:
        for b in tape:
            for c in tape:
                for d_ in tape:
                    wins.add((b, c, d_, ("head", q2, b[1]), c, d_))
    for q2 in enter_right:
        for b in tape:
            for c in tape:
                for d_ in tape:
                    wins.add((b, c, d_, b, c, ("head", q2, d_[1])))
    return frozenset(wins)


@dataclass
class ReductionContext:
    """Naming and machine context shared by the formula family.

    Scope names: stairs ``s_0..s_k`` plus the primed top stair, pre-tableau
    scopes ``g_0..g_m`` and run scopes ``a_1..a_r``; the image-partition
    markers are the fixed propositions ``m_t`` and ``m_p``.
    """

    machine: ATMSpec
    n_gammas: int = 7  # g_0 .. g_{n_gammas-1}
    cells: Optional[tuple] = None  # cell-alphabet override, for desk-scale tests

    def __post_init__(self):
        self.k = self.machine.depth
        self.props = tuple(f"p_{i}" for i in range(1, self.machine.phi_size + 1))
        self.stairs = tuple(stair_names(self.k))
        self.prime = prime_stair_name(self.k)
        if self.cells is None:
            self.cells = tuple(cells_of(self.machine))
        else:
            self.cells = tuple(self.cells)
        self.n_gammas = max(self.n_gammas, 7)

    def gamma(self, i: int) -> str:
        if i >= self.n_gammas:
            raise ValueError(f"gamma index {i} out of range; context has {self.n_gammas}")
        return f"g_{i}"

    def run_scope(self, i: int) -> str:
        return f"a_{i}"

    def scope_set(self) -> list:
        gammas = [f"g_{i}" for i in range(self.n_gammas)]
        runs = [self.run_scope(i) for i in range(1, self.machine.alternations + 1)]
        return list(self.stairs) + [self.prime] + gammas + runs

    # -- location machinery ------------------------------------------------

    def select_mark(self, alpha: str, mark: str, body: Formula) -> Formula:
        """Shrink the alpha part of the team to its mark-satisfying subteam."""
        a, q = F.Prop(alpha), F.Prop(mark)
        return F.LaxOr(F.And(a, F.MLNeg(q)), F.And(F.hook(a, q), body))

    def _cmp(self, mark: str, alpha: str, beta: str, order: bool) -> Formula:
        inner = (
            E.gen_zeta(self.props, self.k - 1, alpha, beta, self.stairs, starred=True)
            if order
            else E.gen_chi(self.props, self.k - 1, alpha, beta, starred=True)
        )
        return F.Box(self.select_mark(alpha, mark, self.select_mark(beta, mark, inner)))

    def psi_eq(self, mark: str, alpha: str, beta: str) -> Formula:
        return self._cmp(mark, alpha, beta, order=False)

    def psi_lt(self, mark: str, alpha: str, beta: str) -> Formula:
        return self._cmp(mark, alpha, beta, order=True)

    def psi_min(self, mark: str, alpha: str) -> Formula:
        return F.TeamNeg(E.exists_pt(self.gamma(0), self.psi_lt(mark, self.gamma(0), alpha)))

    def psi_succ(self, mark: str, alpha: str, beta: str) -> Formula:
        other = POS_MARK if mark == TIME_MARK else TIME_MARK
        g0 = self.gamma(0)
        between = E.exists_pt(
            g0, F.And(self.psi_lt(mark, alpha, g0), self.psi_lt(mark, g0, beta))
        )
        return F.conj(
            [self.psi_eq(other, alpha, beta), self.psi_lt(mark, alpha, beta), F.TeamNeg(between)]
        )

    # -- grids, pre-tableaus, tableaus --------------------------------------

    def unique_cell(self, alpha: str) -> Formula:
        parts = []
        for e in self.cells:
            others = [F.MLNeg(F.Prop(cell_prop(e2))) for e2 in self.cells if e2 != e]
            parts.append(F.conj([F.Prop(cell_prop(e))] + others))
        return F.hook(F.Prop(alpha), F.lax_disj(parts))

    def psi_pair(self, alpha: str) -> Formula:
        left = self.select_mark(
            alpha, TIME_MARK, E.gen_chi(self.props, self.k - 1, self.stairs[-1], alpha, starred=True)
        )
        right = self.select_mark(
            alpha, POS_MARK, E.gen_chi(self.props, self.k - 1, self.prime, alpha, starred=True)
        )
        return F.Box(F.And(left, right))

    def psi_grid(self, alpha: str) -> Formula:
        quant = E.forall_pt(
            self.stairs[-1],
            E.forall_pt(self.prime, E.exists_pt(alpha, self.psi_pair(alpha))),
        )
        return F.And(self.unique_cell(alpha), quant)

    def psi_pre_tableau(self, alpha: str) -> Formula:
        per_cell = [
            E.exists_pt(alpha, F.And(self.psi_pair(alpha), F.hook(F.Prop(alpha), F.Prop(cell_prop(e)))))
            for e in self.cells
        ]
        quant = E.forall_pt(self.stairs[-1], E.forall_pt(self.prime, F.conj(per_cell)))
        return F.And(self.psi_grid(alpha), quant)

    def psi_approx(self, alpha: str, beta: str) -> Formula:
        same_cell = F.ovee_all(
            [F.hook(F.LaxOr(F.Prop(alpha), F.Prop(beta)), F.Prop(cell_prop(e))) for e in self.cells]
        )
        same_loc = F.And(self.psi_eq(TIME_MARK, alpha, beta), self.psi_eq(POS_MARK, alpha, beta))
        return E.forall_pt(alpha, E.forall_pt(beta, F.material_impl(same_loc, same_cell)))

    def psi_tableau(self, alpha: str) -> Formula:
        g0 = self.gamma(0)
        return F.And(
            self.psi_grid(alpha),
            E.exists_sub(g0, F.And(self.psi_grid(g0), self.psi_approx(alpha, g0))),
        )

    def copy_quantifier(self, gamma: str, alpha: str, body: Formula) -> Formula:
        """Shrink the gamma pre-tableau to a tableau equal to alpha's."""
        return E.exists_sub(
            gamma, F.conj([self.psi_grid(gamma), self.psi_approx(alpha, gamma), body])
        )

    # -- legality ------------------------------------------------------------

    def xstate(self, state_kinds, beta: str) -> Formula:
        """Some head cell with a state of one of the given kinds is selected."""
        names = set()
        for kind in state_kinds:
            names.update(self.machine.states_of_kind(kind))
        parts = [
            F.hook(F.Prop(beta), F.Prop(cell_prop(c)))
            for c in self.cells
            if c[0] == "head" and c[1] in names
        ]
        return F.ovee_all(parts)

    def psi_window(self, gammas: Sequence[str]) -> Formula:
        g1, g2, g3, g4, g5, g6 = gammas
        return F.conj(
            [
                self.psi_succ(TIME_MARK, g1, g4),
                self.psi_succ(TIME_MARK, g2, g5),
                self.psi_succ(TIME_MARK, g3, g6),
                self.psi_succ(POS_MARK, g1, g2),
                self.psi_succ(POS_MARK, g2, g3),
            ]
        )

    def theta_one_head(self) -> Formula:
        g1, g2 = self.gamma(1), self.gamma(2)
        heads = [c for c in self.cells if c[0] == "head"]
        clauses = [
            F.TeamNeg(
                F.And(
                    F.hook(F.Prop(g1), F.Prop(cell_prop(c1))),
                    F.hook(F.Prop(g2), F.Prop(cell_prop(c2))),
                )
            )
            for c1 in heads
            for c2 in heads
        ]
        cond = F.And(self.psi_eq(TIME_MARK, g1, g2), self.psi_lt(POS_MARK, g1, g2))
        return E.forall_pt(g1, E.forall_pt(g2, F.material_impl(cond, F.conj(clauses))))

    def theta_some_head(self) -> Formula:
        g1, g2 = self.gamma(1), self.gamma(2)
        return E.forall_pt(
            g1,
            E.exists_pt(
                g2,
                F.And(
                    self.psi_eq(TIME_MARK, g1, g2),
                    self.xstate(("exists", "forall", "accept", "reject"), g2),
                ),
            ),
        )

    def theta_windows(self) -> Formula:
        gammas = [self.gamma(i) for i in range(1, 7)]
        win = sorted(legal_windows(self.machine), key=lambda w: [cell_prop(c) for c in w])
        options = [
            F.conj([F.hook(F.Prop(g), F.Prop(cell_prop(c))) for g, c in zip(gammas, w)])
            for w in win
        ]
        body = F.material_impl(self.psi_window(gammas), F.ovee_all(options))
        for g in reversed(gammas):
            body = E.forall_pt(g, body)
        return body

    def psi_legal(self, alpha: str) -> Formula:
        body = F.conj([self.theta_one_head(), self.theta_some_head(), self.theta_windows()])
        for i in reversed(range(1, 7)):
            body = self.copy_quantifier(self.gamma(i), alpha, body)
        return F.And(self.psi_tableau(alpha), body)

    # -- input, tails, runs ---------------------------------------------------

    def psi_input(self, alpha: str, word: str) -> Formula:
        x = list(word)
        n = len(x)
        if n < 1:
            raise ValueError("the input word must be non-empty")
        for a in x:
            if a not in self.machine.alphabet:
                raise ModelFormatError(f"input symbol {a!r} not in the alphabet")
        gammas = [self.gamma(i) for i in range(1, n + 2)]
        first = F.conj(
            [
                self.psi_min(TIME_MARK, gammas[0]),
                self.psi_min(POS_MARK, gammas[0]),
                F.hook(F.Prop(gammas[0]), F.Prop(cell_prop(("head", self.machine.initial, x[0])))),
            ]
        )
        middles = [
            F.And(
                self.psi_succ(POS_MARK, gammas[i - 1], gammas[i]),
                F.hook(F.Prop(gammas[i]), F.Prop(cell_prop(("sym", x[i])))),
            )
            for i in range(1, n)
        ]
        tail_cond = F.And(
            self.psi_eq(TIME_MARK, gammas[n - 1], gammas[n]),
            self.psi_lt(POS_MARK, gammas[n - 1], gammas[n]),
        )
        blanks = E.forall_pt(
            gammas[n],
            F.material_impl(
                tail_cond, F.hook(F.Prop(gammas[n]), F.Prop(cell_prop(("sym", self.machine.blank))))
            ),
        )
        body = F.conj([first] + middles + [blanks])
        for g in gammas[:n]:
            body = E.exists_pt(g, body)
        for g in reversed(gammas):
            body = self.copy_quantifier(g, alpha, body)
        return body

    def psi_tail(self, alpha: str, beta: str) -> Formula:
        g0 = self.gamma(0)
        alternation = E.exists_pt(
            g0,
            F.And(
                self.psi_lt(TIME_MARK, g0, alpha),
                F.ovee(
                    F.And(self.xstate(("exists",), alpha), self.xstate(("forall",), g0)),
                    F.And(self.xstate(("forall",), alpha), self.xstate(("exists",), g0)),
                ),
            ),
        )
        kinds = F.ovee_all(
            [self.xstate(("accept",), alpha), self.xstate(("reject",), alpha), alternation]
        )
        body = E.exists_pt(
            alpha,
            F.conj(
                [
                    self.psi_eq(TIME_MARK, alpha, beta),
                    self.xstate(("exists", "forall", "accept", "reject"), alpha),
                    kinds,
                ]
            ),
        )
        return self.copy_quantifier(g0, alpha, body)

    def psi_first_tail(self, alpha: str, beta: str) -> Formula:
        g1 = self.gamma(1)
        earlier = E.exists_pt(
            g1, F.And(self.psi_lt(TIME_MARK, g1, beta), self.psi_tail(alpha, g1))
        )
        return F.And(self.psi_tail(alpha, beta), F.TeamNeg(earlier))

    def _psi_end(self, alpha: str, kind: str) -> Formula:
        g2 = self.gamma(2)
        body = E.exists_pt(
            g2, F.And(self.xstate((kind,), g2), self.psi_first_tail(alpha, g2))
        )
        return self.copy_quantifier(g2, alpha, body)

    def psi_acc(self, alpha: str) -> Formula:
        return self._psi_end(alpha, "accept")

    def psi_rej(self, alpha: str) -> Formula:
        return self._psi_end(alpha, "reject")

    def psi_cont(self, alpha: str, beta: str) -> Formula:
        g2 = self.gamma(2)
        same_cell = F.ovee_all(
            [F.hook(F.LaxOr(F.Prop(alpha), F.Prop(beta)), F.Prop(cell_prop(e))) for e in self.cells]
        )
        cond = F.conj(
            [
                self.psi_min(TIME_MARK, beta),
                self.psi_eq(TIME_MARK, alpha, g2),
                self.psi_eq(POS_MARK, alpha, beta),
            ]
        )
        pairwise = E.forall_pt(alpha, E.forall_pt(beta, F.material_impl(cond, same_cell)))
        return E.exists_pt(g2, F.And(self.psi_first_tail(alpha, g2), pairwise))

    def psi_run(self, i: int, word: str) -> Formula:
        r = self.machine.alternations
        a_i = self.run_scope(i)
        if i == 1:
            rest = self.psi_acc(a_i) if r == 1 else F.ovee(self.psi_acc(a_i), self.psi_run(2, word))
            return E.exists_sub(
                a_i,
                F.conj(
                    [
                        self.psi_legal(a_i),
                        self.psi_input(a_i, word),
                        F.TeamNeg(self.psi_rej(a_i)),
                        rest,
                    ]
                ),
            )
        prev = self.run_scope(i - 1)
        premise = F.And(self.psi_legal(a_i), self.psi_cont(prev, a_i))
        if i == r:
            concl = F.And(F.TeamNeg(self.psi_rej(a_i)), self.psi_acc(a_i))
            return E.forall_sub(a_i, F.material_impl(premise, concl))
        if i % 2 == 0:
            concl = F.And(
                F.TeamNeg(self.psi_rej(a_i)), F.ovee(self.psi_acc(a_i), self.psi_run(i + 1, word))
            )
            return E.forall_sub(a_i, F.material_impl(premise, concl))
        return E.exists_sub(
            a_i,
            F.conj(
                [
                    premise,
                    F.TeamNeg(self.psi_rej(a_i)),
                    F.ovee(self.psi_acc(a_i), self.psi_run(i + 1, word)),
                ]
            ),
        )


_COMPONENTS = {
    "grid": lambda ctx, p: ctx.psi_grid(p["alpha"]),
    "pair": lambda ctx, p: ctx.psi_pair(p["alpha"]),
    "pre_tableau": lambda ctx, p: ctx.psi_pre_tableau(p["alpha"]),
    "tableau": lambda ctx, p: ctx.psi_tableau(p["alpha"]),
    "approx": lambda ctx, p: ctx.psi_approx(p["alpha"], p["beta"]),
    "select_mark": lambda ctx, p: ctx.select_mark(p["alpha"], p["mark"], p["body"]),
    "eq": lambda ctx, p: ctx.psi_eq(p["mark"], p["alpha"], p["beta"]),
    "lt": lambda ctx, p: ctx.psi_lt(p["mark"], p["alpha"], p["beta"]),
    "succ": lambda ctx, p: ctx.psi_succ(p["mark"], p["alpha"], p["beta"]),
    "min": lambda ctx, p: ctx.psi_min(p["mark"], p["alpha"]),
    "window": lambda ctx, p: ctx.psi_window(p["gammas"]),
    "legal": lambda ctx, p: ctx.psi_legal(p["alpha"]),
    "theta_one_head": lambda ctx, p: ctx.theta_one_head(),
    "theta_some_head": lambda ctx, p: ctx.theta_some_head(),
    "theta_windows": lambda ctx, p: ctx.theta_windows(),
    "input": lambda ctx, p: ctx.psi_input(p["alpha"], p["word"]),
    "tail": lambda ctx, p: ctx.psi_tail(p["alpha"], p["beta"]),
    "first_tail": lambda ctx, p: ctx.psi_first_tail(p["alpha"], p["beta"]),
    "acc": lambda ctx, p: ctx.psi_acc(p["alpha"]),
    "rej": lambda ctx, p: ctx.psi_rej(p["alpha"]),
    "cont": lambda ctx, p: ctx.psi_cont(p["alpha"], p["beta"]),
    "xstate": lambda ctx, p: ctx.xstate(p["kinds"], p["beta"]),
    "copy_quantifier": lambda ctx, p: ctx.copy_quantifier(p["gamma"], p["alpha"], p["body"]),
    "run": lambda ctx, p: ctx.psi_run(p["index"], p["word"]),
}


def gen_component(name: str, machine: ATMSpec, n_gammas: int = 7, cells=None, **params) -> Formula:
    """Build one named display of the run-encoding family."""
    if name not in _COMPONENTS:
        raise ValueError(f"unknown component {name!r}; choose from {sorted(_COMPONENTS)}")
    ctx = ReductionContext(machine, n_gammas=n_gammas, cells=cells)
    return _COMPONENTS[name](ctx, params)


def reduce_input(machine: ATMSpec, word: str) -> Formula:
    """The full reduction: satisfiable iff the machine accepts the word."""
    n = len(word)
    if n < 1:
        raise ModelFormatError("the input word must be non-empty")
    ctx = ReductionContext(machine, n_gammas=max(n + 2, 7))
    scope_names = ctx.scope_set()
    pre_tableau_scopes = [f"g_{i}" for i in range(ctx.n_gammas)] + [
        ctx.run_scope(i) for i in range(1, machine.alternations + 1)
    ]
    parts = [
        E.gen_canon_prime(ctx.props, ctx.k, ctx.stairs, ctx.prime),
        E.gen_scopes(ctx.k, scope_names),
    ]
    parts.extend(ctx.psi_pre_tableau(p) for p in pre_tableau_scopes)
    parts.append(ctx.psi_run(1, word))
    return F.conj(parts)


# -- locations on concrete structures ------------------------------------------


def location_of(structure: KripkeStructure, world: str, props, k: int, budget: int = TY.DEFAULT_BUDGET):
    """1-based (timestep, position) ranks of the marked image type sets."""
    low = TY.enumerate_types(props, k - 1, budget)
    idx = structure.index(world)
    succ = structure.succ_masks[idx]
    out = []
    for mark in (TIME_MARK, POS_MARK):
        part = succ & structure.prop_mask(mark)
        ts = {TY.type_of(structure, w, props, k - 1) for w in structure.mask_worlds(part)}
        out.append(TY.rank_of_typeset(ts, low))
    return tuple(out)


def cell_of(structure: KripkeStructure, world: str, machine: ATMSpec):
    """The unique cell proposition carried by the world."""
    found = [
        c for c in cells_of(machine) if structure.prop_mask(cell_prop(c)) >> structure.index(world) & 1
    ]
    if len(found) != 1:
        raise WellFormednessError(
            f"world {world!r} carries {len(found)} cell propositions, expected exactly 1"
        )
    return found[0]


@dataclass
class PretableauWitness:
    """A staircase extended with scope-labelled grid worlds for testing."""

    structure: KripkeStructure
    team: Team
    staircase: Staircase
    scope_roots: dict  # scope name -> list of (world, (i, j), cell)
    n: int  # grid side length


def build_pretableau_witness(
    machine: ATMSpec,
    content="full",
    scopes: Sequence[str] = ("g_1",),
    cells: Optional[Sequence] = None,
    budget: int = TY.DEFAULT_BUDGET,
) -> PretableauWitness:
    """Extend a staircase with one grid of scope-labelled worlds per scope.

    ``content='full'`` realizes every cell at every location (a pre-tableau);
    a run matrix ``content[i][j]`` realizes exactly that cell per location.
    ``cells`` can restrict the cell alphabet for cheaper exhaustive tests.
    """
    k = machine.depth
    ctx = ReductionContext(machine)
    low = TY.enumerate_types(ctx.props, k - 1, budget)
    n = 1 << len(low)
    if n * n * len(cells_of(machine)) * max(1, len(scopes)) > budget:
        raise TY.BudgetExceededError(n * n * len(cells_of(machine)), budget, what="witness grid")
    sc = build_staircase(ctx.props, k, with_prime=True, budget=budget)
    base = sc.structure.to_json_dict(sc.team)
    worlds = list(base["worlds"])
    edges = [tuple(e) for e in base["edges"]]
    val = {p: list(ws) for p, ws in base["valuation"].items()}
    team = list(base["team"])
    cell_list = list(cells if cells is not None else cells_of(machine))

    def add_world(name, labels):
        worlds.append(name)
        for p in labels:
            val.setdefault(p, []).append(name)

    def realize(t: TY.TypeId, name, labels):
        add_world(name, list(labels) + sorted(t.props))
        for i, c in enumerate(t.children):
            child = f"{name}_{i}"
            realize(c, child, labels)
            edges.append((name, child))

    scope_roots = {}
    for scope in scopes:
        roots = []
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                here = cell_list if content == "full" else [content[i - 1][j - 1]]
                for cell in here:
                    name = f"{scope}_w{i}_{j}_{cell_prop(cell)}"
                    add_world(name, [scope, cell_prop(cell)])
                    team.append(name)
                    roots.append((name, (i, j), cell))
                    for mark, rank in ((TIME_MARK, i), (POS_MARK, j)):
                        for b, t in enumerate(low):
                            if (rank - 1) >> b & 1:
                                child = f"{name}_{mark}{b}"
                                realize(t, child, [scope, mark])
                                edges.append((name, child))
        scope_roots[scope] = roots
    structure = KripkeStructure(worlds, edges, val)
    return PretableauWitness(
        structure=structure,
        team=structure.team(team),
        staircase=sc,
        scope_roots=scope_roots,
        n=n,
    )
