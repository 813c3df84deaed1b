"""Formula AST, concrete-syntax parser/printer, and sugar expansion.

Core connectives are truth ``top``, propositions, ML negation ``!`` (only
over classical subtrees), team negation ``~``, conjunction ``&``, lax and
strict splitting disjunction ``|`` / ``|s``, and the modalities ``[]``,
``<>``, ``<s>``.  Everything else (``bot``, ``dep``, ``E``, hook ``?>``,
``->``, ``<->``, ``=>``, ``\\/``) is sugar and is expanded at parse time, so
the evaluator only ever sees core connectives.

Formulas are hash-consed: structurally equal trees are the same object, so
equality is identity and per-node caches key on ``id``.
"""

from __future__ import annotations

import re
import threading
from typing import Iterable, Optional

from .errors import ParseError, WellFormednessError

TOP = "top"
PROP = "prop"
MLNEG = "mlneg"
TEAMNEG = "teamneg"
AND = "and"
LAXOR = "laxor"
STROR = "stror"
BOX = "box"
DIA = "dia"
STRDIA = "strdia"

_UNARY = (MLNEG, TEAMNEG, BOX, DIA, STRDIA)
_BINARY = (AND, LAXOR, STROR)

_intern: dict = {}
_intern_lock = threading.Lock()


class Formula:
    """One hash-consed AST node.

    Attributes
    ----------
    kind : str
        One of the node-kind constants above.
    name : str | None
        Proposition name (``kind == PROP`` only).
    args : tuple[Formula, ...]
        Child nodes, in order.
    md : int
        Modal depth, cached at construction.
    classical : bool
        True iff the subtree is an ML formula (no ``~``, ``|s``, ``<s>``;
        all negations are ``!``).
    size : int
        Number of AST nodes.
    """

    __slots__ = ("kind", "name", "args", "md", "classical", "size", "__weakref__")

    def __new__(cls, kind, name=None, args=()):
        key = (kind, name, tuple(id(a) for a in args))
        with _intern_lock:
            found = _intern.get(key)
            if found is not None:
                return found
            self = object.__new__(cls)
            self.kind = kind
            self.name = name
            self.args = tuple(args)
            if kind == MLNEG and not args[0].classical:
                raise WellFormednessError(
                    "ML negation '!' is only defined over classical subformulas"
                )
            if kind in (TOP, PROP):
                self.md = 0
                self.classical = True
                self.size = 1
            else:
                self.md = max(a.md for a in self.args)
                if kind in (BOX, DIA, STRDIA):
                    self.md += 1
                self.size = 1 + sum(a.size for a in self.args)
                if kind in (TEAMNEG, STROR, STRDIA):
                    self.classical = False
                else:
                    self.classical = all(a.classical for a in self.args)
            _intern[key] = self
            return self

    def __repr__(self):
        return f"Formula({print_canonical(self)!r})"

    def __iter__(self):
        return iter(self.args)

    # Identity semantics are intentional: interning makes structural equality
    # coincide with object identity.
    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return object.__hash__(self)


def Top() -> Formula:
    return Formula(TOP)


def Prop(name: str) -> Formula:
    if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name) or name in _KEYWORDS:
        raise WellFormednessError(f"invalid proposition name {name!r}")
    return Formula(PROP, name=name)


def MLNeg(child: Formula) -> Formula:
    return Formula(MLNEG, args=(child,))


def TeamNeg(child: Formula) -> Formula:
    return Formula(TEAMNEG, args=(child,))


def And(left: Formula, right: Formula) -> Formula:
    return Formula(AND, args=(left, right))


def LaxOr(left: Formula, right: Formula) -> Formula:
    return Formula(LAXOR, args=(left, right))


def StrictOr(left: Formula, right: Formula) -> Formula:
    return Formula(STROR, args=(left, right))


def Box(child: Formula) -> Formula:
    return Formula(BOX, args=(child,))


def Dia(child: Formula) -> Formula:
    return Formula(DIA, args=(child,))


def StrictDia(child: Formula) -> Formula:
    return Formula(STRDIA, args=(child,))


def Bot() -> Formula:
    return MLNeg(Top())


def modal_depth(f: Formula) -> int:
    return f.md


def is_classical(f: Formula) -> bool:
    return f.classical


def props_of(f: Formula) -> frozenset:
    """Set of proposition names occurring in the formula."""
    acc = set()
    stack = [f]
    seen = set()
    while stack:
        g = stack.pop()
        if id(g) in seen:
            continue
        seen.add(id(g))
        if g.kind == PROP:
            acc.add(g.name)
        stack.extend(g.args)
    return frozenset(acc)


def prop_sort_key(name: str):
    """Numeric-suffix-aware lexicographic key; fixes the global order on names."""
    parts = re.split(r"(\d+)", name)
    return tuple((0, int(p)) if p.isdigit() else (1, p) for p in parts if p != "")


def prop_lt(a: str, b: str) -> bool:
    return (prop_sort_key(a), a) < (prop_sort_key(b), b)


def sorted_props(names: Iterable[str]) -> list:
    return sorted(names, key=lambda n: (prop_sort_key(n), n))


def conj(parts) -> Formula:
    """Right-folded conjunction; the empty conjunction is ``top``."""
    parts = list(parts)
    if not parts:
        return Top()
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def lax_disj(parts) -> Formula:
    """Right-folded lax disjunction; the empty disjunction is ``bot``."""
    parts = list(parts)
    if not parts:
        return Bot()
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = LaxOr(p, out)
    return out


def strict_disj(parts) -> Formula:
    parts = list(parts)
    if not parts:
        return Bot()
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = StrictOr(p, out)
    return out


def box_n(i: int, f: Formula) -> Formula:
    for _ in range(i):
        f = Box(f)
    return f


def dia_n(i: int, f: Formula) -> Formula:
    for _ in range(i):
        f = Dia(f)
    return f


def _require_classical(f: Formula, what: str):
    if not f.classical:
        raise WellFormednessError(f"{what} requires a classical (ML) argument")


def ovee(left: Formula, right: Formula) -> Formula:
    """Team-wide Boolean disjunction."""
    return TeamNeg(And(TeamNeg(left), TeamNeg(right)))


def ovee_all(parts) -> Formula:
    """Right-folded Boolean disjunction; empty case is ``~top``."""
    parts = list(parts)
    if not parts:
        return TeamNeg(Top())
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = ovee(p, out)
    return out


def material_impl(left: Formula, right: Formula) -> Formula:
    """Team-wide material implication (``=>``)."""
    return ovee(TeamNeg(left), right)


def exists_world(alpha: Formula) -> Formula:
    """``E a``: some world of the team satisfies the classical formula ``a``."""
    _require_classical(alpha, "E")
    return TeamNeg(MLNeg(alpha))


def hook(alpha: Formula, body: Formula) -> Formula:
    """Conditioned evaluation ``a ?> f``: true iff the a-part of the team satisfies f."""
    _require_classical(alpha, "hook guard")
    return LaxOr(MLNeg(alpha), And(alpha, body))


def ml_impl(left: Formula, right: Formula) -> Formula:
    _require_classical(left, "->")
    _require_classical(right, "->")
    return LaxOr(MLNeg(left), right)


def ml_iff(left: Formula, right: Formula) -> Formula:
    _require_classical(left, "<->")
    _require_classical(right, "<->")
    return LaxOr(And(left, right), And(MLNeg(left), MLNeg(right)))


def dep(args) -> Formula:
    """Constancy / dependence atom over classical arguments.

    ``dep(a)`` states that the truth value of ``a`` is constant on the team;
    ``dep(a1, ..., an)`` states that the value of ``an`` is a function of the
    values of ``a1 .. a(n-1)``.
    """
    args = list(args)
    if not args:
        raise WellFormednessError("dep needs at least one argument")
    for a in args:
        _require_classical(a, "dep")
    if len(args) == 1:
        a = args[0]
        return ovee(a, MLNeg(a))
    premise = conj([dep([a]) for a in args[:-1]])
    return TeamNeg(LaxOr(Top(), TeamNeg(material_impl(premise, dep([args[-1]])))))


_SUGAR = {
    "bot": (0, lambda: Bot()),
    "E": (1, lambda a: exists_world(a)),
    "dep": (None, lambda *a: dep(a)),
    "ovee": (2, lambda a, b: ovee(a, b)),
    "limp": (2, lambda a, b: material_impl(a, b)),
    "hook": (2, lambda a, b: hook(a, b)),
    "impl": (2, lambda a, b: ml_impl(a, b)),
    "iff": (2, lambda a, b: ml_iff(a, b)),
}


def sugar_expand(kind: str, args) -> Formula:
    """Expand a derived connective to core connectives.

    Raises ``WellFormednessError`` on arity mismatch or when an argument must
    be classical but is not.
    """
    if kind not in _SUGAR:
        raise WellFormednessError(f"unknown abbreviation {kind!r}")
    arity, fn = _SUGAR[kind]
    args = list(args)
    if arity is not None and len(args) != arity:
        raise WellFormednessError(f"{kind} expects {arity} argument(s), got {len(args)}")
    return fn(*args)


def sub(f: Formula, old: Formula, new: Formula) -> Formula:
    """Substitute every occurrence of the subformula ``old`` by ``new``."""
    memo = {}

    def walk(g):
        if g is old:
            return new
        hit = memo.get(id(g))
        if hit is not None:
            return hit
        if not g.args:
            out = g
        else:
            kids = tuple(walk(a) for a in g.args)
            out = g if all(k is a for k, a in zip(kids, g.args)) else Formula(g.kind, g.name, kids)
        memo[id(g)] = out
        return out

    return walk(f)


# --- concrete syntax ---------------------------------------------------------

_KEYWORDS = {"top", "bot", "dep", "E"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<op><->|<s>|<>|\[\]|\|s(?![A-Za-z0-9_])|\\/|=>|->|\?>|[~!&|(),])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)


def _tokenize(text):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            out.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    out.append(("eof", "", pos))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value):
        typ, val, pos = self.next()
        if val != value:
            raise ParseError(f"expected {value!r} but found {val or 'end of input'!r}", pos)

    def parse(self):
        f = self.impl()
        typ, val, pos = self.peek()
        if typ != "eof":
            raise ParseError(f"trailing input {val!r}", pos)
        return f

    def impl(self):
        left = self.disj()
        if self.peek()[1] == "=>":
            self.next()
            return material_impl(left, self.impl())
        return left

    def disj(self):
        left = self.conj()
        while True:
            val = self.peek()[1]
            if val == "|":
                self.next()
                left = LaxOr(left, self.conj())
            elif val == "|s":
                self.next()
                left = StrictOr(left, self.conj())
            elif val == "\\/":
                self.next()
                left = ovee(left, self.conj())
            else:
                return left

    def conj(self):
        left = self.unary()
        while self.peek()[1] == "&":
            self.next()
            left = And(left, self.unary())
        return left

    def unary(self):
        typ, val, pos = self.peek()
        if val == "~":
            self.next()
            return TeamNeg(self.unary())
        if val == "!":
            self.next()
            child = self.unary()
            try:
                return MLNeg(child)
            except WellFormednessError as exc:
                raise ParseError(str(exc), pos) from None
        if val == "[]":
            self.next()
            return Box(self.unary())
        if val == "<>":
            self.next()
            return Dia(self.unary())
        if val == "<s>":
            self.next()
            return StrictDia(self.unary())
        return self.atom()

    def atom(self):
        typ, val, pos = self.next()
        if val == "top":
            return Top()
        if val == "bot":
            return Bot()
        if val == "E":
            child = self.unary()
            try:
                return exists_world(child)
            except WellFormednessError as exc:
                raise ParseError(str(exc), pos) from None
        if val == "dep":
            self.expect("(")
            args = [self.impl()]
            while self.peek()[1] == ",":
                self.next()
                args.append(self.impl())
            self.expect(")")
            try:
                return dep(args)
            except WellFormednessError as exc:
                raise ParseError(str(exc), pos) from None
        if val == "(":
            inner = self.impl()
            typ2, val2, pos2 = self.next()
            if val2 == ")":
                return inner
            if val2 in ("?>", "->", "<->"):
                right = self.impl()
                self.expect(")")
                builder = {"?>": hook, "->": ml_impl, "<->": ml_iff}[val2]
                try:
                    return builder(inner, right)
                except WellFormednessError as exc:
                    raise ParseError(str(exc), pos2) from None
            raise ParseError(f"expected ')' but found {val2 or 'end of input'!r}", pos2)
        if typ == "ident":
            return Prop(val)
        raise ParseError(f"unexpected token {val or 'end of input'!r}", pos)


def parse(text: str) -> Formula:
    """Parse concrete syntax into a core-connective AST (sugar expanded)."""
    parser = _Parser(text)
    # generated formulas nest deeply; the descent needs a handful of frames
    # per nesting level
    import sys

    want = 10 * len(parser.toks) + 1000
    old = sys.getrecursionlimit()
    if want > old:
        sys.setrecursionlimit(want)
    try:
        return parser.parse()
    finally:
        if want > old:
            sys.setrecursionlimit(old)


_UNOP_SYMBOL = {MLNEG: "!", TEAMNEG: "~", BOX: "[]", DIA: "<>", STRDIA: "<s>"}
_BINOP_SYMBOL = {AND: "&", LAXOR: "|", STROR: "|s"}


def print_canonical(f: Formula) -> str:
    """Fully parenthesized core-syntax text; ``parse`` inverts it exactly."""
    out = []

    def walk(g):
        if g.kind == TOP:
            out.append("top")
        elif g.kind == PROP:
            out.append(g.name)
        elif g.kind in _UNOP_SYMBOL:
            out.append(_UNOP_SYMBOL[g.kind])
            out.append("(")
            walk(g.args[0])
            out.append(")")
        else:
            out.append("(")
            walk(g.args[0])
            out.append(f" {_BINOP_SYMBOL[g.kind]} ")
            walk(g.args[1])
            out.append(")")

    walk(f)
    return "".join(out)
