"""Command-line surface.

Subcommands: parse, check, sat, val, canon, staircase, types, bisim, gen,
reduce, translate.  Exit codes: 0 = true/SAT/success, 1 = false/UNSAT,
2 = usage or format error, 3 = budget exceeded.  Diagnostics go to stderr;
all emitted JSON uses sorted keys.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import canonical as CN
from . import encodings as E
from . import formula as F
from . import reduction as R
from . import translate as TR
from . import typesys as TY
from .checker import ModelChecker
from .errors import BudgetExceededError, ModalTeamError
from .structure import load_model

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _read_formula(spec: str) -> F.Formula:
    if spec == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(spec, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError:
            text = spec  # literal formula text
    return F.parse(text)


def _write_out(path, text: str):
    if path in (None, "-"):
        print(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _stairs_arg(value, k):
    return value.split(",") if value else CN.stair_names(k)


def cmd_parse(args):
    print(F.print_canonical(_read_formula(args.formula)))
    return EXIT_TRUE


def cmd_check(args):
    structure, team = load_model(args.model)
    f = _read_formula(args.formula)
    mode = "strict" if args.strict else "lax"
    ok = ModelChecker(structure).check(team, f, mode=mode)
    print("true" if ok else "false")
    return EXIT_TRUE if ok else EXIT_FALSE


def cmd_sat(args, mode):
    f = _read_formula(args.formula)
    res = CN.decide(f, mode=mode, budget=args.budget, search_limit=args.search_limit)
    if mode == "sat":
        print("SAT" if res.answer else "UNSAT")
    else:
        print("VALID" if res.answer else "INVALID")
    if args.witness and res.witness is not None:
        structure, team = res.witness
        from .structure import dump_model

        _write_out(args.witness, dump_model(structure, team))
    return EXIT_TRUE if res.answer else EXIT_FALSE


def cmd_canon(args):
    props = [p for p in args.props.split(",") if p]
    structure, layers = CN.build_canonical_model(props, args.depth, budget=args.budget)
    from .structure import dump_model

    _write_out(args.output, dump_model(structure, structure.full_team(), extra={"layers": layers}))
    return EXIT_TRUE


def cmd_staircase(args):
    props = [p for p in args.props.split(",") if p]
    sc = CN.build_staircase(props, args.depth, with_prime=args.prime, budget=args.budget)
    from .structure import dump_model

    stairs = {name: sc.structure.mask_worlds(sc.structure.prop_mask(name)) for name in sc.stairs}
    if sc.prime:
        stairs[sc.prime] = sc.structure.mask_worlds(sc.structure.prop_mask(sc.prime))
    _write_out(args.output, dump_model(sc.structure, sc.team, extra={"stairs": stairs}))
    return EXIT_TRUE


def cmd_types(args):
    props = [p for p in args.props.split(",") if p]
    print(TY.count_types(props, args.depth))
    if args.list:
        for t in TY.enumerate_types(props, args.depth, budget=args.budget):
            print(TY.render_type(t))
    return EXIT_TRUE


def cmd_bisim(args):
    structure, _ = load_model(args.model)
    props = (
        [p for p in args.props.split(",") if p]
        if args.props is not None
        else sorted(structure.valuation)
    )
    ok = TY.bisimilar(structure, args.left, structure, args.right, props, args.depth)
    print("true" if ok else "false")
    return EXIT_TRUE if ok else EXIT_FALSE


def cmd_gen(args):
    props = [p for p in args.props.split(",") if p]
    k = args.depth
    if args.family == "max":
        f = E.gen_max(props, args.index)
    elif args.family in ("chi", "chi_star"):
        f = E.gen_chi(props, k, args.alpha, args.beta, starred=args.family.endswith("star"))
    elif args.family in ("zeta", "zeta_star"):
        stairs = _stairs_arg(args.stairs, k)
        f = E.gen_zeta(props, k, args.alpha, args.beta, stairs, starred=args.family.endswith("star"))
    elif args.family == "canon":
        f = E.gen_canon(props, k, _stairs_arg(args.stairs, k))
    elif args.family == "canon_prime":
        f = E.gen_canon_prime(props, k, _stairs_arg(args.stairs, k), CN.prime_stair_name(k))
    elif args.family == "scopes":
        names = args.names.split(",") if args.names else _stairs_arg(args.stairs, k)
        f = E.gen_scopes(k, names)
    elif args.family == "quantifier":
        f = E.gen_quantifier(args.kind, args.alpha, _read_formula(args.body))
    else:
        raise ModalTeamError(f"unknown family {args.family!r}")
    _write_out(args.output, F.print_canonical(f))
    return EXIT_TRUE


def cmd_reduce(args):
    machine = R.ATMSpec.load(args.machine)
    f = R.reduce_input(machine, args.input)
    _write_out(args.output, F.print_canonical(f))
    return EXIT_TRUE


def cmd_translate(args):
    if args.kind == "frames":
        f = _read_formula(args.formula)
        k = args.depth if args.depth is not None else f.md
        out = TR.frame_layer_translate(f, k)
    else:
        props = [p for p in args.props.split(",") if p]
        out = TR.strict_rewrite_max(props, args.index)
    _write_out(args.output, F.print_canonical(out))
    return EXIT_TRUE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="modalteam", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="echo the canonical core form of a formula")
    p.add_argument("--formula", required=True, help="file, '-' for stdin, or literal text")

    p = sub.add_parser("check", help="team model checking")
    p.add_argument("--model", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--strict", action="store_true", help="admit strict connectives")

    for name in ("sat", "val"):
        p = sub.add_parser(name, help=f"decide {name} via the canonical model")
        p.add_argument("--formula", required=True)
        p.add_argument("--budget", type=int, default=TY.DEFAULT_BUDGET)
        p.add_argument("--search-limit", type=int, default=CN.DEFAULT_SEARCH_LIMIT)
        p.add_argument("--witness", help="write a witness model (JSON) here")

    p = sub.add_parser("canon", help="emit a canonical model")
    p.add_argument("--props", default="")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--budget", type=int, default=TY.DEFAULT_BUDGET)
    p.add_argument("-o", "--output")

    p = sub.add_parser("staircase", help="emit a staircase model")
    p.add_argument("--props", default="")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--prime", action="store_true")
    p.add_argument("--budget", type=int, default=TY.DEFAULT_BUDGET)
    p.add_argument("-o", "--output")

    p = sub.add_parser("types", help="count (and list) types")
    p.add_argument("--props", default="")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--list", action="store_true")
    p.add_argument("--budget", type=int, default=TY.DEFAULT_BUDGET)

    p = sub.add_parser("bisim", help="point bisimilarity inside one model")
    p.add_argument("--model", required=True)
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--props", default=None)

    p = sub.add_parser("gen", help="emit a formula family member")
    p.add_argument("family", choices=[
        "max", "chi", "chi_star", "zeta", "zeta_star", "canon", "canon_prime", "scopes", "quantifier",
    ])
    p.add_argument("--props", default="")
    p.add_argument("--depth", type=int, default=0)
    p.add_argument("--index", type=int, default=0, help="offset i for max")
    p.add_argument("--alpha", default="a_1")
    p.add_argument("--beta", default="a_2")
    p.add_argument("--stairs", default="", help="comma-separated stair names; default s_0..s_k")
    p.add_argument("--names", default="", help="scope names for the scopes family")
    p.add_argument("--kind", default="exists_sub", choices=E.QUANTIFIER_KINDS)
    p.add_argument("--body", default="top")
    p.add_argument("-o", "--output")

    p = sub.add_parser("reduce", help="machine input to formula")
    p.add_argument("--machine", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("-o", "--output")

    p = sub.add_parser("translate", help="frame-class layering / strict rewrite")
    p.add_argument("kind", choices=["frames", "strict"])
    p.add_argument("--formula", help="for frames")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--props", default="", help="for strict")
    p.add_argument("--index", type=int, default=0, help="for strict")
    p.add_argument("-o", "--output")

    return ap


_DISPATCH = {
    "parse": cmd_parse,
    "check": cmd_check,
    "sat": lambda a: cmd_sat(a, "sat"),
    "val": lambda a: cmd_sat(a, "val"),
    "canon": cmd_canon,
    "staircase": cmd_staircase,
    "types": cmd_types,
    "bisim": cmd_bisim,
    "gen": cmd_gen,
    "reduce": cmd_reduce,
    "translate": cmd_translate,
}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return _DISPATCH[args.command](args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ModalTeamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
