"""Command-line interface.

Subcommands: ``check`` (well-formedness), ``eq`` (equality search, or model
decision with ``--semantic``), ``normalize`` (normal form via the built-in
model), ``eval`` (value in the built-in model), ``count`` (term count vs.
fixed-point count), ``encode`` (scoped signature to operation arities), and
``genparam`` (equations generated from a scoped operation's semantics).

Exit codes: 0 success/equal/match, 1 violations/unequal/mismatch,
2 unknown, 64 usage, 65 parse error, 70 internal error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from .builtin_models import (
    REIFY_TAGS,
    decide_equal_via_model,
    eval_rho,
    reify,
)
from .equations import Theory, derivably_equal
from .generate import ORACLES, generate_param_theory
from .models import count_fixedpoint, count_free_terms
from .signatures import SignatureError, encode_scoped_signature
from .syntax import (
    ContextDecl,
    ParseError,
    ResolveError,
    parse_context,
    parse_scoped_signature,
    parse_term,
    print_context,
    print_term,
)
from .terms import Judgement, TermError, check_term
from .theories import (
    BUILTIN_THEORY_NAMES,
    EXPLICIT_NONDET,
    builtin_theory,
)

EX_OK = 0
EX_FAIL = 1
EX_UNKNOWN = 2
EX_USAGE = 64
EX_PARSE = 65
EX_INTERNAL = 70


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _load_theory(spec: str) -> Theory:
    if spec in BUILTIN_THEORY_NAMES:
        return builtin_theory(spec)
    path = Path(spec)
    if not path.exists():
        raise UsageError(
            f"--theory {spec!r} is neither a built-in theory "
            f"({', '.join(BUILTIN_THEORY_NAMES)}) nor a file"
        )
    from .theories import theory_from_source

    return theory_from_source(path.read_text())


def _load_scoped_sig(spec: str):
    path = Path(spec)
    if not path.exists():
        raise UsageError(f"--scoped-sig {spec!r}: no such file")
    return parse_scoped_signature(path.read_text())


def _read_term_arg(value: str) -> str:
    return sys.stdin.read() if value == "-" else value


def _parse_at(thy: Theory, ctx: ContextDecl, text: str) -> Judgement:
    return parse_term(_read_term_arg(text), thy.sig, ctx)


def format_value(tag: str, value: Any, level: int = 0) -> str:
    """Render a model value: nested lists, ``e<i>`` markers, ``*``-flagged
    lists, and state values as explicit tables."""
    from .theories import EXCEPTIONS, GLOBAL_STATE, NONDET_CUT, STATE_LOCAL, STATE_LOCAL_NOCLOSE

    if tag == EXCEPTIONS:
        return str(value)
    if tag == NONDET_CUT:
        def cut(v: Any, n: int) -> str:
            if n < 0:
                return str(v)
            inner = ", ".join(cut(x, n - 1) for x in v.items)
            return f"[{inner}]" + ("*" if v.star else "")

        return cut(value, level)
    if tag in (STATE_LOCAL, GLOBAL_STATE):
        def state(v: Any, n: int) -> str:
            if n == 0:
                (g0, b0), (g1, b1) = v
                return "{0 -> (%s, %s), 1 -> (%s, %s)}" % (g0, b0, g1, b1)
            return "{0 -> %s, 1 -> %s}" % (state(v[0], n - 1), state(v[1], n - 1))

        return state(value, level)
    if tag == STATE_LOCAL_NOCLOSE:
        def state_prime(v: Any, n: int) -> str:
            if n == 0:
                (g0, b0), (g1, b1) = v
                return "{0 -> (%s, %s), 1 -> (%s, %s)}" % (g0, b0, g1, b1)
            (v0, s0), (v1, s1) = v
            return "{0 -> (%s, %s), 1 -> (%s, %s)}" % (
                state_prime(v0, n - 1), s0, state_prime(v1, n - 1), s1,
            )

        return state_prime(value, level)

    def lists(v: Any, n: int) -> str:
        if n < 0:
            return str(v)
        return "[" + ", ".join(lists(x, n - 1) for x in v) + "]"

    return lists(value, level)


def _print_trace(thy: Theory, trace) -> None:
    for i, step in enumerate(trace.steps):
        eqn = thy.eqns[step.eqn_index]
        label = eqn.label or f"equation {step.eqn_index}"
        direction = "forward" if step.forward else "backward"
        pos = ".".join(map(str, step.position)) or "root"
        print(f"  {i + 1}. {label} ({direction}) at {pos}")


def _cmd_check(args: argparse.Namespace) -> int:
    thy = _load_theory(args.theory)
    ctx = parse_context(args.ctx)
    try:
        _parse_at(thy, ctx, args.term)
    except ResolveError as exc:
        print(f"VIOLATION: {exc}")
        return EX_FAIL
    print("OK")
    return EX_OK


def _cmd_eq(args: argparse.Namespace) -> int:
    thy = _load_theory(args.theory)
    ctx = parse_context(args.ctx)
    lhs = _parse_at(thy, ctx, args.lhs)
    rhs = _parse_at(thy, ctx, args.rhs)
    if args.semantic:
        if args.theory not in BUILTIN_THEORY_NAMES:
            raise UsageError("--semantic requires a built-in theory")
        if any(m != 0 for m in ctx.arities) or ctx.depth != 0:
            raise UsageError("--semantic requires a truncated context and no open scopes")
        if decide_equal_via_model(args.theory, lhs, rhs, ctx.var_names):
            print("EQUAL")
            return EX_OK
        print("UNEQUAL")
        return EX_FAIL
    trace = derivably_equal(thy, lhs, rhs, args.steps)
    if trace is None:
        print("UNKNOWN")
        return EX_UNKNOWN
    print(f"EQUAL in {len(trace.steps)} step(s)")
    _print_trace(thy, trace)
    return EX_OK


def _require_reify_tag(name: str) -> None:
    if name not in REIFY_TAGS:
        raise UsageError(f"--theory must be one of: {', '.join(REIFY_TAGS)}")


def _cmd_normalize(args: argparse.Namespace) -> int:
    _require_reify_tag(args.theory)
    thy = builtin_theory(args.theory)
    ctx = parse_context(args.ctx)
    if any(m != 0 for m in ctx.arities):
        raise UsageError("normalization requires a truncated context (all arities 0)")
    j = _parse_at(thy, ctx, args.term)
    value = eval_rho(args.theory, j, ctx.var_names)
    nf = reify(args.theory, value, ctx.depth, ctx.var_names)
    names = tuple(sorted(ctx.var_names, key=lambda t: (str(t), repr(t))))
    print(print_term(thy.sig, nf, names))
    return EX_OK


def _cmd_eval(args: argparse.Namespace) -> int:
    if args.theory not in BUILTIN_THEORY_NAMES:
        raise UsageError(f"--theory must be one of: {', '.join(BUILTIN_THEORY_NAMES)}")
    thy = builtin_theory(args.theory)
    ctx = parse_context(args.ctx)
    if any(m != 0 for m in ctx.arities):
        raise UsageError("evaluation requires a truncated context (all arities 0)")
    j = _parse_at(thy, ctx, args.term)
    value = eval_rho(args.theory, j, ctx.var_names)
    print(format_value(args.theory, value, ctx.depth))
    return EX_OK


def _cmd_count(args: argparse.Namespace) -> int:
    scoped = _load_scoped_sig(args.scoped_sig)
    free = count_free_terms(scoped, args.gens, args.level, args.depth)
    fixed = count_fixedpoint(scoped, args.gens, args.level, args.depth)
    print(f"terms:    {free}")
    print(f"fixpoint: {fixed}")
    if free == fixed:
        print("MATCH")
        return EX_OK
    print("MISMATCH")
    return EX_FAIL


def _cmd_encode(args: argparse.Namespace) -> int:
    scoped = _load_scoped_sig(args.scoped_sig)
    sig = encode_scoped_signature(scoped)
    for name, arity in sig.decls:
        print(f"op {name} : {arity}")
    return EX_OK


def _cmd_genparam(args: argparse.Namespace) -> int:
    oracle = ORACLES[args.sc]
    thy = generate_param_theory(args.base, args.sc, 1, oracle, args.vars, args.size)
    base_count = len(builtin_theory(args.base).eqns)
    for eqn in thy.eqns[base_count:]:
        names = tuple(f"x{i + 1}" for i in range(len(eqn.ctx)))
        ctx_text = print_context(names, eqn.ctx, ())
        lhs = print_term(thy.sig, Judgement(eqn.ctx, eqn.depth, eqn.lhs), names)
        rhs = print_term(thy.sig, Judgement(eqn.ctx, eqn.depth, eqn.rhs), names)
        print(f"eq {ctx_text} |- {lhs} = {rhs}")
    return EX_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="scopedalg", description=__doc__)
    parser.add_argument("--seed", type=int, default=0, help="seed for sampled enumerations")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="check a term against a theory and context")
    p.add_argument("--theory", required=True)
    p.add_argument("--ctx", required=True)
    p.add_argument("--term", required=True)
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("eq", help="search for a derivation of an equality")
    p.add_argument("--theory", required=True)
    p.add_argument("--ctx", required=True)
    p.add_argument("--lhs", required=True)
    p.add_argument("--rhs", required=True)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--semantic", action="store_true", help="decide via the built-in model")
    p.set_defaults(fn=_cmd_eq)

    p = sub.add_parser("normalize", help="print the normal form of a term")
    p.add_argument("--theory", required=True, choices=list(REIFY_TAGS))
    p.add_argument("--ctx", required=True)
    p.add_argument("--term", required=True)
    p.set_defaults(fn=_cmd_normalize)

    p = sub.add_parser("eval", help="print the model value of a term")
    p.add_argument("--theory", required=True)
    p.add_argument("--ctx", required=True)
    p.add_argument("--term", required=True)
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("count", help="compare term and fixed-point counts")
    p.add_argument("--scoped-sig", required=True, dest="scoped_sig")
    p.add_argument("--gens", type=int, required=True)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.set_defaults(fn=_cmd_count)

    p = sub.add_parser("encode", help="encode a scoped signature")
    p.add_argument("--scoped-sig", required=True, dest="scoped_sig")
    p.set_defaults(fn=_cmd_encode)

    p = sub.add_parser("genparam", help="generate equations from a scoped operation")
    p.add_argument("--base", required=True, choices=[EXPLICIT_NONDET])
    p.add_argument("--sc", required=True, choices=sorted(ORACLES))
    p.add_argument("--vars", type=int, required=True)
    p.add_argument("--size", type=int, required=True)
    p.set_defaults(fn=_cmd_genparam)

    return parser


def run(argv: Sequence[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EX_USAGE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EX_PARSE
    except (TermError, SignatureError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_INTERNAL


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
