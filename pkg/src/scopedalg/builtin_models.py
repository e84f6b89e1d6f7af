"""Semantic counterparts of the built-in theories.

Each built-in theory has a concrete model over a truncated generator family
whose elements double as normal forms:

* nondeterminism with once -- level ``n`` holds ``(n+1)``-fold nested tuples
  over the generators; choice concatenates, closing wraps a singleton, and
  ``once`` takes the head;
* exceptions -- level ``n`` holds a generator or a marker ``e_i`` (``i <=
  n``) recording how many scopes the exception escapes; closing is the
  identity on payloads;
* state with locals -- level ``n`` holds an ``(n+1)``-fold iterated function
  of the single bit, extensionally as nested pairs indexed by the state
  value; the primed variant (without the put/close law) additionally records
  the bit at each closed scope;
* nondeterminism with cut -- as once, but every list layer carries an
  optional star marking pruned choices.

``reify`` produces the normal-form term of a value, ``eval_rho`` interprets
a term over truncated generators back into the model, and their round trips
witness that these models are the free ones.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product
from typing import Any, Callable, Optional, Sequence

from . import theories
from .models import GradedCarrier, SigmaStructure, interpret
from .signatures import CLOSE, Signature
from .terms import App, Judgement, Term, TermError, Var, check_term, enumerate_terms
from .theories import (
    EXCEPTIONS,
    EXPLICIT_NONDET,
    GLOBAL_STATE,
    NONDET_CUT,
    NONDET_ONCE,
    STATE_LOCAL,
    STATE_LOCAL_NOCLOSE,
    builtin_theory,
)


@dataclass(frozen=True)
class Marker:
    """Exception escaping to level ``index``: closes scopes down to it, then
    throws.  The marker survives `close` unchanged, so payloads are shared
    across levels."""

    index: int

    def __str__(self) -> str:
        return f"e{self.index}"


@dataclass(frozen=True)
class CutList:
    """A list layer, starred when the remaining choices are pruned."""

    items: tuple[Any, ...]
    star: bool = False

    def __str__(self) -> str:
        inner = ", ".join(str(x) for x in self.items)
        return f"[{inner}]*" if self.star else f"[{inner}]"


def _list_layers(
    carrier: GradedCarrier,
    n: int,
    base: tuple[Any, ...],
    length_cap: int,
    level_budget: int,
    extra_long: int,
    seed: int,
    wrap: Callable[[tuple[Any, ...]], Any] = lambda xs: xs,
    star_variants: bool = False,
) -> list[Any]:
    """Enumerate one list level over ``base`` or the previous level: all
    lists up to ``length_cap`` when that fits the budget, otherwise a seeded
    sample, plus a few seeded lists one beyond the cap."""
    lower = base if n == 0 else carrier.at_level(n - 1)
    rng = random.Random(seed * 7_919 + n)
    lists: list[tuple[Any, ...]] = []
    total = sum(len(lower) ** k for k in range(length_cap + 1))
    if total <= level_budget:
        for k in range(length_cap + 1):
            lists.extend(product(lower, repeat=k))
    else:
        seen: set[tuple[Any, ...]] = {()}
        lists.append(())
        for x in lower[: max(0, min(len(lower), level_budget // 4))]:
            item = (x,)
            if item not in seen:
                seen.add(item)
                lists.append(item)
        while len(lists) < level_budget and lower:
            k = rng.randint(0, length_cap)
            item = tuple(lower[rng.randrange(len(lower))] for _ in range(k))
            if item not in seen:
                seen.add(item)
                lists.append(item)
    if lower:
        for _ in range(extra_long):
            lists.append(
                tuple(lower[rng.randrange(len(lower))] for _ in range(length_cap + 1))
            )
    deduped: list[tuple[Any, ...]] = []
    seen2: set[tuple[Any, ...]] = set()
    for item in lists:
        if item not in seen2:
            seen2.add(item)
            deduped.append(item)
    if star_variants:
        out: list[Any] = []
        for item in deduped:
            out.append(wrap(item))
        for item in deduped:
            starred = CutList(item, True)
            out.append(starred)
        return out
    return [wrap(item) for item in deduped]


def model_once(
    gens: Sequence[Any],
    length_cap: int = 3,
    level_budget: int = 400,
    extra_long: int = 2,
    seed: int = 0,
) -> SigmaStructure:
    """The list model of nondeterminism with once."""
    base = tuple(gens)

    def build(carrier: GradedCarrier, n: int) -> list[Any]:
        return _list_layers(carrier, n, base, length_cap, level_budget, extra_long, seed)

    ops = {
        "or": lambda n, a: a[0] + a[1],
        "fail": lambda n, a: (),
        CLOSE: lambda n, a: (a[0],),
        "once": lambda n, a: a[0][0] if a[0] else (),
    }
    return SigmaStructure(
        builtin_theory(NONDET_ONCE).sig, GradedCarrier(build, "once"), ops, NONDET_ONCE
    )


def model_catch(gens: Sequence[Any]) -> SigmaStructure:
    """The generators-plus-markers model of exception catching."""
    base = tuple(gens)

    def build(_carrier: GradedCarrier, n: int) -> list[Any]:
        return list(base) + [Marker(i) for i in range(n + 1)]

    def catch(n: int, a: tuple) -> Any:
        first, second = a
        if first != Marker(n + 1):
            return first
        if second != Marker(n + 1):
            return second
        return Marker(n)

    ops = {
        "throw": lambda n, a: Marker(n),
        CLOSE: lambda n, a: a[0],
        "catch": catch,
    }
    return SigmaStructure(
        builtin_theory(EXCEPTIONS).sig, GradedCarrier(build, "catch"), ops, EXCEPTIONS
    )


def _pair_levels(
    carrier: GradedCarrier,
    n: int,
    level0: tuple[Any, ...],
    level_budget: int,
    seed: int,
    entry: Callable[[Any, int, random.Random], Any],
) -> list[Any]:
    """Enumerate functions out of the bit as pairs ``(f(0), f(1))``."""
    if n == 0:
        return list(level0)
    lower = carrier.at_level(n - 1)
    rng = random.Random(seed * 31_337 + n)
    entries = [entry(v, s, rng) for v in lower for s in (0, 1)]
    distinct: list[Any] = []
    seen: set[Any] = set()
    for e in entries:
        if e not in seen:
            seen.add(e)
            distinct.append(e)
    if len(distinct) ** 2 <= level_budget:
        return [tuple(pair) for pair in product(distinct, repeat=2)]
    out: list[Any] = []
    seen_pairs: set[Any] = set()
    while len(out) < level_budget:
        pair = (
            distinct[rng.randrange(len(distinct))],
            distinct[rng.randrange(len(distinct))],
        )
        if pair not in seen_pairs:
            seen_pairs.add(pair)
            out.append(pair)
    return out


def _state_level0(gens: Sequence[Any]) -> tuple[Any, ...]:
    cells = [(g, b) for g in gens for b in (0, 1)]
    return tuple(product(cells, repeat=2))


def model_state(gens: Sequence[Any], level_budget: int = 512, seed: int = 0) -> SigmaStructure:
    """The iterated state-function model of state with locals.

    A value at level ``n+1`` maps the state at scope entry to a value one
    level down; closing a scope discards the scope's final state, so the
    outer state is restored structurally.
    """
    level0 = _state_level0(gens)

    def build(carrier: GradedCarrier, n: int) -> list[Any]:
        return _pair_levels(carrier, n, level0, level_budget, seed, lambda v, _s, _r: v)

    ops = {
        "put_0": lambda n, a: (a[0][0], a[0][0]),
        "put_1": lambda n, a: (a[0][1], a[0][1]),
        "get": lambda n, a: (a[0][0], a[1][1]),
        CLOSE: lambda n, a: (a[0], a[0]),
        "local_0": lambda n, a: a[0][0],
        "local_1": lambda n, a: a[0][1],
    }
    return SigmaStructure(
        builtin_theory(STATE_LOCAL).sig, GradedCarrier(build, "state"), ops, STATE_LOCAL
    )


def model_state_prime(gens: Sequence[Any], level_budget: int = 512, seed: int = 0) -> SigmaStructure:
    """The state model without the put/close law: each closed scope also
    records its final bit, so a put just before closing stays observable."""
    level0 = _state_level0(gens)

    def build(carrier: GradedCarrier, n: int) -> list[Any]:
        return _pair_levels(
            carrier, n, level0, level_budget, seed, lambda v, s, _r: (v, s)
        )

    ops = {
        "put_0": lambda n, a: (a[0][0], a[0][0]),
        "put_1": lambda n, a: (a[0][1], a[0][1]),
        "get": lambda n, a: (a[0][0], a[1][1]),
        CLOSE: lambda n, a: ((a[0], 0), (a[0], 1)),
        "local_0": lambda n, a: a[0][0][0],
        "local_1": lambda n, a: a[0][1][0],
    }
    return SigmaStructure(
        builtin_theory(STATE_LOCAL_NOCLOSE).sig,
        GradedCarrier(build, "state_prime"),
        ops,
        STATE_LOCAL_NOCLOSE,
    )


def model_cut(
    gens: Sequence[Any],
    length_cap: int = 3,
    level_budget: int = 400,
    extra_long: int = 2,
    seed: int = 0,
) -> SigmaStructure:
    """The starred-list model of nondeterminism with cut."""
    base = tuple(gens)

    def build(carrier: GradedCarrier, n: int) -> list[Any]:
        return _list_layers(
            carrier,
            n,
            base,
            length_cap,
            level_budget,
            extra_long,
            seed,
            wrap=lambda items: CutList(items, False),
            star_variants=True,
        )

    def or_(n: int, a: tuple) -> CutList:
        u, v = a
        if u.star:
            return u
        return CutList(u.items + v.items, v.star)

    def scope(n: int, a: tuple) -> CutList:
        result = CutList((), False)
        for item in reversed(a[0].items):
            result = or_(n, (item, result))
        return result

    ops = {
        "or": or_,
        "fail": lambda n, a: CutList((), False),
        "cut": lambda n, a: CutList(a[0].items, True),
        "scope": scope,
        CLOSE: lambda n, a: CutList((a[0],), False),
    }
    return SigmaStructure(
        builtin_theory(NONDET_CUT).sig, GradedCarrier(build, "cut"), ops, NONDET_CUT
    )


# level-0 base: cut lists hold generators, not CutLists
def _cut_base(gens: Sequence[Any]) -> tuple[Any, ...]:
    return tuple(gens)


_MODEL_BUILDERS: dict[str, Callable[..., SigmaStructure]] = {
    NONDET_ONCE: model_once,
    EXCEPTIONS: model_catch,
    STATE_LOCAL: model_state,
    STATE_LOCAL_NOCLOSE: model_state_prime,
    NONDET_CUT: model_cut,
    # algebraic bases evaluate in the model of their scoped extension
    EXPLICIT_NONDET: model_once,
    GLOBAL_STATE: model_state,
}

REIFY_TAGS = (NONDET_ONCE, EXCEPTIONS, STATE_LOCAL, NONDET_CUT)


def model_for(tag: str, gens: Sequence[Any], **kwargs: Any) -> SigmaStructure:
    try:
        builder = _MODEL_BUILDERS[tag]
    except KeyError:
        raise KeyError(f"no model for theory {tag!r}") from None
    return builder(gens, **kwargs)


def unit_value(tag: str, token: Any) -> Any:
    """The image of a generator under the unit of the model's monad."""
    if tag in (NONDET_ONCE, NONDET_CUT, EXPLICIT_NONDET):
        v: Any = (token,)
        return CutList(v, False) if tag == NONDET_CUT else v
    if tag == EXCEPTIONS:
        return token
    if tag in (STATE_LOCAL, STATE_LOCAL_NOCLOSE, GLOBAL_STATE):
        return ((token, 0), (token, 1))
    raise KeyError(f"no unit for theory {tag!r}")


def eval_rho(tag: str, j: Judgement, gens: Sequence[Any], model: Optional[SigmaStructure] = None) -> Any:
    """Interpret a judgement over truncated generators in the built-in model.

    ``gens[i]`` names the ``i``-th context variable; all variables must have
    arity 0 (no generator may hold scopes open).
    """
    if any(m != 0 for m in j.ctx):
        raise TermError("evaluation requires a truncated context (all arities 0)")
    if len(gens) != len(j.ctx):
        raise TermError(f"{len(gens)} generator(s) for {len(j.ctx)} variable(s)")
    m = model if model is not None else model_for(tag, gens)
    env = tuple(unit_value(tag, tok) for tok in gens)
    return interpret(m, j, 0, env)


def decide_equal_via_model(tag: str, lhs: Judgement, rhs: Judgement, gens: Sequence[Any]) -> bool:
    """Decide derivable equality of truncated-context judgements by
    comparing their values in the free model."""
    if lhs.ctx != rhs.ctx or lhs.depth != rhs.depth:
        raise TermError("both sides must share context and depth")
    m = model_for(tag, gens)
    return eval_rho(tag, lhs, gens, m) == eval_rho(tag, rhs, gens, m)


# ---------------------------------------------------------------------------
# Reification: values to normal-form terms

def _canonical_gens(gens: Sequence[Any]) -> tuple[Any, ...]:
    return tuple(sorted(gens, key=lambda t: (str(t), repr(t))))


def reify(tag: str, value: Any, level: int, gens: Sequence[Any]) -> Judgement:
    """The normal-form term denoting ``value`` at the given level, over a
    canonical context with one arity-0 variable per generator (sorted)."""
    tokens = _canonical_gens(gens)
    index = {tok: i for i, tok in enumerate(tokens)}
    ctx = (0,) * len(tokens)

    def var(tok: Any) -> Term:
        try:
            return Var(index[tok])
        except KeyError:
            raise TermError(f"value mentions unknown generator {tok!r}") from None

    if tag == NONDET_ONCE:
        def rec(n: int, v: Any) -> Term:
            if not isinstance(v, tuple):
                raise TermError(f"malformed list value {v!r}")
            if v == ():
                return App("fail")
            head = var(v[0]) if n == 0 else App(CLOSE, (rec(n - 1, v[0]),))
            return App("or", (head, rec(n, v[1:])))

        term = rec(level, value)
    elif tag == EXCEPTIONS:
        if isinstance(value, Marker):
            if not 0 <= value.index <= level:
                raise TermError(f"marker {value} out of range at level {level}")
            term = App("throw")
            for _ in range(level - value.index):
                term = App(CLOSE, (term,))
        else:
            term = var(value)
            for _ in range(level):
                term = App(CLOSE, (term,))
    elif tag == STATE_LOCAL:
        def rec(n: int, v: Any) -> Term:
            if n == 0:
                (g0, b0), (g1, b1) = v
                return App(
                    "get",
                    (App(f"put_{b0}", (var(g0),)), App(f"put_{b1}", (var(g1),))),
                )
            return App(
                "get",
                (
                    App(CLOSE, (rec(n - 1, v[0]),)),
                    App(CLOSE, (rec(n - 1, v[1]),)),
                ),
            )

        term = rec(level, value)
    elif tag == NONDET_CUT:
        def rec(n: int, v: CutList) -> Term:
            if not isinstance(v, CutList):
                raise TermError(f"malformed cut value {v!r}")
            if v.star:
                return App("cut", (rec(n, CutList(v.items, False)),))
            if v.items == ():
                return App("fail")
            head_v, rest = v.items[0], CutList(v.items[1:], False)
            head = var(head_v) if n == 0 else App(CLOSE, (rec(n - 1, head_v),))
            return App("or", (head, rec(n, rest)))

        term = rec(level, value)
    else:
        raise KeyError(f"no normal forms for theory {tag!r}")

    sig = builtin_theory(tag).sig
    return Judgement.checked(sig, ctx, level, term)


def roundtrip_check(
    tag: str,
    level_bound: int,
    size_budget: int,
    gens: Sequence[Any],
    **model_kwargs: Any,
) -> list[str]:
    """Verify both round trips between values and normal forms.

    Evaluation after reification must be the identity on every enumerated
    value at levels up to ``level_bound``; reification after evaluation must
    be the identity up to model equality on every enumerated term within
    ``size_budget``.  Returns a report of failures (empty = verified).
    """
    tokens = _canonical_gens(gens)
    m = model_for(tag, tokens, **model_kwargs)
    sig = m.sig
    report: list[str] = []
    for n in range(level_bound + 1):
        for v in m.carrier.at_level(n):
            j = reify(tag, v, n, tokens)
            back = eval_rho(tag, j, tokens, m)
            if back != v:
                report.append(f"eval(reify({v})) = {back} at level {n}")
    ctx = (0,) * len(tokens)
    for n in range(level_bound + 1):
        for t in enumerate_terms(sig, ctx, n, size_budget):
            j = Judgement(ctx, n, t)
            v = eval_rho(tag, j, tokens, m)
            nf = reify(tag, v, n, tokens)
            if eval_rho(tag, nf, tokens, m) != v:
                report.append(f"reify(eval(t)) differs from t at level {n}: {t}")
    return report


def state_models_agree(term_size_bound: int, a_size: int, max_vars: int = 2) -> list[str]:
    """Check that the two state models interpret every scope-free term the
    same way at level 0, over all environments."""
    tokens = tuple(f"g{i}" for i in range(a_size))
    ms = model_state(tokens)
    mp = model_state_prime(tokens)
    sig = builtin_theory(STATE_LOCAL).sig
    level0 = ms.carrier.at_level(0)
    report: list[str] = []
    for nv in range(max_vars + 1):
        ctx = (0,) * nv
        for t in enumerate_terms(sig, ctx, 0, term_size_bound):
            j = Judgement(ctx, 0, t)
            for env in product(level0, repeat=nv):
                if interpret(ms, j, 0, env) != interpret(mp, j, 0, env):
                    report.append(f"disagreement on {t} with env {env}")
                    break
    return report
