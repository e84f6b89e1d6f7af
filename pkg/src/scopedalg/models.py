"""Models in level-indexed sets.

A carrier assigns to each level ``n`` a set of abstract computations with
``n`` open scopes.  An operation ``O : (p | m_1..m_k)`` is interpreted, for
every level ``n``, as a function ``X(n+m_1) x ... x X(n+m_k) -> X(n+p)``;
a structure is a model of a theory when every equation denotes the same
function at every level.

This module also provides the free-model operations (unit, bind, strength,
lifting of scoped operations) on syntactic elements over a generator family,
the level-shift functors, and the two independent counting routes whose
agreement witnesses that terms of an encoded scoped signature are exactly
the elements of the corresponding fixed point.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Iterator, Mapping, Optional, Sequence

from .equations import Theory
from .signatures import CLOSE, ScopedSignature, Signature, encode_scoped_signature
from .terms import (
    App,
    Judgement,
    Term,
    TermError,
    Var,
    check_term,
    enumerate_terms,
    graft,
    substitute,
)


class GradedCarrier:
    """A level-indexed family of finite, deterministically enumerable sets.

    Levels are realized lazily and memoized; ``build(carrier, n)`` may
    consult lower levels through the carrier argument.  Realized
    enumerations are checked to be duplicate-free.
    """

    def __init__(self, build: Callable[["GradedCarrier", int], Sequence[Any]], name: str = ""):
        self._build = build
        self.name = name
        self._levels: dict[int, tuple[Any, ...]] = {}

    def at_level(self, n: int) -> tuple[Any, ...]:
        if n < 0:
            raise ValueError("levels are naturals")
        if n not in self._levels:
            self._levels[n] = None  # type: ignore[assignment]
            elems = tuple(self._build(self, n))
            if len(set(elems)) != len(elems):
                raise ValueError(f"carrier {self.name!r} enumerates duplicates at level {n}")
            self._levels[n] = elems
        if self._levels[n] is None:
            raise ValueError(f"carrier {self.name!r} level {n} depends on itself")
        return self._levels[n]


def up(elements: Sequence[Any]) -> GradedCarrier:
    """The carrier concentrated at level 0 (a truncated generator family)."""
    frozen = tuple(elements)
    return GradedCarrier(lambda _c, n: frozen if n == 0 else (), name="up")


def down(carrier: GradedCarrier) -> tuple[Any, ...]:
    """The level-0 part of a carrier."""
    return carrier.at_level(0)


def later(carrier: GradedCarrier) -> GradedCarrier:
    """Shift levels up: empty at level 0, then ``X(n)`` at level ``n+1``."""
    return GradedCarrier(
        lambda _c, n: () if n == 0 else carrier.at_level(n - 1), name=f"later({carrier.name})"
    )


def earlier(carrier: GradedCarrier) -> GradedCarrier:
    """Shift levels down: ``X(n+1)`` at level ``n``."""
    return GradedCarrier(lambda _c, n: carrier.at_level(n + 1), name=f"earlier({carrier.name})")


@dataclass
class SigmaStructure:
    """A carrier with one interpretation function per operation.

    ``ops[name](n, args)`` is the level-``n`` instance, mapping a tuple of
    values at levels ``n + m_i`` to a value at level ``n + p``.  The
    functions must be total on all values at realized levels, including
    values produced by other operations.
    """

    sig: Signature
    carrier: GradedCarrier
    ops: Mapping[str, Callable[[int, tuple], Any]]
    name: str = ""


def interpret(m: SigmaStructure, j: Judgement, offset: int, env: Sequence[Any]) -> Any:
    """Evaluate a judgement at the given level offset and environment.

    ``env[i]`` supplies the value (at level ``offset + j.ctx[i]``) of the
    ``i``-th context variable; the result lives at ``offset + j.depth``.
    """
    if len(env) != len(j.ctx):
        raise TermError(f"environment has {len(env)} entries for {len(j.ctx)} variables")

    def go(t: Term, d: int) -> Any:
        if isinstance(t, Var):
            return env[t.index]
        ar = m.sig.arity(t.op)
        base = d - ar.params
        args = tuple(go(c, base + mi) for c, mi in zip(t.conts, ar.binders))
        return m.ops[t.op](offset + base, args)

    return go(j.term, j.depth)


@dataclass(frozen=True)
class Violation:
    eqn_index: int
    eqn_label: str
    offset: int
    env: tuple[Any, ...]


def _environments(
    pools: Sequence[Sequence[Any]], budget: int, rng: random.Random
) -> Iterator[tuple[Any, ...]]:
    total = 1
    for pool in pools:
        total *= len(pool)
        if total == 0:
            return
    if total <= budget:
        idx = [0] * len(pools)
        while True:
            yield tuple(pool[i] for pool, i in zip(pools, idx))
            for k in reversed(range(len(pools))):
                idx[k] += 1
                if idx[k] < len(pools[k]):
                    break
                idx[k] = 0
            else:
                return
    else:
        for _ in range(budget):
            yield tuple(pool[rng.randrange(len(pool))] for pool in pools)


def check_model(
    m: SigmaStructure,
    thy: Theory,
    max_offset: int,
    env_budget: int = 300,
    seed: int = 0,
) -> list[Violation]:
    """Compare both sides of every equation at offsets ``0..max_offset``.

    Environments are drawn from the carrier's realized enumerations: the
    full product when it fits in ``env_budget``, otherwise a seeded sample
    of that size.  An empty report means the structure is a model on the
    explored fragment.
    """
    violations: list[Violation] = []
    for ei, eqn in enumerate(thy.eqns):
        lhs_j = Judgement(eqn.ctx, eqn.depth, eqn.lhs)
        rhs_j = Judgement(eqn.ctx, eqn.depth, eqn.rhs)
        for n in range(max_offset + 1):
            pools = [m.carrier.at_level(n + mi) for mi in eqn.ctx]
            rng = random.Random(seed * 1_000_003 + ei * 1_009 + n)
            for env in _environments(pools, env_budget, rng):
                if interpret(m, lhs_j, n, env) != interpret(m, rhs_j, n, env):
                    violations.append(Violation(ei, eqn.label, n, env))
                    break  # one witness per (equation, offset) is enough
    return violations


# ---------------------------------------------------------------------------
# Free-model elements

@dataclass(frozen=True)
class DayPair:
    """One summand of the level-wise tensor: a value of ``X(p)`` paired with
    a generator of ``Y(m)``, living at level ``p + m``."""

    left: Any
    right: Any


@dataclass(frozen=True)
class FreeElem:
    """An element of the free model: a term over a fixed generator family.

    ``gens`` lists ``(token, level)`` pairs; position ``i`` is the context
    variable ``Var(i)`` of arity ``level``.  The family is positional: all
    elements over the same family share one context, realizing contexts
    canonically (one variable per generator).
    """

    gens: tuple[tuple[Any, int], ...]
    depth: int
    term: Term

    @property
    def ctx(self) -> tuple[int, ...]:
        return tuple(level for _tok, level in self.gens)

    def judgement(self) -> Judgement:
        return Judgement(self.ctx, self.depth, self.term)

    def tokens(self) -> tuple[Any, ...]:
        return tuple(tok for tok, _level in self.gens)


def free_unit(gens: Sequence[tuple[Any, int]], token: Any) -> FreeElem:
    """The generator ``token`` as a free-model element: a bare variable
    consuming its ``level`` open scopes."""
    gens = tuple(gens)
    for i, (tok, level) in enumerate(gens):
        if tok == token:
            return FreeElem(gens, level, Var(i))
    raise KeyError(f"unknown generator {token!r}")


def free_bind(sig: Signature, elem: FreeElem, k: Callable[[Any], FreeElem]) -> FreeElem:
    """Graft ``k(token)`` at every occurrence of each generator.

    ``k`` must send a level-``m`` generator to an element of depth ``m``
    over one common target family (a level-preserving map into the free
    model); binding is simultaneous substitution at offset 0.
    """
    targets = [k(tok) for tok, _level in elem.gens]
    if targets:
        target_gens = targets[0].gens
        for t in targets:
            if t.gens != target_gens:
                raise TermError("bind targets must share one generator family")
    else:
        target_gens = ()
    for (tok, level), t in zip(elem.gens, targets):
        if t.depth != level:
            raise TermError(
                f"bind target for {tok!r} has depth {t.depth}, expected {level}"
            )
    ctx = tuple(level for _tok, level in target_gens)
    result = substitute(
        sig,
        elem.judgement(),
        ctx,
        0,
        [t.term for t in targets],
    )
    return FreeElem(tuple(target_gens), result.depth, result.term)


def free_strength(left_value: Any, left_level: int, elem: FreeElem) -> FreeElem:
    """Pair a value of ``X(p)`` with an element over ``Y``: generators are
    re-tagged with :class:`DayPair` at levels shifted by ``p`` and the term
    is weakened by ``p`` (a no-op on nameless terms)."""
    if left_level < 0:
        raise ValueError("levels are naturals")
    gens = tuple(
        (DayPair(left_value, tok), level + left_level) for tok, level in elem.gens
    )
    return FreeElem(gens, elem.depth + left_level, elem.term)


def lift_scoped_op(sig: Signature, sc_name: str, args: Sequence[FreeElem]) -> FreeElem:
    """Apply a scoped operation to level-0 free-model elements.

    Each argument is pushed under the new scope by closing it at every
    generator leaf (the leaf-wise ``close`` map), then the scoped operation
    is applied.  Natural in the generator family.
    """
    ar = sig.arity(sc_name)
    if ar.params != 0 or any(m != 1 for m in ar.binders):
        raise TermError(f"{sc_name!r} is not a scoped operation of shape (0 | 1,...,1)")
    if CLOSE not in sig:
        raise TermError(f"signature has no {CLOSE!r} operation")
    if len(args) != len(ar.binders):
        raise TermError(f"{sc_name} expects {len(ar.binders)} argument(s), got {len(args)}")
    if not args:
        return FreeElem((), 0, App(sc_name))
    gens = args[0].gens
    for a in args:
        if a.gens != gens:
            raise TermError("arguments must share one generator family")
        if a.depth != 0 or any(level != 0 for _t, level in a.gens):
            raise TermError("lifting is defined over truncated level-0 elements")
    ctx = args[0].ctx
    closers = [App(CLOSE, (Var(i),)) for i in range(len(ctx))]
    bodies = []
    for a in args:
        wrapped = substitute(sig, a.judgement(), ctx, 1, closers)
        bodies.append(wrapped.term)
    term = App(sc_name, tuple(bodies))
    report = check_term(sig, ctx, 0, term)
    if report:
        raise TermError("; ".join(report))
    return FreeElem(gens, 0, term)


def rename_generators(elem: FreeElem, mapping: Callable[[Any], Any]) -> FreeElem:
    """Rename generator tokens positionally (levels and term unchanged)."""
    return FreeElem(
        tuple((mapping(tok), level) for tok, level in elem.gens), elem.depth, elem.term
    )


# ---------------------------------------------------------------------------
# Counting: enumerated terms vs. the polynomial fixed point

def count_free_terms(scoped_sig: ScopedSignature, a_size: int, level: int, depth_bound: int) -> int:
    """Count well-formed terms of the encoded signature at the given level
    over ``a_size`` level-0 generators, with at most ``depth_bound``
    operation applications, by brute-force enumeration."""
    sig = encode_scoped_signature(scoped_sig)
    ctx = (0,) * a_size
    return len(enumerate_terms(sig, ctx, level, depth_bound))


def count_fixedpoint(scoped_sig: ScopedSignature, a_size: int, level: int, depth_bound: int) -> int:
    """Count elements of the initial fixed point of

        Y  |->  A@0  +  Sum_o Y^ar(o)  +  Sum_s (earlier Y)^ar(s)  +  later Y

    at the given level, with at most ``depth_bound`` constructor layers.
    Computed arithmetically from the signature, without building terms; by
    construction one constructor layer corresponds to one operation
    application, so this count must agree with :func:`count_free_terms`.
    """
    alg = tuple(k for _n, k in scoped_sig.algebraic)
    sc = tuple(k for _n, k in scoped_sig.scoped)

    @lru_cache(maxsize=None)
    def exact(n: int, s: int) -> int:
        if s == 0:
            return a_size if n == 0 else 0
        total = 0
        for k in alg:
            total += tuples(n, k, s - 1)
        for k in sc:
            total += tuples(n + 1, k, s - 1)
        if n >= 1:
            total += exact(n - 1, s - 1)
        return total

    @lru_cache(maxsize=None)
    def tuples(n: int, k: int, s: int) -> int:
        if k == 0:
            return 1 if s == 0 else 0
        if k == 1:
            return exact(n, s)
        return sum(exact(n, i) * tuples(n, k - 1, s - i) for i in range(s + 1))

    return sum(exact(level, s) for s in range(depth_bound + 1))
