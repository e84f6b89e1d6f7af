"""Nameless terms and the non-commutative linear scope discipline.

A term is judged against a context of computation variables (each annotated
with the number of open scopes it consumes) and a *stack depth*: the number
of currently open scopes.  Scope names never appear in terms; because scopes
close in LIFO order, the stack of open scopes is fully described by its
depth, and an operation consuming ``p`` scopes always consumes the ``p``
innermost ones.

The rules enforced by :func:`check_term`:

* ``Var(i)`` is well-formed at depth ``d`` iff ``ctx[i] == d`` (a variable
  consumes its entire ambient stack);
* ``App(op, conts)`` with ``op : (p | m_1..m_k)`` is well-formed at depth
  ``d`` iff ``d >= p``, ``len(conts) == k`` and ``conts[i]`` is well-formed
  at depth ``d - p + m_i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence, Union

from .signatures import Signature

CompContext = tuple[int, ...]
Position = tuple[int, ...]


class TermError(ValueError):
    """Raised for ill-formed terms, judgements, or substitutions."""


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class App:
    op: str
    conts: tuple["Term", ...] = ()


Term = Union[Var, App]


def term_size(t: Term) -> int:
    """Number of operation applications in ``t`` (variables are size 0)."""
    if isinstance(t, Var):
        return 0
    return 1 + sum(term_size(c) for c in t.conts)


def check_term(sig: Signature, ctx: CompContext, depth: int, t: Term) -> list[str]:
    """Return a report of rule violations; empty iff ``t`` is well-formed."""
    report: list[str] = []

    def go(t: Term, d: int, pos: Position) -> None:
        where = ".".join(map(str, pos)) or "root"
        if isinstance(t, Var):
            if not 0 <= t.index < len(ctx):
                report.append(f"at {where}: variable index {t.index} out of context")
            elif ctx[t.index] != d:
                report.append(
                    f"at {where}: variable of arity {ctx[t.index]} used at depth {d}"
                )
            return
        if t.op not in sig:
            report.append(f"at {where}: unknown operation {t.op!r}")
            return
        ar = sig.arity(t.op)
        if d < ar.params:
            report.append(
                f"at {where}: {t.op} consumes {ar.params} scope(s) but only {d} open"
            )
            return
        if len(t.conts) != len(ar.binders):
            report.append(
                f"at {where}: {t.op} expects {len(ar.binders)} continuation(s), got {len(t.conts)}"
            )
            return
        for i, (c, m) in enumerate(zip(t.conts, ar.binders)):
            go(c, d - ar.params + m, pos + (i,))

    go(t, depth, ())
    return report


@dataclass(frozen=True)
class Judgement:
    """A term together with the context and stack depth it is judged at."""

    ctx: CompContext
    depth: int
    term: Term

    @classmethod
    def checked(cls, sig: Signature, ctx: Sequence[int], depth: int, term: Term) -> Judgement:
        ctx = tuple(ctx)
        report = check_term(sig, ctx, depth, term)
        if report:
            raise TermError("; ".join(report))
        return cls(ctx, depth, term)


def graft(t: Term, args: Sequence[Term]) -> Term:
    """Replace every ``Var(i)`` leaf of ``t`` by ``args[i]``."""
    if isinstance(t, Var):
        return args[t.index]
    return App(t.op, tuple(graft(c, args) for c in t.conts))


def substitute(
    sig: Signature,
    target: Judgement,
    outer_ctx: Sequence[int],
    outer_depth: int,
    args: Sequence[Term],
) -> Judgement:
    """Simultaneous substitution of ``args`` for the variables of ``target``.

    ``args[i]`` must be well-formed at ``(outer_ctx, outer_depth + m_i)``
    where ``m_i = target.ctx[i]``.  In the nameless representation the
    substitution is a literal graft: a variable leaf sits under exactly its
    own ``m_i`` innermost scopes, so re-pointing of consumed scopes is
    implicit.  The result is judged at ``(outer_ctx, outer_depth +
    target.depth)``.
    """
    outer_ctx = tuple(outer_ctx)
    if len(args) != len(target.ctx):
        raise TermError(
            f"substitution needs {len(target.ctx)} argument(s), got {len(args)}"
        )
    for i, (a, m) in enumerate(zip(args, target.ctx)):
        report = check_term(sig, outer_ctx, outer_depth + m, a)
        if report:
            raise TermError(f"argument {i}: " + "; ".join(report))
    return Judgement(outer_ctx, outer_depth + target.depth, graft(target.term, args))


def weaken(sig: Signature, j: Judgement, extra: int) -> Judgement:
    """Open ``extra`` scopes underneath ``j``: a substitution special case.

    Every variable arity and the depth grow by ``extra``; the nameless term
    is unchanged.
    """
    if extra < 0:
        raise TermError("cannot weaken by a negative number of scopes")
    return Judgement(tuple(m + extra for m in j.ctx), j.depth + extra, j.term)


def _compositions(total: int, k: int) -> Iterator[tuple[int, ...]]:
    """All ways to write ``total`` as an ordered sum of ``k`` naturals."""
    if k == 0:
        if total == 0:
            yield ()
        return
    if k == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, k - 1):
            yield (first,) + rest


def enumerate_terms(
    sig: Signature, ctx: Sequence[int], depth: int, size_bound: int
) -> list[Term]:
    """All well-formed terms at ``(ctx, depth)`` with at most ``size_bound``
    operation applications, ordered by size, then lexicographically by
    operation name, then by children."""
    ctx = tuple(ctx)
    decls = sorted(sig.decls)

    @lru_cache(maxsize=None)
    def exact(d: int, size: int) -> tuple[Term, ...]:
        if size == 0:
            return tuple(Var(i) for i, m in enumerate(ctx) if m == d)
        out: list[Term] = []
        for name, ar in decls:
            if d < ar.params:
                continue
            k = len(ar.binders)
            if k == 0:
                if size == 1:
                    out.append(App(name))
                continue
            for parts in _compositions(size - 1, k):
                pools = [exact(d - ar.params + ar.binders[i], parts[i]) for i in range(k)]
                if any(not pool for pool in pools):
                    continue
                idx = [0] * k
                while True:
                    out.append(App(name, tuple(pools[i][idx[i]] for i in range(k))))
                    for i in reversed(range(k)):
                        idx[i] += 1
                        if idx[i] < len(pools[i]):
                            break
                        idx[i] = 0
                    else:
                        break
        return tuple(out)

    result: list[Term] = []
    for size in range(size_bound + 1):
        result.extend(exact(depth, size))
    return result


def count_terms(sig: Signature, ctx: Sequence[int], depth: int, size_bound: int) -> int:
    """Count the terms :func:`enumerate_terms` would produce, without
    building them.  Independent cross-check for the enumerator."""
    ctx = tuple(ctx)

    @lru_cache(maxsize=None)
    def exact(d: int, size: int) -> int:
        if size == 0:
            return sum(1 for m in ctx if m == d)
        total = 0
        for _name, ar in sig.decls:
            if d < ar.params:
                continue
            k = len(ar.binders)
            if k == 0:
                total += 1 if size == 1 else 0
                continue
            for parts in _compositions(size - 1, k):
                prod = 1
                for i in range(k):
                    prod *= exact(d - ar.params + ar.binders[i], parts[i])
                    if prod == 0:
                        break
                total += prod
        return total

    return sum(exact(depth, size) for size in range(size_bound + 1))


def subterm_at(t: Term, pos: Position) -> Term:
    for i in pos:
        if isinstance(t, Var) or i >= len(t.conts):
            raise TermError(f"position {pos} does not address a subterm")
        t = t.conts[i]
    return t


def replace_at(t: Term, pos: Position, replacement: Term) -> Term:
    if not pos:
        return replacement
    if isinstance(t, Var) or pos[0] >= len(t.conts):
        raise TermError(f"position {pos} does not address a subterm")
    i = pos[0]
    conts = list(t.conts)
    conts[i] = replace_at(conts[i], pos[1:], replacement)
    return App(t.op, tuple(conts))


def positions_with_depth(sig: Signature, t: Term, depth: int) -> Iterator[tuple[Position, Term, int]]:
    """Pre-order walk yielding (position, subterm, local stack depth)."""

    def go(t: Term, d: int, pos: Position) -> Iterator[tuple[Position, Term, int]]:
        yield pos, t, d
        if isinstance(t, App):
            ar = sig.arity(t.op)
            for i, (c, m) in enumerate(zip(t.conts, ar.binders)):
                yield from go(c, d - ar.params + m, pos + (i,))

    yield from go(t, depth, ())
