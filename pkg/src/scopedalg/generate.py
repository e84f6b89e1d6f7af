"""Generating a theory for an arbitrary scoped operation over a base theory.

Given an algebraic base theory whose monad supports a scoped operation
(described semantically by an oracle on base values), the generated theory
extends the encoded signature with the scoped operation and adds, for every
small tuple of base terms, the instance equation

    sc(a. t_1[close(a,x_i)/x_i], ..., a. t_k[close(a,x_i)/x_i]) = t'

where ``t'`` denotes the oracle's result on the values of ``t_1..t_k``.
The full theory has one equation per tuple of base-equality classes, which
is infinite; generation enumerates one canonical representative per class,
up to explicit bounds on the number of variables and the term size.
"""

from __future__ import annotations

from typing import Any, Callable, Sequence

from .builtin_models import eval_rho
from .equations import Equation, Theory
from .signatures import CLOSE, ScopedSignature, encode_scoped_signature
from .terms import App, Judgement, Var, enumerate_terms, substitute
from .theories import EXPLICIT_NONDET, builtin_theory

Oracle = Callable[[tuple[Any, ...]], Any]


class OracleError(ValueError):
    """The oracle produced a value with no enumerated representative."""


def once_oracle(values: tuple[Any, ...]) -> Any:
    """Keep the first choice: the scoped behaviour of ``once`` on lists."""
    return values[0][:1]


def scope_oracle(values: tuple[Any, ...]) -> Any:
    """Transparent scope: closing wraps each choice, the scope flattens."""
    return values[0]


ORACLES: dict[str, Oracle] = {"once": once_oracle, "scope": scope_oracle}


def generate_param_theory(
    base: str,
    scoped_name: str,
    scoped_arity: int,
    semantic_oracle: Oracle,
    var_count_bound: int,
    size_bound: int,
) -> Theory:
    """Generate the theory of one scoped operation over an algebraic base.

    Tuples of base terms are enumerated over canonical representatives: for
    each value of the base's free model (realized by terms of size at most
    ``size_bound`` over up to ``var_count_bound`` variables), the first term
    in enumeration order denotes its equality class.  The oracle must map
    represented values to represented values.
    """
    if base != EXPLICIT_NONDET:
        raise ValueError(f"unsupported base theory {base!r}")
    base_thy = builtin_theory(base)
    if scoped_name in base_thy.sig or scoped_name == CLOSE:
        raise ValueError(f"scoped operation name {scoped_name!r} collides with the base")
    scoped_sig = ScopedSignature(
        tuple((name, len(ar.binders)) for name, ar in base_thy.sig.decls),
        ((scoped_name, scoped_arity),),
    )
    sig = encode_scoped_signature(scoped_sig)
    eqns: list[Equation] = list(base_thy.eqns)
    for n in range(var_count_bound + 1):
        ctx = (0,) * n
        tokens = tuple(f"x{i + 1}" for i in range(n))
        reps: dict[Any, Any] = {}
        for t in enumerate_terms(base_thy.sig, ctx, 0, size_bound):
            value = eval_rho(EXPLICIT_NONDET, Judgement(ctx, 0, t), tokens)
            reps.setdefault(value, t)
        closers = [App(CLOSE, (Var(i),)) for i in range(n)]
        values = list(reps)
        if not values and scoped_arity > 0:
            continue
        index = [0] * scoped_arity
        while True:
            tup = tuple(values[i] for i in index)
            out_value = semantic_oracle(tup)
            if out_value not in reps:
                raise OracleError(
                    f"oracle result {out_value!r} has no representative within "
                    f"size {size_bound} over {n} variable(s)"
                )
            bodies = tuple(
                substitute(sig, Judgement(ctx, 0, reps[v]), ctx, 1, closers).term
                for v in tup
            )
            eqns.append(
                Equation(
                    ctx,
                    0,
                    App(scoped_name, bodies),
                    reps[out_value],
                    label=f"{scoped_name}-generated-n{n}",
                )
            )
            for pos in reversed(range(scoped_arity)):
                index[pos] += 1
                if index[pos] < len(values):
                    break
                index[pos] = 0
            else:
                break
    return Theory.checked(sig, tuple(eqns))
