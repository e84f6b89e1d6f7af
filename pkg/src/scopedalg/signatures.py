"""Operation signatures.

An operation arity ``(p | m_1, ..., m_k)`` means the operation consumes the
``p`` innermost open scopes and takes ``k`` continuations, the ``i``-th of
which opens ``m_i`` fresh scopes.  Plain algebraic/scoped signatures are
encoded into this format by :func:`encode_scoped_signature`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

CLOSE = "close"

_NAME_RE = re.compile(r"[A-Za-z0-9_]+\Z")


class SignatureError(ValueError):
    """Raised when a signature violates its construction rules."""


@dataclass(frozen=True)
class ParamArity:
    """Arity ``(params | binders[0], ..., binders[k-1])`` of one operation."""

    params: int
    binders: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.params < 0 or any(m < 0 for m in self.binders):
            raise SignatureError(f"arity components must be naturals: {self}")

    def __str__(self) -> str:
        inner = ",".join(str(m) for m in self.binders) if self.binders else "-"
        return f"({self.params} | {inner})"


@dataclass(frozen=True)
class Signature:
    """A finite map from operation names to parameterized arities.

    Declaration order is preserved; it fixes the deterministic order used by
    term enumeration and rewriting.
    """

    decls: tuple[tuple[str, ParamArity], ...]
    _by_name: dict[str, ParamArity] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        names = [name for name, _ in self.decls]
        dupes = {n for n in names if names.count(n) > 1}
        if dupes:
            raise SignatureError(f"duplicate operation names: {sorted(dupes)}")
        object.__setattr__(self, "_by_name", dict(self.decls))

    @classmethod
    def of(cls, ops: Mapping[str, ParamArity] | Iterable[tuple[str, ParamArity]]) -> Signature:
        items = ops.items() if isinstance(ops, Mapping) else ops
        return cls(tuple(items))

    def arity(self, name: str) -> ParamArity:
        try:
            return self._by_name[name]
        except KeyError:
            raise SignatureError(f"unknown operation {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.decls)


@dataclass(frozen=True)
class ScopedSignature:
    """Separate algebraic and scoped operation names with plain arities."""

    algebraic: tuple[tuple[str, int], ...]
    scoped: tuple[tuple[str, int], ...]

    @classmethod
    def of(cls, algebraic: Mapping[str, int], scoped: Mapping[str, int]) -> ScopedSignature:
        return cls(tuple(algebraic.items()), tuple(scoped.items()))

    def validate(self) -> list[str]:
        report = []
        alg_names = [n for n, _ in self.algebraic]
        sc_names = [n for n, _ in self.scoped]
        seen: set[str] = set()
        for n in alg_names + sc_names:
            if n in seen:
                report.append(f"duplicate operation name {n!r}")
            seen.add(n)
            if not _NAME_RE.match(n):
                report.append(f"malformed operation name {n!r}")
        if CLOSE in seen:
            report.append(f"operation name {CLOSE!r} is reserved for the scope-closing operation")
        for n, k in self.algebraic + self.scoped:
            if k < 0:
                report.append(f"negative arity for {n!r}")
        return report


def encode_scoped_signature(scoped_sig: ScopedSignature) -> Signature:
    """Encode algebraic/scoped operations as a parameterized signature.

    Algebraic ``o : k`` becomes ``o : (0 | 0,...,0)``, scoped ``s : k``
    becomes ``s : (0 | 1,...,1)``, and a single shared ``close : (1 | 0)``
    is appended.
    """
    report = scoped_sig.validate()
    if report:
        raise SignatureError("; ".join(report))
    decls: list[tuple[str, ParamArity]] = []
    for name, k in scoped_sig.algebraic:
        decls.append((name, ParamArity(0, (0,) * k)))
    for name, k in scoped_sig.scoped:
        decls.append((name, ParamArity(0, (1,) * k)))
    decls.append((CLOSE, ParamArity(1, (0,))))
    return Signature(tuple(decls))


def validate_signature(sig: Signature) -> list[str]:
    """Report every invariant violation of a raw signature; empty means valid.

    Duplicate names cannot survive :class:`Signature` construction, so they
    are reported by the parse layer; here we check name well-formedness.
    """
    report = []
    for name, _arity in sig.decls:
        if not _NAME_RE.match(name):
            report.append(f"malformed operation name {name!r}")
    return report
