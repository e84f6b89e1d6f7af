"""Surface syntax for theories, contexts, and terms.

Scope parameters have names only here: the parser resolves them against the
LIFO stack of open scopes and erases them to the nameless core
representation; the printer regenerates fresh names.  Grammar (whitespace
insensitive, ``#`` comments to end of line)::

    theory  = { decl | eqn } ;
    decl    = "op" IDENT ":" "(" NAT "|" ( "-" | NAT { "," NAT } ) ")" ;
    eqn     = "eq" ctx "|-" term "=" term ;
    ctx     = comps "|" params ;
    comps   = "-" | IDENT ":" NAT { "," IDENT ":" NAT } ;
    params  = "-" | IDENT { "," IDENT } ;
    term    = IDENT [ "(" [ pargs ";" ] conts ")" ] ;
    pargs   = IDENT { "," IDENT } ;            # consumed scopes, innermost last
    conts   = cont { "," cont } ;
    cont    = [ IDENT { IDENT } "." ] term ;   # bound scope names, then body

Scoped-signature files use one declaration per line::

    algebraic IDENT : NAT
    scoped IDENT : NAT
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .signatures import ParamArity, ScopedSignature, Signature, SignatureError
from .terms import App, CompContext, Judgement, Term, TermError, Var, check_term


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class ResolveError(ParseError):
    """A grammatical term that violates naming or the scope discipline."""


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, PUNCT, EOF
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>\#[^\n]*)
      | (?P<ident>[A-Za-z0-9_]+)
      | (?P<punct>\|\-|[(),;.:|=\-])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}", line, col)
        lexeme = m.group(0)
        if m.lastgroup == "ident":
            tokens.append(Token("IDENT", lexeme, line, col))
        elif m.lastgroup == "punct":
            tokens.append(Token("PUNCT", lexeme, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        i = m.end()
    tokens.append(Token("EOF", "", line, col))
    return tokens


@dataclass
class _Cursor:
    tokens: list[Token]
    pos: int = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.text != text or tok.kind == "EOF":
            raise ParseError(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok.line, tok.column)
        return self.next()

    def ident(self, what: str = "identifier") -> Token:
        tok = self.peek()
        if tok.kind != "IDENT":
            raise ParseError(f"expected {what}, found {tok.text or 'end of input'!r}", tok.line, tok.column)
        return self.next()

    def nat(self) -> int:
        tok = self.ident("natural number")
        if not tok.text.isdigit():
            raise ParseError(f"expected natural number, found {tok.text!r}", tok.line, tok.column)
        return int(tok.text)


# Surface terms keep scope-parameter names until resolution.
@dataclass(frozen=True)
class _SurfaceCont:
    binders: tuple[str, ...]
    body: "_SurfaceTerm"


@dataclass(frozen=True)
class _SurfaceTerm:
    head: str
    pargs: Optional[tuple[str, ...]]
    conts: tuple[_SurfaceCont, ...]
    has_parens: bool
    line: int
    column: int


def _parse_surface_term(cur: _Cursor) -> _SurfaceTerm:
    head = cur.ident("term")
    if cur.peek().text != "(":
        return _SurfaceTerm(head.text, None, (), False, head.line, head.column)
    cur.next()
    pargs: Optional[tuple[str, ...]] = None
    items: list[_SurfaceCont] = []
    while True:
        items.append(_parse_cont(cur))
        tok = cur.peek()
        if tok.text == ",":
            cur.next()
            continue
        if tok.text == ";":
            if pargs is not None:
                raise ParseError("second ';' in argument list", tok.line, tok.column)
            for item in items:
                if item.binders or item.body.has_parens or item.body.pargs is not None:
                    raise ParseError(
                        "scope parameters before ';' must be plain names",
                        tok.line, tok.column,
                    )
            pargs = tuple(item.body.head for item in items)
            items = []
            cur.next()
            continue
        cur.expect(")")
        break
    return _SurfaceTerm(head.text, pargs, tuple(items), True, head.line, head.column)


def _parse_cont(cur: _Cursor) -> _SurfaceCont:
    # Look ahead: a run of IDENTs followed by '.' is a binder list.
    start = cur.pos
    binders: list[str] = []
    while cur.peek().kind == "IDENT":
        binders.append(cur.next().text)
    if binders and cur.peek().text == ".":
        cur.next()
        return _SurfaceCont(tuple(binders), _parse_surface_term(cur))
    cur.pos = start
    return _SurfaceCont((), _parse_surface_term(cur))


@dataclass(frozen=True)
class ContextDecl:
    """A parsed judgement context: named variables and named open scopes."""

    var_names: tuple[str, ...]
    arities: CompContext
    params: tuple[str, ...]

    @property
    def depth(self) -> int:
        return len(self.params)


def _parse_ctx(cur: _Cursor) -> ContextDecl:
    names: list[str] = []
    arities: list[int] = []
    if cur.peek().text == "-":
        cur.next()
    else:
        while True:
            tok = cur.ident("variable name")
            cur.expect(":")
            names.append(tok.text)
            arities.append(cur.nat())
            if cur.peek().text == ",":
                cur.next()
                continue
            break
    cur.expect("|")
    params: list[str] = []
    if cur.peek().text == "-":
        cur.next()
    else:
        while True:
            params.append(cur.ident("scope parameter name").text)
            if cur.peek().text == ",":
                cur.next()
                continue
            break
    seen: set[str] = set()
    for n in names + params:
        if n in seen:
            raise ParseError(f"name {n!r} declared twice in context", cur.peek().line, cur.peek().column)
        seen.add(n)
    return ContextDecl(tuple(names), tuple(arities), tuple(params))


def parse_context(text: str) -> ContextDecl:
    cur = _Cursor(tokenize(text))
    ctx = _parse_ctx(cur)
    tok = cur.peek()
    if tok.kind != "EOF":
        raise ParseError(f"unexpected {tok.text!r} after context", tok.line, tok.column)
    return ctx


def _resolve(
    sig: Signature,
    ctx: ContextDecl,
    stack: tuple[str, ...],
    st: _SurfaceTerm,
) -> Term:
    name = st.head
    is_op = name in sig
    is_var = name in ctx.var_names
    if is_op and is_var:
        raise ResolveError(f"{name!r} is both an operation and a variable", st.line, st.column)
    if is_var:
        idx = ctx.var_names.index(name)
        arity = ctx.arities[idx]
        listed: tuple[str, ...] = ()
        if st.pargs is not None:
            raise ResolveError(f"variable {name!r} takes no ';' separator", st.line, st.column)
        if st.conts:
            for item in st.conts:
                if item.binders or item.body.has_parens:
                    raise ResolveError(
                        f"variable {name!r} may only be applied to scope names",
                        st.line, st.column,
                    )
            listed = tuple(item.body.head for item in st.conts)
        if arity != len(stack):
            raise ResolveError(
                f"variable {name!r} consumes {arity} scope(s) but {len(stack)} are open",
                st.line, st.column,
            )
        if listed != stack:
            if st.has_parens and len(listed) == len(stack) and set(listed) == set(stack):
                raise ResolveError(
                    f"variable {name!r} must consume scopes innermost-last: "
                    f"expected ({', '.join(stack)})",
                    st.line, st.column,
                )
            if st.has_parens or stack:
                raise ResolveError(
                    f"variable {name!r} must be applied to exactly the open scopes "
                    f"({', '.join(stack) or '-'})",
                    st.line, st.column,
                )
        return Var(idx)
    if not is_op:
        raise ResolveError(f"unknown operation or variable {name!r}", st.line, st.column)
    ar = sig.arity(name)
    pargs = st.pargs or ()
    if ar.params:
        if len(pargs) != ar.params:
            raise ResolveError(
                f"{name} consumes {ar.params} scope(s), {len(pargs)} given",
                st.line, st.column,
            )
        for a in pargs:
            if a not in stack:
                raise ResolveError(f"scope parameter {a!r} is not open here", st.line, st.column)
        if pargs != stack[len(stack) - ar.params:]:
            raise ResolveError(
                f"{name} must consume the innermost scope(s) "
                f"({', '.join(stack[len(stack) - ar.params:])}), got ({', '.join(pargs)})",
                st.line, st.column,
            )
    elif pargs:
        raise ResolveError(f"{name} consumes no scopes", st.line, st.column)
    if len(st.conts) != len(ar.binders):
        raise ResolveError(
            f"{name} expects {len(ar.binders)} continuation(s), got {len(st.conts)}",
            st.line, st.column,
        )
    inner_stack = stack[: len(stack) - ar.params]
    conts: list[Term] = []
    for item, m in zip(st.conts, ar.binders):
        if len(item.binders) != m:
            raise ResolveError(
                f"continuation of {name} must bind {m} scope(s), got {len(item.binders)}",
                st.line, st.column,
            )
        for b in item.binders:
            if b in inner_stack or b in ctx.var_names:
                raise ResolveError(f"scope name {b!r} shadows an existing name", st.line, st.column)
        conts.append(_resolve(sig, ctx, inner_stack + item.binders, item.body))
    return App(name, tuple(conts))


def parse_term(text: str, sig: Signature, ctx: ContextDecl) -> Judgement:
    """Parse a term at the declared context, erasing scope names."""
    for n in ctx.var_names:
        if n in sig:
            raise ResolveError(f"{n!r} is both an operation and a variable", 1, 1)
    cur = _Cursor(tokenize(text))
    st = _parse_surface_term(cur)
    tok = cur.peek()
    if tok.kind != "EOF":
        raise ParseError(f"unexpected {tok.text!r} after term", tok.line, tok.column)
    term = _resolve(sig, ctx, ctx.params, st)
    report = check_term(sig, ctx.arities, ctx.depth, term)
    if report:  # the resolver should already reject these
        raise ParseError("; ".join(report), st.line, st.column)
    return Judgement(ctx.arities, ctx.depth, term)


def _parse_decl(cur: _Cursor) -> tuple[str, ParamArity]:
    name = cur.ident("operation name")
    cur.expect(":")
    cur.expect("(")
    p = cur.nat()
    cur.expect("|")
    binders: list[int] = []
    if cur.peek().text == "-":
        cur.next()
    else:
        while True:
            binders.append(cur.nat())
            if cur.peek().text == ",":
                cur.next()
                continue
            break
    cur.expect(")")
    return name.text, ParamArity(p, tuple(binders))


@dataclass(frozen=True)
class EquationDecl:
    ctx: ContextDecl
    lhs: Judgement
    rhs: Judgement


def parse_theory_source(text: str):
    """Parse a theory file into a signature and named equations.

    Returns ``(signature, [EquationDecl, ...])``; the caller assembles the
    Theory (avoiding a dependency cycle with the equation layer).
    """
    cur = _Cursor(tokenize(text))
    decls: list[tuple[str, ParamArity]] = []
    raw_eqns: list[tuple[_Cursor, int]] = []
    items: list[tuple[str, object]] = []
    while cur.peek().kind != "EOF":
        tok = cur.peek()
        if tok.text == "op":
            cur.next()
            decl = _parse_decl(cur)
            if any(decl[0] == n for n, _ in decls):
                raise ParseError(f"operation {decl[0]!r} declared twice", tok.line, tok.column)
            decls.append(decl)
        elif tok.text == "eq":
            cur.next()
            start = cur.pos
            # skip to the end of the equation: next 'op'/'eq' keyword or EOF
            depth = 0
            while True:
                t = cur.peek()
                if t.kind == "EOF":
                    break
                if t.text == "(":
                    depth += 1
                if t.text == ")":
                    depth -= 1
                if depth == 0 and t.kind == "IDENT" and t.text in ("op", "eq") and cur.pos != start:
                    break
                cur.next()
            items.append(("eq", (start, cur.pos)))
        else:
            raise ParseError(f"expected 'op' or 'eq', found {tok.text!r}", tok.line, tok.column)
    try:
        sig = Signature(tuple(decls))
    except SignatureError as exc:
        raise ParseError(str(exc), 1, 1) from exc
    eqns: list[EquationDecl] = []
    for _kind, (start, end) in items:
        sub = _Cursor(cur.tokens[start:end] + [cur.tokens[-1]])
        ctx = _parse_ctx(sub)
        sub.expect("|-")
        for n in ctx.var_names:
            if n in sig:
                raise ParseError(f"{n!r} is both an operation and a variable", 1, 1)
        lhs_surface = _parse_surface_term(sub)
        sub.expect("=")
        rhs_surface = _parse_surface_term(sub)
        tok = sub.peek()
        if tok.kind != "EOF":
            raise ParseError(f"unexpected {tok.text!r} after equation", tok.line, tok.column)
        lhs = _resolve(sig, ctx, ctx.params, lhs_surface)
        rhs = _resolve(sig, ctx, ctx.params, rhs_surface)
        for side, term, surf in (("left", lhs, lhs_surface), ("right", rhs, rhs_surface)):
            report = check_term(sig, ctx.arities, ctx.depth, term)
            if report:
                raise ParseError(f"{side}-hand side: " + "; ".join(report), surf.line, surf.column)
        eqns.append(
            EquationDecl(
                ctx,
                Judgement(ctx.arities, ctx.depth, lhs),
                Judgement(ctx.arities, ctx.depth, rhs),
            )
        )
    return sig, eqns


def parse_scoped_signature(text: str) -> ScopedSignature:
    cur = _Cursor(tokenize(text))
    algebraic: list[tuple[str, int]] = []
    scoped: list[tuple[str, int]] = []
    while cur.peek().kind != "EOF":
        tok = cur.ident("'algebraic' or 'scoped'")
        if tok.text not in ("algebraic", "scoped"):
            raise ParseError(
                f"expected 'algebraic' or 'scoped', found {tok.text!r}", tok.line, tok.column
            )
        name = cur.ident("operation name")
        cur.expect(":")
        k = cur.nat()
        (algebraic if tok.text == "algebraic" else scoped).append((name.text, k))
    sig = ScopedSignature(tuple(algebraic), tuple(scoped))
    report = sig.validate()
    if report:
        raise ParseError("; ".join(report), 1, 1)
    return sig


_NAME_POOL = "abcdefghijklmnopqrstuvwxyz"


def _fresh_names(count: int, taken: set[str]) -> list[str]:
    out: list[str] = []
    i = 0
    while len(out) < count:
        name = _NAME_POOL[i] if i < len(_NAME_POOL) else f"s{i}"
        if name not in taken:
            out.append(name)
        i += 1
    return out


def print_term(sig: Signature, j: Judgement, var_names: Sequence[str]) -> str:
    """Render a judgement body in the surface grammar with fresh scope names."""
    if len(var_names) != len(j.ctx):
        raise TermError("one surface name per context variable required")
    taken = set(var_names) | set(sig.names())
    slots = _fresh_names(j.depth + _max_extra_depth(sig, j.term, j.depth), taken)

    def go(t: Term, stack: list[str]) -> str:
        if isinstance(t, Var):
            name = var_names[t.index]
            return f"{name}({', '.join(stack)})" if stack else name
        ar = sig.arity(t.op)
        if not ar.params and not ar.binders:
            return t.op
        inner = stack[: len(stack) - ar.params]
        parts: list[str] = []
        for c, m in zip(t.conts, ar.binders):
            binders = slots[len(inner): len(inner) + m]
            body = go(c, inner + binders)
            parts.append((" ".join(binders) + ". " + body) if binders else body)
        consumed = stack[len(stack) - ar.params:]
        head = ", ".join(consumed) + "; " if consumed else ""
        return f"{t.op}({head}{', '.join(parts)})"

    return go(j.term, slots[: j.depth])


def _max_extra_depth(sig: Signature, t: Term, depth: int) -> int:
    best = 0

    def go(t: Term, d: int) -> None:
        nonlocal best
        best = max(best, d - depth)
        if isinstance(t, App):
            ar = sig.arity(t.op)
            for c, m in zip(t.conts, ar.binders):
                go(c, d - ar.params + m)

    go(t, depth)
    return max(best, 0)


def print_context(ctx_names: Sequence[str], arities: Sequence[int], params: Sequence[str]) -> str:
    comps = ", ".join(f"{n}:{m}" for n, m in zip(ctx_names, arities)) or "-"
    pars = ", ".join(params) or "-"
    return f"{comps} | {pars}"
