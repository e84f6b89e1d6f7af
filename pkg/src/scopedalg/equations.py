"""Equational theories and a bounded decision procedure for derivable equality.

Derivable equality closes substitution instances of a theory's equations
under reflexivity, symmetry, transitivity, and congruence.  The search below
explores single rewrite steps (one equation instance applied at one
position, in either orientation) from both sides of a candidate equality and
reports a replayable trace when the two sides meet.  Failure to meet within
the budget is reported as unknown, never as disequality: the general word
problem is not assumed decidable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .signatures import Signature
from .terms import (
    App,
    CompContext,
    Judgement,
    Position,
    Term,
    TermError,
    Var,
    check_term,
    positions_with_depth,
    replace_at,
    subterm_at,
    term_size,
)


@dataclass(frozen=True)
class Equation:
    """A pair of terms sharing one context and stack depth."""

    ctx: CompContext
    depth: int
    lhs: Term
    rhs: Term
    label: str = field(default="", compare=False)

    def sides(self, forward: bool) -> tuple[Term, Term]:
        return (self.lhs, self.rhs) if forward else (self.rhs, self.lhs)


@dataclass(frozen=True)
class Theory:
    sig: Signature
    eqns: tuple[Equation, ...]

    @classmethod
    def checked(cls, sig: Signature, eqns: Iterable[Equation]) -> Theory:
        eqns = tuple(eqns)
        for i, eqn in enumerate(eqns):
            for side_name, side in (("lhs", eqn.lhs), ("rhs", eqn.rhs)):
                report = check_term(sig, eqn.ctx, eqn.depth, side)
                if report:
                    raise TermError(f"equation {i} ({eqn.label}) {side_name}: " + "; ".join(report))
        return cls(sig, eqns)


def term_vars(t: Term) -> frozenset[int]:
    if isinstance(t, Var):
        return frozenset((t.index,))
    out: frozenset[int] = frozenset()
    for c in t.conts:
        out |= term_vars(c)
    return out


@dataclass(frozen=True)
class Capture:
    """A successful match: the stack offset and the subterm captured for
    each equation variable occurring in the pattern."""

    offset: int
    mapping: tuple[tuple[int, Term], ...]

    def as_dict(self) -> dict[int, Term]:
        return dict(self.mapping)


def _match(pattern: Term, subject: Term, captures: dict[int, Term]) -> bool:
    if isinstance(pattern, Var):
        prev = captures.get(pattern.index)
        if prev is None:
            captures[pattern.index] = subject
            return True
        return prev == subject
    return (
        isinstance(subject, App)
        and subject.op == pattern.op
        and len(subject.conts) == len(pattern.conts)
        and all(_match(p, s, captures) for p, s in zip(pattern.conts, subject.conts))
    )


def match_pattern(
    eqn_depth: int, pattern: Term, subject: Term, subject_depth: int
) -> Optional[Capture]:
    """Match ``subject`` (at local stack depth ``subject_depth``) against a
    pattern taken from an equation judged at depth ``eqn_depth``.

    Every occurrence of an equation variable consumes its entire ambient
    stack, so captures are plain subterms and repeated variables must
    capture syntactically equal subterms.  The ambient offset is uniform
    across the match and must be non-negative.
    """
    offset = subject_depth - eqn_depth
    if offset < 0:
        return None
    captures: dict[int, Term] = {}
    if not _match(pattern, subject, captures):
        return None
    return Capture(offset, tuple(sorted(captures.items())))


def match_instance(
    thy: Theory, eqn: Equation, subject: Judgement, position: Position
) -> Optional[Capture]:
    """Match ``eqn.lhs`` against the subterm of ``subject`` at ``position``."""
    local_depth = None
    for pos, _sub, d in positions_with_depth(thy.sig, subject.term, subject.depth):
        if pos == position:
            local_depth = d
            break
    if local_depth is None:
        raise TermError(f"position {position} does not address a subterm")
    return match_pattern(eqn.depth, eqn.lhs, subterm_at(subject.term, position), local_depth)


def graft_captures(t: Term, captures: dict[int, Term]) -> Term:
    if isinstance(t, Var):
        return captures[t.index]
    return App(t.op, tuple(graft_captures(c, captures) for c in t.conts))


@dataclass(frozen=True)
class Step:
    """One rewrite: apply equation ``eqn_index`` at ``position``, oriented
    left-to-right when ``forward``, with the recorded captures."""

    position: Position
    eqn_index: int
    forward: bool
    captures: tuple[tuple[int, Term], ...]

    def inverted(self) -> Step:
        return Step(self.position, self.eqn_index, not self.forward, self.captures)


@dataclass(frozen=True)
class DerivationTrace:
    steps: tuple[Step, ...]


def apply_step(thy: Theory, term: Term, step: Step) -> Term:
    """Apply one recorded step, verifying it is an instance of its equation."""
    eqn = thy.eqns[step.eqn_index]
    src, dst = eqn.sides(step.forward)
    captures = dict(step.captures)
    expected = graft_captures(src, captures)
    actual = subterm_at(term, step.position)
    if actual != expected:
        raise TermError(
            f"step is not an instance of equation {step.eqn_index} at {step.position}"
        )
    return replace_at(term, step.position, graft_captures(dst, captures))


def replay(thy: Theory, start: Judgement, trace: DerivationTrace) -> Judgement:
    """Replay a trace from ``start``; each step is verified structurally."""
    term = start.term
    for step in trace.steps:
        term = apply_step(thy, term, step)
    report = check_term(thy.sig, start.ctx, start.depth, term)
    if report:
        raise TermError("replayed term is ill-formed: " + "; ".join(report))
    return Judgement(start.ctx, start.depth, term)


@dataclass(frozen=True)
class _Rule:
    eqn_index: int
    forward: bool
    eqn_depth: int
    src: Term
    dst: Term


class RewriteSystem:
    """Compiled single-step rewriting for one theory at a fixed judgement
    context, with memoized successor sets.

    An orientation is only usable when the replacement side's variables are
    covered by the pattern side; orientations that would have to invent
    subterms are skipped (the bidirectional search compensates).
    """

    def __init__(self, thy: Theory, ctx: CompContext, depth: int, size_cap: Optional[int] = None):
        self.thy = thy
        self.ctx = tuple(ctx)
        self.depth = depth
        self.size_cap = size_cap
        self._succ: dict[Term, tuple[tuple[Term, Step], ...]] = {}
        by_op: dict[str, list[_Rule]] = {}
        var_rooted: list[_Rule] = []
        for i, eqn in enumerate(thy.eqns):
            for forward in (True, False):
                src, dst = eqn.sides(forward)
                if not term_vars(dst) <= term_vars(src):
                    continue
                rule = _Rule(i, forward, eqn.depth, src, dst)
                (var_rooted if isinstance(src, Var) else by_op.setdefault(src.op, [])).append(rule)
        order = lambda r: (r.eqn_index, not r.forward)
        self._var_rooted = sorted(var_rooted, key=order)
        self._rules_by_op = {
            op: sorted(rules + var_rooted, key=order) for op, rules in by_op.items()
        }
        for op in thy.sig.names():
            self._rules_by_op.setdefault(op, self._var_rooted)

    def _rules_for(self, sub: Term) -> Iterable[_Rule]:
        if isinstance(sub, App):
            return self._rules_by_op.get(sub.op, self._var_rooted)
        return self._var_rooted

    def successors(self, term: Term) -> tuple[tuple[Term, Step], ...]:
        cached = self._succ.get(term)
        if cached is not None:
            return cached
        out: list[tuple[Term, Step]] = []
        seen: set[Term] = set()
        for pos, sub, d in positions_with_depth(self.thy.sig, term, self.depth):
            for rule in self._rules_for(sub):
                cap = match_pattern(rule.eqn_depth, rule.src, sub, d)
                if cap is None:
                    continue
                replacement = graft_captures(rule.dst, cap.as_dict())
                new_term = replace_at(term, pos, replacement)
                if self.size_cap is not None and term_size(new_term) > self.size_cap:
                    continue
                if new_term in seen:
                    continue
                seen.add(new_term)
                out.append((new_term, Step(pos, rule.eqn_index, rule.forward, cap.mapping)))
        result = tuple(out)
        self._succ[term] = result
        return result


class _SearchSide:
    def __init__(self, system: RewriteSystem, start: Term):
        self.system = system
        self.dist: dict[Term, int] = {start: 0}
        self.parent: dict[Term, tuple[Term, Step]] = {}
        self.frontier: list[Term] = [start]
        self.depth = 0
        self.nodes = 1

    def expand(self) -> list[Term]:
        new_level: list[Term] = []
        for term in self.frontier:
            for succ, step in self.system.successors(term):
                if succ in self.dist:
                    continue
                self.dist[succ] = self.depth + 1
                self.parent[succ] = (term, step)
                new_level.append(succ)
        self.depth += 1
        self.nodes += len(new_level)
        self.frontier = new_level
        return new_level

    def path_to(self, term: Term) -> list[Step]:
        steps: list[Step] = []
        while term in self.parent:
            term, step = self.parent[term]
            steps.append(step)
        steps.reverse()
        return steps


def derivably_equal(
    thy: Theory,
    lhs: Judgement,
    rhs: Judgement,
    step_bound: int,
    size_cap: Optional[int] = None,
    node_cap: int = 200_000,
    system: Optional[RewriteSystem] = None,
) -> Optional[DerivationTrace]:
    """Search for a derivation of ``lhs = rhs`` of at most ``step_bound``
    single rewrite steps.

    Returns a trace replaying ``lhs`` into ``rhs``, or ``None`` when no
    derivation was found within the budget (which does not witness
    disequality).  The search is a bidirectional breadth-first search: both
    sides take forward steps and a meeting term closes the derivation via
    symmetry and transitivity.  Exploration order is deterministic:
    positions outermost-first and left-to-right, equations in declaration
    order, left-to-right orientation before right-to-left.

    Callers running many searches over one judgement context should pass a
    shared ``system`` so successor sets are computed once.
    """
    if lhs.ctx != rhs.ctx or lhs.depth != rhs.depth:
        raise TermError("both sides of an equality must share context and depth")
    for side in (lhs, rhs):
        report = check_term(thy.sig, side.ctx, side.depth, side.term)
        if report:
            raise TermError("; ".join(report))
    if lhs.term == rhs.term:
        return DerivationTrace(())
    if step_bound <= 0:
        return None
    if system is None:
        if size_cap is None:
            size_cap = max(term_size(lhs.term), term_size(rhs.term)) + step_bound
        system = RewriteSystem(thy, lhs.ctx, lhs.depth, size_cap)
    elif (system.thy, system.ctx, system.depth) != (thy, lhs.ctx, lhs.depth):
        raise TermError("shared rewrite system does not match this query")
    left = _SearchSide(system, lhs.term)
    right = _SearchSide(system, rhs.term)

    def meet_trace(meet: Term) -> DerivationTrace:
        forward = left.path_to(meet)
        backward = [step.inverted() for step in reversed(right.path_to(meet))]
        return DerivationTrace(tuple(forward + backward))

    while True:
        sides = [
            s
            for s in (left, right)
            if s.frontier and s.depth < step_bound and left.nodes + right.nodes < node_cap
        ]
        if not sides:
            return None
        side = min(sides, key=lambda s: len(s.frontier))
        other = right if side is left else left
        for term in side.expand():
            other_dist = other.dist.get(term)
            if other_dist is not None and other_dist + side.dist[term] <= step_bound:
                return meet_trace(term)


def equal_pairs_among(
    thy: Theory,
    terms: Sequence[Term],
    ctx: CompContext,
    depth: int,
    step_bound: int,
    size_cap: Optional[int] = None,
    node_cap_per_source: int = 50_000,
) -> set[tuple[int, int]]:
    """Indices of all pairs the bounded search can prove equal.

    Equivalent to running :func:`derivably_equal` on every pair, computed as
    one forward ball per source term: sources ``i`` and ``j`` are equal when
    some term lies within distance ``d_i`` of ``i`` and ``d_j`` of ``j``
    with ``d_i + d_j <= step_bound``.
    """
    if size_cap is None:
        size_cap = max((term_size(t) for t in terms), default=0) + step_bound
    system = RewriteSystem(thy, ctx, depth, size_cap)
    meeting: dict[Term, list[tuple[int, int]]] = {}
    result: set[tuple[int, int]] = set()
    for src_index, start in enumerate(terms):
        side = _SearchSide(system, start)
        level: Sequence[Term] = [start]
        while level and side.depth < step_bound and side.nodes < node_cap_per_source:
            level = side.expand()
        for term, d in side.dist.items():
            bucket = meeting.setdefault(term, [])
            for other_index, other_d in bucket:
                if other_index != src_index and d + other_d <= step_bound:
                    pair = (min(src_index, other_index), max(src_index, other_index))
                    result.add(pair)
            bucket.append((src_index, d))
    return result
