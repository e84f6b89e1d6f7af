"""Built-in theories: nondeterminism with once, exception catching, mutable
state with local values, nondeterminism with cut, and their algebraic bases.

Each theory is written in the surface syntax and parsed at load time, so the
definitions below double as reference material for the theory-file format.
"""

from __future__ import annotations

from functools import lru_cache

from .equations import Equation, Theory
from .syntax import parse_theory_source

NONDET_ONCE = "nondet_once"
EXCEPTIONS = "exceptions"
STATE_LOCAL = "state_local"
STATE_LOCAL_NOCLOSE = "state_local_noclose"
NONDET_CUT = "nondet_cut"
EXPLICIT_NONDET = "explicit_nondet"
GLOBAL_STATE = "global_state"

_MONOID_LAWS = """
eq x:0, y:0, z:0 | - |- or(or(x, y), z) = or(x, or(y, z))   # or-assoc
eq x:0 | - |- or(x, fail) = x                               # or-unit-r
eq x:0 | - |- or(fail, x) = x                               # or-unit-l
"""

_SOURCES: dict[str, str] = {
    EXPLICIT_NONDET: """
op or   : (0 | 0,0)
op fail : (0 | -)
"""
    + _MONOID_LAWS,
    NONDET_ONCE: """
op or    : (0 | 0,0)
op fail  : (0 | -)
op once  : (0 | 1)
op close : (1 | 0)
"""
    + _MONOID_LAWS
    + """
eq - | - |- once(a. fail) = fail                            # once-fail
eq x:1 | - |- once(a. or(x(a), x(a))) = once(a. x(a))       # once-or-idem
eq x:0 | - |- once(a. close(a; x)) = x                      # once-close
eq x:0, y:1 | - |- once(a. or(close(a; x), y(a))) = x       # once-pick-first
""",
    EXCEPTIONS: """
op throw : (0 | -)
op catch : (0 | 1,1)
op close : (1 | 0)

eq y:0 | - |- catch(a. throw, b. close(b; y)) = y           # catch-throw
eq - | - |- catch(a. throw, b. throw) = throw               # catch-both-throw
eq x:0, y:1 | - |- catch(a. close(a; x), b. y(b)) = x       # catch-value
""",
    STATE_LOCAL: """
op local_0 : (0 | 1)
op local_1 : (0 | 1)
op put_0   : (0 | 0)
op put_1   : (0 | 0)
op get     : (0 | 0,0)
op close   : (1 | 0)

eq z:0 | - |- get(put_0(z), put_1(z)) = z                   # get-put
eq z:0 | - |- put_0(put_0(z)) = put_0(z)                    # put-put-00
eq z:0 | - |- put_0(put_1(z)) = put_1(z)                    # put-put-01
eq z:0 | - |- put_1(put_0(z)) = put_0(z)                    # put-put-10
eq z:0 | - |- put_1(put_1(z)) = put_1(z)                    # put-put-11
eq x_0:0, x_1:0 | - |- put_0(get(x_0, x_1)) = put_0(x_0)    # put-get-0
eq x_0:0, x_1:0 | - |- put_1(get(x_0, x_1)) = put_1(x_1)    # put-get-1
eq x:0 | - |- local_0(a. close(a; x)) = x                   # local-close-0
eq x:0 | - |- local_1(a. close(a; x)) = x                   # local-close-1
eq x_0:1, x_1:1 | - |- local_0(a. get(x_0(a), x_1(a))) = local_0(a. x_0(a))  # local-get-0
eq x_0:1, x_1:1 | - |- local_1(a. get(x_0(a), x_1(a))) = local_1(a. x_1(a))  # local-get-1
eq z:1 | - |- local_0(a. put_0(z(a))) = local_0(a. z(a))    # local-put-00
eq z:1 | - |- local_0(a. put_1(z(a))) = local_1(a. z(a))    # local-put-01
eq z:1 | - |- local_1(a. put_0(z(a))) = local_0(a. z(a))    # local-put-10
eq z:1 | - |- local_1(a. put_1(z(a))) = local_1(a. z(a))    # local-put-11
eq z:0 | a |- put_0(close(a; z)) = close(a; z)              # put-close-0
eq z:0 | a |- put_1(close(a; z)) = close(a; z)              # put-close-1
""",
    NONDET_CUT: """
op or    : (0 | 0,0)
op fail  : (0 | -)
op cut   : (0 | 0)
op scope : (0 | 1)
op close : (1 | 0)
"""
    + _MONOID_LAWS
    + """
eq x:0, y:0 | - |- or(cut(x), y) = cut(x)                   # cut-absorb
eq x:0, y:0 | - |- or(x, cut(y)) = cut(or(x, y))            # cut-float
eq x:0 | - |- cut(cut(x)) = cut(x)                          # cut-idem
eq - | - |- scope(a. fail) = fail                           # scope-fail
eq x:1 | - |- scope(a. cut(x(a))) = scope(a. x(a))          # scope-erases-cut
eq x:0, y:1 | - |- scope(a. or(close(a; x), y(a))) = or(x, scope(a. y(a)))  # scope-split
""",
    GLOBAL_STATE: """
op put_0 : (0 | 0)
op put_1 : (0 | 0)
op get   : (0 | 0,0)

eq x_0:0, x_1:0 | - |- put_0(get(x_0, x_1)) = put_0(x_0)    # put-get-0
eq x_0:0, x_1:0 | - |- put_1(get(x_0, x_1)) = put_1(x_1)    # put-get-1
eq x:0 | - |- put_0(put_0(x)) = put_0(x)                    # put-put-00
eq x:0 | - |- put_0(put_1(x)) = put_1(x)                    # put-put-01
eq x:0 | - |- put_1(put_0(x)) = put_0(x)                    # put-put-10
eq x:0 | - |- put_1(put_1(x)) = put_1(x)                    # put-put-11
eq x:0 | - |- get(put_0(x), put_1(x)) = x                   # get-put
""",
}

# state_local without the put/close commutation laws
_SOURCES[STATE_LOCAL_NOCLOSE] = "\n".join(
    line
    for line in _SOURCES[STATE_LOCAL].splitlines()
    if "put-close" not in line
)

BUILTIN_THEORY_NAMES = tuple(_SOURCES)

_LABEL_MARKER = "#"


def theory_from_source(source: str) -> Theory:
    """Assemble a Theory from theory-file text, labelling equations by their
    trailing comments when present."""
    sig, eqn_decls = parse_theory_source(source)
    labels = _equation_labels(source)
    eqns = []
    for i, decl in enumerate(eqn_decls):
        eqns.append(
            Equation(
                decl.lhs.ctx,
                decl.lhs.depth,
                decl.lhs.term,
                decl.rhs.term,
                label=labels[i] if i < len(labels) else "",
            )
        )
    return Theory.checked(sig, eqns)


def _equation_labels(source: str) -> list[str]:
    labels = []
    for line in source.splitlines():
        stripped = line.strip()
        if stripped.startswith("eq "):
            _, _, comment = stripped.partition(_LABEL_MARKER)
            labels.append(comment.strip())
    return labels


@lru_cache(maxsize=None)
def builtin_theory(name: str) -> Theory:
    """Return one of the built-in theories by name."""
    try:
        source = _SOURCES[name]
    except KeyError:
        raise KeyError(
            f"unknown theory {name!r}; available: {', '.join(BUILTIN_THEORY_NAMES)}"
        ) from None
    return theory_from_source(source)


def equation_index(thy: Theory, label: str) -> int:
    for i, eqn in enumerate(thy.eqns):
        if eqn.label == label:
            return i
    raise KeyError(f"no equation labelled {label!r}")
