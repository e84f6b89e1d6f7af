"""Equational reasoning for scoped effects.

Scoped operations (exception catching, once, local state, cut) are encoded
as operations of an algebraic theory whose abstract parameters name open
scopes, consumed exactly once and in reverse order of opening.  The package
provides the term calculus, a bounded search for derivable equality, models
in level-indexed sets with the free-model operations, the concrete free
models of the built-in theories, and a small command-line front end.
"""

from .builtin_models import (
    CutList,
    Marker,
    REIFY_TAGS,
    decide_equal_via_model,
    eval_rho,
    model_catch,
    model_cut,
    model_for,
    model_once,
    model_state,
    model_state_prime,
    reify,
    roundtrip_check,
    state_models_agree,
    unit_value,
)
from .equations import (
    Capture,
    DerivationTrace,
    Equation,
    RewriteSystem,
    Step,
    Theory,
    apply_step,
    derivably_equal,
    equal_pairs_among,
    match_instance,
    match_pattern,
    replay,
)
from .generate import ORACLES, OracleError, generate_param_theory, once_oracle, scope_oracle
from .models import (
    DayPair,
    FreeElem,
    GradedCarrier,
    SigmaStructure,
    Violation,
    check_model,
    count_fixedpoint,
    count_free_terms,
    down,
    earlier,
    free_bind,
    free_strength,
    free_unit,
    interpret,
    later,
    lift_scoped_op,
    rename_generators,
    up,
)
from .signatures import (
    CLOSE,
    ParamArity,
    ScopedSignature,
    Signature,
    SignatureError,
    encode_scoped_signature,
    validate_signature,
)
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
from .terms import (
    App,
    CompContext,
    Judgement,
    Position,
    Term,
    TermError,
    Var,
    check_term,
    count_terms,
    enumerate_terms,
    graft,
    substitute,
    term_size,
    weaken,
)
from .theories import (
    BUILTIN_THEORY_NAMES,
    EXCEPTIONS,
    EXPLICIT_NONDET,
    GLOBAL_STATE,
    NONDET_CUT,
    NONDET_ONCE,
    STATE_LOCAL,
    STATE_LOCAL_NOCLOSE,
    builtin_theory,
    equation_index,
    theory_from_source,
)

__version__ = "0.1.0"
