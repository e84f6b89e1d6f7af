import pytest

from scopedalg import builtin_theory, parse_context, parse_term


@pytest.fixture
def once_theory():
    return builtin_theory("nondet_once")


@pytest.fixture
def exceptions_theory():
    return builtin_theory("exceptions")


@pytest.fixture
def state_theory():
    return builtin_theory("state_local")


@pytest.fixture
def cut_theory():
    return builtin_theory("nondet_cut")


@pytest.fixture
def term_of():
    """Parse a term against a theory at a context given as text."""

    def parse(theory, ctx_text, term_text):
        ctx = parse_context(ctx_text)
        return parse_term(term_text, theory.sig, ctx)

    return parse
