import pytest
from hypothesis import given, strategies as st

from scopedalg import (
    ParamArity,
    ScopedSignature,
    Signature,
    SignatureError,
    encode_scoped_signature,
    validate_signature,
)


def test_encode_once_signature():
    sig = encode_scoped_signature(ScopedSignature.of({"or": 2, "fail": 0}, {"once": 1}))
    assert sig.arity("or") == ParamArity(0, (0, 0))
    assert sig.arity("fail") == ParamArity(0, ())
    assert sig.arity("once") == ParamArity(0, (1,))
    assert sig.arity("close") == ParamArity(1, (0,))
    assert sig.names() == ("or", "fail", "once", "close")


def test_encode_empty_signature_still_gets_close():
    sig = encode_scoped_signature(ScopedSignature.of({}, {}))
    assert sig.names() == ("close",)
    assert sig.arity("close") == ParamArity(1, (0,))


def test_encode_exceptions_signature():
    sig = encode_scoped_signature(ScopedSignature.of({"throw": 0}, {"catch": 2}))
    assert sig.arity("throw") == ParamArity(0, ())
    assert sig.arity("catch") == ParamArity(0, (1, 1))
    assert sig.arity("close") == ParamArity(1, (0,))


def test_encode_rejects_reserved_close():
    with pytest.raises(SignatureError, match="reserved"):
        encode_scoped_signature(ScopedSignature.of({"close": 1}, {}))


def test_encode_rejects_duplicate_names():
    with pytest.raises(SignatureError, match="duplicate"):
        encode_scoped_signature(ScopedSignature.of({"or": 2}, {"or": 1}))


def test_validate_accepts_plain_signature():
    sig = Signature.of({"or": ParamArity(0, (0, 0))})
    assert validate_signature(sig) == []


def test_validate_allows_multiple_closers():
    # nothing in the construction rules forbids extra (1 | 0) operations
    sig = Signature.of({"close": ParamArity(1, (0,)), "close2": ParamArity(1, (0,))})
    assert validate_signature(sig) == []


def test_duplicate_names_unconstructible():
    with pytest.raises(SignatureError, match="duplicate"):
        Signature((("or", ParamArity(0, (0, 0))), ("or", ParamArity(0, ()))))


def test_raw_signatures_admit_mixed_valences():
    # e.g. a catch variant whose handler opens no scope
    sig = Signature.of({"varcatch": ParamArity(0, (1, 0)), "close": ParamArity(1, (0,))})
    assert validate_signature(sig) == []


def test_negative_arities_rejected():
    with pytest.raises(SignatureError):
        ParamArity(-1, ())
    with pytest.raises(SignatureError):
        ParamArity(0, (0, -2))


_names = st.lists(
    st.text(alphabet="abcdefg_", min_size=1, max_size=3), min_size=0, max_size=4, unique=True
)


@given(_names, st.data())
def test_encode_output_shapes(names, data):
    split = data.draw(st.integers(min_value=0, max_value=len(names)))
    algebraic = {n: data.draw(st.integers(min_value=0, max_value=3)) for n in names[:split]}
    scoped = {n: data.draw(st.integers(min_value=0, max_value=3)) for n in names[split:]}
    sig = encode_scoped_signature(ScopedSignature.of(algebraic, scoped))
    for name, ar in sig.decls:
        if name == "close":
            assert ar == ParamArity(1, (0,))
        else:
            assert ar.params == 0
            assert set(ar.binders) <= {0} or set(ar.binders) <= {1}
    # distinct input arities give distinct output arities (the degenerate
    # 0-ary case aside, where a scoped operation opening no scope is an
    # algebraic constant)
    for name, k in list(algebraic.items()):
        assert sig.arity(name) == ParamArity(0, (0,) * k)
    for name, k in list(scoped.items()):
        assert sig.arity(name) == ParamArity(0, (1,) * k)
        if k >= 1:
            assert sig.arity(name) != ParamArity(0, (0,) * k)
