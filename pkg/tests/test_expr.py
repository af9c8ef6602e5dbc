import math

import pytest
from hypothesis import given, settings, strategies as st

from projsym.errors import DimensionError, DomainError, ExprSyntaxError, UnknownIdentifier
from projsym.expr import BinOp, Name, Neg, Num, evaluate, parse, substitute, to_source, tokenize


# Parsing

def test_precedence_and_associativity():
    """Test that ^ binds tighter than unary minus and is right-associative"""
    assert evaluate("2+3*4", []) == 14.0
    assert evaluate("-2^2", []) == -4.0
    assert evaluate("2^3^2", []) == 512.0
    assert evaluate("2^-1", []) == 0.5
    assert evaluate("(1-2)-3", []) == -4.0
    assert evaluate("8/4/2", []) == 1.0


def test_negative_literal_is_negated_number():
    expr = parse("-3")
    assert expr.ast == Neg(Num(3.0))


def test_scientific_notation():
    assert evaluate("1.5e-3*2", []) == pytest.approx(3e-3)
    assert evaluate(".5+1E2", []) == pytest.approx(100.5)


def test_functions_and_constants():
    value = evaluate("sin(pi/2) + ln(exp(2)) + sqrt(9) + abs(-1) + cosh(0)", [])
    assert value == pytest.approx(1.0 + 2.0 + 3.0 + 1.0 + 1.0)


def test_coordinates_by_position_and_mapping():
    assert evaluate("x*y + z", [2.0, 3.0, 4.0]) == 10.0
    assert evaluate("x*y + z", {"x": 2.0, "y": 3.0, "z": 4.0}) == 10.0
    assert evaluate("a*u", [2.0], {"a": 3.0}, ["u"]) == 6.0


def test_names_excludes_constants():
    assert parse("k*x + pi*sin(y)").names() == frozenset({"k", "x", "y"})


def test_tokenize_reports_positions():
    tokens = tokenize("x + 12")
    assert [(t.typ, t.text, t.pos) for t in tokens[:3]] == [("IDENT", "x", 0), ("OP", "+", 2), ("NUMBER", "12", 4)]


# Errors

@pytest.mark.parametrize("source", ["x +", "(x", "x y", "2 ** 3", "sin()", "foo(x)", "sin(x, y)", "x $ 1"])
def test_syntax_errors(source):
    with pytest.raises(ExprSyntaxError) as excinfo:
        parse(source)
    assert "position" in excinfo.value.details


@pytest.mark.parametrize("source,position", [("1e999", 0), ("x + 2e400", 4), ("1" * 400, 0)])
def test_non_finite_literals_are_rejected(source, position):
    with pytest.raises(ExprSyntaxError, match="not a finite number") as excinfo:
        tokenize(source)
    assert excinfo.value.position == position


def test_unknown_function_message():
    with pytest.raises(ExprSyntaxError, match="Unknown function 'foo'"):
        parse("foo(x)")


def test_unknown_identifier_against_known_names():
    with pytest.raises(UnknownIdentifier) as excinfo:
        parse("k*x + q", known=["x", "k"])
    assert excinfo.value.name == "q"


def test_unknown_identifier_at_evaluation():
    with pytest.raises(UnknownIdentifier):
        evaluate("x + w", [1.0, 2.0, 3.0])


def test_coordinate_count_mismatch():
    with pytest.raises(DimensionError):
        evaluate("x", [1.0, 2.0], names=["x"])


@pytest.mark.parametrize("source", ["ln(0)", "ln(-1)", "1/(x-1)", "sqrt(-x)", "(-x)^0.5", "0^(-1)", "exp(1000)"])
def test_domain_errors(source):
    with pytest.raises(DomainError):
        evaluate(source, [1.0, 0.0, 0.0])


def test_negative_base_with_integer_exponent():
    assert evaluate("(-x)^3", [2.0, 0.0, 0.0]) == -8.0


# Substitution

def test_substitute_replaces_free_names():
    expr = substitute(parse("beta/z^2 + beta"), {"beta": "(2.0)"})
    assert expr.names() == frozenset({"z"})
    assert evaluate(expr, {"z": 2.0}) == pytest.approx(2.5)


def test_substitute_keeps_structure():
    expr = substitute(parse("sin(x)*y"), {"x": "y+1"})
    assert isinstance(expr.ast, BinOp)
    assert evaluate(expr, {"y": 0.5}) == pytest.approx(math.sin(1.5) * 0.5)


# Printing

_leaves = st.one_of(
    st.sampled_from(["x", "y", "z", "k"]).map(Name),
    st.floats(min_value=0.0, max_value=1e6, allow_nan=False, allow_infinity=False).map(lambda v: Num(abs(v))),
)


def _combine(children):
    return st.one_of(
        st.builds(BinOp, st.sampled_from(["+", "-", "*", "/", "^"]), children, children),
        st.builds(Neg, children),
    )


@settings(max_examples=200, deadline=None)
@given(st.recursive(_leaves, _combine, max_leaves=12))
def test_printed_source_parses_back_to_same_tree(node):
    """Test that the canonical printer emits text the parser maps to the same tree"""
    assert parse(to_source(node)).ast == node
