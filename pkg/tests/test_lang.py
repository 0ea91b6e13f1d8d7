"""Lexer, parser, printer, evaluator and substitution."""

import pytest
from hypothesis import given, settings, strategies as st

from invwb import corpus
from invwb.ast import (Binary, BoolLit, FunApp, Index, IntLit, MinMax, Old, Quant, Slice,
                       Unary, Var, Field)
from invwb.errors import ParseError, Undefined
from invwb.evaluator import ExecState, evaluate, holds
from invwb.parser import parse_expr, parse_routine
from invwb.printer import show, show_routine
from invwb.subst import free_constants, substitute
from invwb.values import Array


# -- parsing ---------------------------------------------------------------

def test_gcd_equality_parses_to_funapps():
    e = parse_expr("gcd(Result, x) = gcd(a, b)")
    assert e == Binary("=", FunApp("gcd", (Var("Result"), Var("x"))),
                       FunApp("gcd", (Var("a"), Var("b"))))


def test_true_literal():
    assert parse_expr("true") == BoolLit(True)


def test_quantifier_round_trip():
    e = parse_expr("forall k in [1..n] : a[k] <= a[k+1]")
    assert isinstance(e, Quant) and e.kind == "forall" and e.var == "k"
    assert show(e) == "forall k in [1..n]: a[k] <= a[k + 1]"
    assert parse_expr(show(e)) == e


@pytest.mark.parametrize("text, expected", [
    ("(a + b) * c - (d - e)", "(a + b) * c - (d - e)"),
    ("a - (b - c)", "a - (b - c)"),
    ("(a - b) - c", "a - b - c"),
    ("a implies (b implies c)", "a implies b implies c"),
    ("(a implies b) implies c", "(a implies b) implies c"),
    ("not (a and b)", "not (a and b)"),
    ("((x))", "x"),
    ("old (a)", "old a"),
    ("max (a [1..i])", "max(a[1..i])"),
])
def test_minimal_parentheses(text, expected):
    assert show(parse_expr(text)) == expected


def test_slice_comparison_desugars_to_quantifier():
    e = parse_expr("a[1..Result] <= pivot")
    assert isinstance(e, Quant) and e.kind == "forall"
    s = ExecState({"a": Array(1, [1, 2]), "Result": 0, "pivot": 0})
    assert holds(e, s)  # empty slice: vacuously true
    s.env["Result"] = 2
    assert not holds(e, s)


def test_syntax_error_has_position():
    with pytest.raises(ParseError) as info:
        parse_expr("a + * b")
    assert (info.value.line, info.value.col) == (1, 5)


def test_error_position_on_later_line():
    text = "f (x: INTEGER): INTEGER\n  do\n    Result := x +\n  end\n"
    with pytest.raises(ParseError) as info:
        parse_routine(text)
    assert info.value.line == 4


def test_unknown_function_is_deferred_to_evaluation():
    e = parse_expr("frobnicate(x) = 1")
    with pytest.raises(Undefined):
        evaluate(e, ExecState({"x": 1}))


# -- round trip ------------------------------------------------------------

names = st.sampled_from(["x", "y", "i", "Result", "a"])
leaves = st.one_of(st.integers(0, 20).map(IntLit), names.map(Var), st.booleans().map(BoolLit))


def _extend(children):
    ops = st.sampled_from(["+", "-", "*", "//", "mod", "=", "/=", "<", "<=", "and",
                           "or", "implies", "iff"])
    return st.one_of(
        st.builds(Binary, ops, children, children),
        st.builds(Unary, st.sampled_from(["-", "not"]), children),
        st.builds(Old, names.map(Var)),
        st.builds(MinMax, st.sampled_from(["min", "max"]), children, children),
        st.builds(lambda a, lo, hi: FunApp("max", (Slice(Var(a), lo, hi),)),
                  st.just("a"), children, children),
        st.builds(lambda i: Index(Var("a"), i), children),
        st.builds(lambda f: Field(Var("a"), f), st.sampled_from(["lower", "upper", "count"])),
        st.builds(lambda lo, hi, b: Quant("forall", "k", lo, hi, b), children, children, children),
    )


exprs = st.recursive(leaves, _extend, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(exprs)
def test_parse_print_parse_is_a_fixpoint(e):
    once = parse_expr(show(e))
    assert parse_expr(show(once)) == once
    assert show(parse_expr(show(once))) == show(once)


def test_corpus_assertions_round_trip():
    for entry in corpus.load_corpus():
        for r in entry.routines.values():
            again = parse_routine(show_routine(r))
            assert show_routine(again) == show_routine(r), entry.id


# -- evaluation ------------------------------------------------------------

def test_evaluate_examples():
    assert evaluate(parse_expr("x > 0"), ExecState({"x": 7})) is True
    assert evaluate(parse_expr("max(a[1..3])"), ExecState({"a": Array(1, [2, 9, 4])})) == 9


def test_empty_slice_max_is_undefined_not_false():
    with pytest.raises(Undefined):
        evaluate(parse_expr("max(a[2..1])"), ExecState({"a": Array(1, [2, 9])}))


def test_out_of_bounds_index_is_undefined():
    with pytest.raises(Undefined):
        evaluate(parse_expr("a[3]"), ExecState({"a": Array(1, [2, 9])}))


def test_unbound_variable_is_undefined():
    with pytest.raises(Undefined):
        evaluate(parse_expr("z + 1"), ExecState({}))


def test_integer_arithmetic_is_exact():
    assert evaluate(parse_expr("2 ^ 100 + 1"), ExecState()) == 2 ** 100 + 1


def test_negative_division_is_an_error():
    with pytest.raises(Undefined):
        evaluate(parse_expr("x // 2"), ExecState({"x": -3}))


def test_old_reads_entry_snapshot():
    s = ExecState({"a": Array(1, [3, 1])})
    s.take_snapshot()
    s.env["a"] = Array(1, [1, 3])
    assert holds(parse_expr("perm(a, old a) and a /= old a"), s)


@pytest.mark.parametrize("text, env", [
    ("false and max(a[2..1]) = 0", {"a": Array(1, [1])}),
    ("true or max(a[2..1]) = 0", {"a": Array(1, [1])}),
    ("false implies max(a[2..1]) = 0", {"a": Array(1, [1])}),
    ("i <= a.upper and a[i] = 1", {"a": Array(1, [1]), "i": 2}),
])
def test_short_circuit_masks_undefined(text, env):
    evaluate(parse_expr(text), ExecState(env))


@pytest.mark.parametrize("text", [
    "true and max(a[2..1]) = 0",
    "max(a[2..1]) = 0 and false",
    "max(a[2..1]) = 0 or true",
    "not (max(a[2..1]) = 0)",
])
def test_undefinedness_is_contagious(text):
    with pytest.raises(Undefined):
        evaluate(parse_expr(text), ExecState({"a": Array(1, [1])}))


small_arrays = st.lists(st.integers(-3, 3), max_size=8)


@settings(max_examples=200, deadline=None)
@given(small_arrays, st.integers(-3, 3), st.integers(-1, 9), st.integers(-1, 9))
def test_quantifier_duality(items, c, lo, hi):
    env = {"a": Array(1, items), "c": c, "lo": lo, "hi": hi}
    guard = "1 <= lo and hi <= a.count and "
    left = parse_expr(guard + "not (exists k in [lo..hi]: a[k] > c)")
    right = parse_expr(guard + "(forall k in [lo..hi]: not (a[k] > c))")
    assert evaluate(left, ExecState(env)) == evaluate(right, ExecState(env))


@settings(max_examples=100, deadline=None)
@given(exprs, st.integers(-5, 5), st.integers(-5, 5))
def test_evaluation_is_pure(e, x, y):
    s = ExecState({"x": x, "y": y, "i": 1, "Result": 0, "a": Array(1, [1, 2, 3])})
    s.take_snapshot()

    def run():
        try:
            return ("ok", evaluate(e, s))
        except Undefined as exc:
            return ("undefined", str(exc))
    assert run() == run()


# -- substitution and free constants ---------------------------------------

def test_substitute_examples():
    assert show(substitute(parse_expr("Result = gcd(a,b)"), "Result", Var("x"))) == "x = gcd(a, b)"
    assert show(substitute(parse_expr("y + 1"), "z", IntLit(0))) == "y + 1"
    got = substitute(parse_expr("forall k in [1..n]: a[k] <= m"), "n", Var("i"))
    assert got == parse_expr("forall k in [1..i]: a[k] <= m")


def test_substitute_avoids_capture():
    got = substitute(parse_expr("forall k in [1..n]: a[k] <= m"), "m", Var("k"))
    assert isinstance(got, Quant) and got.var != "k"
    s = ExecState({"a": Array(1, [1, 5]), "n": 2, "k": 5})
    assert holds(got, s)


def _consts(entry_id, text):
    r = corpus.get(entry_id).routine
    return sorted(show(c) for c in free_constants(parse_expr(text), r))


def test_free_constants_examples():
    assert _consts("max_one_way", "Result = max(a[a.lower..a.upper])") == ["a", "a.lower", "a.upper"]
    assert _consts("gcd_subtraction", "x = x") == []
    assert _consts("divided_diff", "n = m*q + r") == ["m", "n"]
