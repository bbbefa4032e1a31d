import random
from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings, strategies as st

from trapgen.core import (Atom, Interval, LinearRelation, Polynomial, Region, RelOp, Trapezoid,
                          VarTable, VariableBound, formula_eval)
from trapgen.errors import MalformedInput, ParseError
from trapgen.generalizer import generalize
from trapgen.parser import (parse_problem, parse_region, render_formula, render_problem,
                            render_region, render_vector)

from helpers import random_formula, random_trapezoid, random_vartable

X, Y = Polynomial.var(1), Polynomial.var(2)


def test_parse_simple_problem():
    p = parse_problem("(vars (x int)) (assert (< x 5))")
    assert len(p.vars) == 1
    assert p.formula == Atom(LinearRelation(X, RelOp.LT, Polynomial.constant(5)))
    assert p.reference is None


def test_parse_problem_with_reference():
    p = parse_problem("(vars (x int) (q rat)) (assert (and (<= 0 x) (< q x))) (reference (x 1) (q 1/2))")
    assert p.vars.dim("x") == 1 and p.vars.dim("q") == 2
    assert p.reference == (1, Fr(1, 2))
    assert formula_eval(p.formula, p.reference)


def test_integer_after_rational_is_rejected_with_suggestion():
    with pytest.raises(MalformedInput) as info:
        parse_problem("(vars (q rat) (x int)) (assert (< x 5))")
    assert "(x int)" in str(info.value) and "(q rat)" in str(info.value)


@pytest.mark.parametrize("text", [
    "(vars (x int)) (assert (< y 5))",
    "(vars (x int)) (assert (< x 5)) (reference (x 1/2))",
    "(vars (x int) (y int)) (assert (< x 5)) (reference (x 1))",
    "(vars (x int)) (assert (< x 5)) (assert (> x 0))",
    "(vars (x int))",
    "(vars (x int)) (assert (< x 0.5))",
    "(vars (x int)) (assert (< (* x 2) 1))",
    "(vars (x int)) (assert (and))",
    "(vars (x int)) (assert (< x 5)",
    "(vars (x int)) (assert (< x 5)))",
    "(vars (x float)) (assert (< x 5))",
])
def test_malformed_problems(text):
    with pytest.raises(MalformedInput):
        parse_problem(text)


def test_syntax_error_has_position():
    with pytest.raises(ParseError) as info:
        parse_problem("(vars (x int))\n(assert (< x 5)")
    assert info.value.line == 2


def test_polynomial_forms():
    p = parse_problem("(vars (x int) (y int)) (assert (= (+ (* 1/2 x) (- y 3) 1) 0))")
    lhs = p.formula.rel.lhs
    assert lhs == Polynomial.build({1: Fr(1, 2), 2: 1}, -2)


def test_comments_are_ignored():
    p = parse_problem("; header\n(vars (x int)) ; decl\n(assert (< x 5))")
    assert len(p.vars) == 1


def test_render_region_examples():
    vars = VarTable.of(("x", "int"), ("y", "int"))
    assert render_region(Region.positive(), vars) == "(region + ())"
    neg = Region.negative(Trapezoid((Interval.of(VariableBound(1, RelOp.LT, Polynomial.constant(5))),)))
    assert render_region(neg, vars) == "(region - ((< x 5)))"
    pos = Region.positive(Trapezoid((
        Interval.of(VariableBound(2, RelOp.LEQ, Fr(1, 2) * X + 3)),
        Interval.of(VariableBound(1, RelOp.GEQ, Polynomial())),
    )))
    assert render_region(pos, vars) == "(region + ((<= y (+ (* 1/2 x) 3)) (>= x 0)))"


def test_render_vector_examples():
    assert render_vector((1,)) == "1"
    assert render_vector((-2, Fr(1, 3))) == "-2 1/3"
    assert render_vector((0, 0, Fr(5, 2))) == "0 0 5/2"


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_region_round_trip(seed):
    rng = random.Random(seed)
    vars = random_vartable(rng, 4)
    t, _ = random_trapezoid(rng, vars)
    for r in (Region.positive(t), Region.negative(t)):
        assert parse_region(render_region(r, vars), vars) == r


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_generalized_region_round_trip(seed):
    rng = random.Random(seed)
    vars = random_vartable(rng)
    f = random_formula(rng, len(vars))
    v = tuple(rng.randint(-4, 4) for _ in vars.names)
    r = generalize(f, v)
    assert parse_region(render_region(r, vars), vars) == r


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_problem_round_trip(seed):
    rng = random.Random(seed)
    vars = random_vartable(rng)
    f = random_formula(rng, len(vars))
    text = f"(vars {' '.join(f'({n} {t.value})' for n, t in zip(vars.names, vars.types))})" \
           f" (assert {render_formula(f, vars)})"
    p = parse_problem(text)
    assert p.vars == vars
    assert parse_problem(render_problem(p)) == p
    w = tuple(rng.randint(-3, 3) for _ in vars.names)
    assert formula_eval(p.formula, w) == formula_eval(f, w)


def test_dimension_assignment_follows_declaration_order():
    a = parse_problem("(vars (a int) (b int) (c rat)) (assert (< a b))")
    assert [a.vars.dim(n) for n in "abc"] == [1, 2, 3]
