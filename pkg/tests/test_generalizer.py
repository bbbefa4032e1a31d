import random
from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings, strategies as st

from trapgen.core import (And, Atom, Interval, LinearRelation, Not, Or, Polynomial, Region, RelOp,
                          Trapezoid, VarTable, VariableBound, formula_eval, region_eval)
from trapgen.generalizer import (STATS, generalize, intersect_same_var, normalize_relation,
                                 region_complement, region_intersect, trapezoid_intersect)

from helpers import brute_points, random_formula, random_vartable

X1, X2 = Polynomial.var(1), Polynomial.var(2)
C = Polynomial.constant
INTS2 = VarTable.of(("x1", "int"), ("x2", "int"))


def rel(lhs, op, rhs):
    return LinearRelation(lhs, op, rhs)


def single(var, op, poly):
    return Trapezoid((Interval.of(VariableBound(var, op, poly)),))


def test_normalize_constant_false():
    assert normalize_relation(rel(C(3), RelOp.LT, C(0)), (0,)) == Region.negative()


def test_normalize_false_equality_neq1():
    r = normalize_relation(rel(X2, RelOp.EQ, X1 + 2), (1, 7))
    assert r == Region.negative(single(2, RelOp.GT, X1 + 2))


def test_normalize_negative_leading_coefficient():
    r = normalize_relation(rel(2 * X1 - X2, RelOp.LT, C(0)), (1, 3))
    assert r == Region.positive(single(2, RelOp.GT, 2 * X1))
    atom = rel(2 * X1 - X2, RelOp.LT, C(0))
    for w in brute_points(INTS2, -5, 5):
        assert region_eval(r, w) == atom.holds(w)


def test_normalize_false_inequality_flips_to_strict_dual():
    x = VarTable.of(("x1", "int"))
    r = normalize_relation(rel(X1, RelOp.LEQ, C(4)), (6,))
    assert r == Region.negative(single(1, RelOp.GT, C(4)))
    assert all(region_eval(r, w) == (w[0] <= 4) for w in brute_points(x, -10, 10))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_normalized_region_is_equivalent_to_atom(seed):
    rng = random.Random(seed)
    vars = random_vartable(rng)
    f = random_formula(rng, len(vars), depth=0)
    v = tuple(rng.choice(list(brute_points(vars, -3, 3))))
    r = normalize_relation(f.rel, v)
    for b in r.body.bounds():
        assert b.holds(v)
    exact = f.rel.holds(v) or f.rel.op is not RelOp.EQ
    for w in brute_points(vars, -3, 3):
        if exact:
            assert region_eval(r, w) == f.rel.holds(w)
        else:
            # a false equality becomes one strict side: still contains every solution
            assert not f.rel.holds(w) or region_eval(r, w)


def test_intersect_same_var_lt_int():
    kept, residual = intersect_same_var(VariableBound(2, RelOp.LT, C(5)),
                                        VariableBound(2, RelOp.LT, X1), (10, 0))
    assert kept == VariableBound(2, RelOp.LT, C(5))
    assert residual == rel(C(5), RelOp.LEQ, X1)


def test_intersect_same_var_eq_int():
    kept, residual = intersect_same_var(VariableBound(2, RelOp.EQ, X1),
                                        VariableBound(2, RelOp.LEQ, C(7)), (3, 3))
    assert kept == VariableBound(2, RelOp.EQ, X1)
    assert residual == rel(X1, RelOp.LEQ, C(7))


def test_intersect_same_var_duplicate():
    b = VariableBound(1, RelOp.LEQ, C(5))
    kept, residual = intersect_same_var(b, b, (0,))
    assert kept == b
    assert normalize_relation(residual, (0,)) == Region.positive()


def test_intersect_same_var_opposite_kinds_pair_up():
    assert intersect_same_var(VariableBound(1, RelOp.GEQ, C(0)),
                              VariableBound(1, RelOp.LEQ, C(3)), (1,)) is None


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_intersect_same_var_is_sound(seed):
    # {kept, residual} holds at v and lies inside {b1, b2}
    rng = random.Random(seed)
    vars = VarTable.of(("a", "rat"), ("b", "rat"))
    pts = list(brute_points(vars, -3, 3))
    v = rng.choice(pts)
    ops = [RelOp.LT, RelOp.LEQ] if rng.random() < 0.5 else [RelOp.GT, RelOp.GEQ]
    ops += [RelOp.EQ]
    bounds = []
    while len(bounds) < 2:
        poly = Polynomial.build({1: Fr(rng.randint(-4, 4), 2)}, Fr(rng.randint(-6, 6), 2))
        b = VariableBound(2, rng.choice(ops), poly)
        if b.holds(v):
            bounds.append(b)
    out = intersect_same_var(bounds[0], bounds[1], v)
    if out is None:
        return
    kept, residual = out
    assert kept in bounds
    assert residual.holds(v)
    for w in pts:
        if kept.holds(w) and residual.holds(w):
            assert bounds[0].holds(w) and bounds[1].holds(w)


def test_trapezoid_intersect_examples():
    v = (10, 0)
    assert trapezoid_intersect(Trapezoid(), single(2, RelOp.LT, X1), v) == single(2, RelOp.LT, X1)
    t = trapezoid_intersect(single(2, RelOp.LT, C(5)), single(2, RelOp.LT, X1), v)
    assert t == Trapezoid((Interval.of(VariableBound(2, RelOp.LT, C(5))),
                           Interval.of(VariableBound(1, RelOp.GEQ, C(5)))))
    pair = trapezoid_intersect(single(1, RelOp.GEQ, C(0)), single(1, RelOp.LEQ, C(3)), (1,))
    assert pair == Trapezoid((Interval(1, lower=VariableBound(1, RelOp.GEQ, C(0)),
                                       upper=VariableBound(1, RelOp.LEQ, C(3))),))


def test_trapezoid_intersect_is_sound_on_grid():
    # the result lies inside Ta and Tb and contains v
    v = (10, 0)
    ta, tb = single(2, RelOp.LT, C(5)), single(2, RelOp.LT, X1)
    t = trapezoid_intersect(ta, tb, v)
    assert t.holds(v)
    for w in brute_points(INTS2, -12, 12):
        if t.holds(w):
            assert ta.holds(w) and tb.holds(w)


def test_complement():
    t = single(1, RelOp.LT, C(5))
    assert region_complement(Region.positive(t)) == Region.negative(t)
    assert region_complement(Region.negative(t)) == Region.positive(t)
    r = Region.negative(t)
    assert region_complement(region_complement(r)) == r


def test_region_intersect_rules():
    v = (0, 1)
    ta, tb = single(1, RelOp.LT, C(5)), single(2, RelOp.GT, X1)
    neg_a, neg_b = Region.negative(single(1, RelOp.GT, C(3))), Region.negative(single(2, RelOp.LT, C(0)))
    assert region_intersect(neg_a, Region.positive(tb), v) == neg_a
    assert region_intersect(Region.positive(ta), neg_b, v) == neg_b
    assert region_intersect(neg_a, neg_b, v) == neg_a  # left bias
    assert region_intersect(Region.positive(ta), Region.positive(tb), v) == \
        Region.positive(trapezoid_intersect(ta, tb, v))
    assert region_intersect(Region.positive(), Region.positive(tb), v) == Region.positive(tb)


def test_generalize_examples():
    assert generalize(Atom(rel(C(0), RelOp.EQ, C(0))), (4,)) == Region.positive()

    f = And((Atom(rel(X1, RelOp.LT, C(5))), Atom(rel(X1, RelOp.LT, X2))))
    v = (0, 10)
    r = generalize(f, v)
    assert r == Region.positive(Trapezoid((Interval.of(VariableBound(2, RelOp.GT, X1)),
                                           Interval.of(VariableBound(1, RelOp.LT, C(5))))))
    grid = list(brute_points(INTS2, -10, 10))
    assert all(formula_eval(f, w) for w in grid if region_eval(r, w))

    g = Or((Atom(rel(X1, RelOp.EQ, C(3))), Atom(rel(X1, RelOp.EQ, C(8)))))
    assert generalize(g, (3,)) == Region.positive(single(1, RelOp.EQ, C(3)))


def check_invariants_brute(f, v, r, vars, lo, hi):
    fv = formula_eval(f, v)
    assert fv == region_eval(r, v)
    for w in brute_points(vars, lo, hi):
        if fv:
            assert not region_eval(r, w) or formula_eval(f, w), w
        else:
            assert not formula_eval(f, w) or region_eval(r, w), w


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_invariants_on_random_formulas(seed):
    rng = random.Random(seed)
    vars = random_vartable(rng)
    f = random_formula(rng, len(vars))
    v = tuple(rng.choice(list(brute_points(vars, -3, 3))))
    r = generalize(f, v)
    check_invariants_brute(f, v, r, vars, -4, 4)
    for b in r.body.bounds():
        assert b.holds(v)


def test_not_and_or_compose():
    f = Not(Or((Atom(rel(X1, RelOp.LT, C(0))), Atom(rel(X1, RelOp.GT, C(4))))))
    r = generalize(f, (2,))
    assert r.is_positive
    check_invariants_brute(f, (2,), r, VarTable.of(("x", "int")), -10, 10)


def test_termination_measure_never_fails():
    rng = random.Random(7)
    before = STATS.rewrites
    for _ in range(200):
        vars = random_vartable(rng)
        f = random_formula(rng, len(vars))
        generalize(f, tuple(rng.randint(-3, 3) for _ in vars.names))
    assert STATS.rewrites > before
    assert STATS.measure_failures == 0
