"""Random problem generators and brute-force checkers shared by the tests."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import numpy as np

from trapgen.core import (And, Atom, Interval, LinearRelation, Not, Or, Polynomial, RelOp,
                          Trapezoid, VarTable, VarType, VariableBound, poly_eval, poly_lcd)

OPS = list(RelOp)


def random_vartable(rng: random.Random, max_vars: int = 3) -> VarTable:
    n = rng.randint(1, max_vars)
    n_int = rng.randint(0, n)
    names = [f"v{i}" for i in range(1, n + 1)]
    types = [VarType.INTEGER] * n_int + [VarType.RATIONAL] * (n - n_int)
    return VarTable(tuple(names), tuple(types))


def _coeff(rng: random.Random) -> Fraction:
    # multiples of 1/2 in [-3, 3]
    return Fraction(rng.randint(-6, 6), 2)


def random_poly(rng: random.Random, n: int, density: float = 0.6) -> Polynomial:
    coeffs = {d: _coeff(rng) for d in range(1, n + 1) if rng.random() < density}
    return Polynomial.build(coeffs, _coeff(rng))


def random_formula(rng: random.Random, n: int, depth: int = 4):
    if depth == 0 or rng.random() < 0.3:
        lhs = random_poly(rng, n)
        rhs = random_poly(rng, n, 0.3)
        return Atom(LinearRelation(lhs, rng.choice(OPS), rhs))
    kind = rng.choice(["and", "or", "not", "and", "or"])
    if kind == "not":
        return Not(random_formula(rng, n, depth - 1))
    kids = tuple(random_formula(rng, n, depth - 1) for _ in range(rng.randint(2, 3)))
    return And(kids) if kind == "and" else Or(kids)


def brute_points(vars: VarTable, lo: int, hi: int, denom: int = 2):
    axes = []
    for d in range(1, len(vars) + 1):
        if vars.is_integer(d):
            axes.append(range(lo, hi + 1))
        else:
            axes.append([Fraction(k, denom) for k in range(lo * denom, hi * denom + 1)])
    return itertools.product(*axes)


def random_trapezoid(rng: random.Random, vars: VarTable, max_den: int = 6,
                     reference: tuple | None = None) -> tuple[Trapezoid, tuple]:
    """A trapezoid with fractional coefficients, satisfied by the returned reference."""
    n = len(vars)
    if reference is None:
        reference = tuple(
            rng.randint(-5, 5) if vars.is_integer(d) else Fraction(rng.randint(-20, 20), rng.randint(1, 4))
            for d in range(1, n + 1)
        )
    v = reference

    def frac(lo, hi):
        return Fraction(rng.randint(lo, hi), rng.randint(1, max_den))

    def poly_hitting(dim, target):
        coeffs = {d: frac(-4, 4) for d in range(1, dim) if rng.random() < 0.7}
        p = Polynomial.build(coeffs)
        return p + (target - poly_eval(p, v))

    intervals = []
    for dim in range(n, 0, -1):
        shape = rng.choice(["none", "lower", "upper", "pair", "pair", "pair", "eq"])
        x = v[dim - 1]
        if shape == "none":
            continue
        if shape == "eq":
            intervals.append(Interval(dim, equal=VariableBound(dim, RelOp.EQ, poly_hitting(dim, x))))
            continue
        lower = upper = None
        if shape in ("lower", "pair"):
            slack = frac(0, 8) if rng.random() < 0.7 else Fraction(rng.randint(0, 3))
            op = rng.choice([RelOp.GT, RelOp.GEQ])
            if op is RelOp.GT and slack == 0:
                slack = Fraction(1, rng.randint(1, max_den))
            lower = VariableBound(dim, op, poly_hitting(dim, x - slack))
        if shape in ("upper", "pair"):
            slack = frac(0, 8) if rng.random() < 0.7 else Fraction(rng.randint(0, 3))
            op = rng.choice([RelOp.LT, RelOp.LEQ])
            if op is RelOp.LT and slack == 0:
                slack = Fraction(1, rng.randint(1, max_den))
            upper = VariableBound(dim, op, poly_hitting(dim, x + slack))
        intervals.append(Interval(dim, lower=lower, upper=upper))
    t = Trapezoid(tuple(intervals))
    assert t.holds(v)
    return t, v


def compile_bound_check(t: Trapezoid):
    """Exact vectorized membership test for integer-scaled sample matrices.

    ``check(values, scale)`` takes an object array ``values`` (rows are
    samples, entries are integers equal to ``scale * coordinate``).
    """
    plans = []
    for b in t.bounds():
        diff = Polynomial.var(b.var) - b.poly
        lcd = poly_lcd(diff)
        plans.append((b.op, [(d - 1, int(c * lcd)) for d, c in diff.terms], int(diff.const * lcd)))

    def check(values: np.ndarray, scale: int) -> np.ndarray:
        ok = np.ones(values.shape[0], dtype=bool)
        for op, terms, const in plans:
            acc = np.full(values.shape[0], const * scale, dtype=object)
            for i, c in terms:
                acc = acc + c * values[:, i]
            ok &= np.asarray(_cmp(op, acc), dtype=bool)
        return ok

    return check


def _cmp(op, x):
    return {RelOp.EQ: x == 0, RelOp.LT: x < 0, RelOp.LEQ: x <= 0,
            RelOp.GT: x > 0, RelOp.GEQ: x >= 0}[op]


def scaled_matrix(samples, scale: int) -> np.ndarray:
    """Samples as an object matrix of integers ``scale * value``; fails if not representable."""
    rows = []
    for s in samples:
        row = []
        for x in s:
            y = Fraction(x) * scale
            assert y.denominator == 1, f"{x} not on the 1/{scale} lattice"
            row.append(int(y))
        rows.append(row)
    return np.array(rows, dtype=object)
