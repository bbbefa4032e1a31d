"""Restrict a trapezoid so ascending-order sampling never backtracks.

The pass walks intervals from the highest dimension down, applying bound
fixing, the integer-equality change of basis and interval restriction.  Any
change of basis found on the way is accumulated so samples of the restricted
trapezoid can be mapped back to the original variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .core import (Interval, LinearRelation, Number, Polynomial, RelOp, Trapezoid,
                   VarTable, VariableBound, poly_eval, poly_lcd)
from .errors import MalformedInput, SpanViolation, TrapgenError, UnsolvableDivisibility
from .generalizer import normalize_relation, trapezoid_intersect


@dataclass(frozen=True)
class ChangeOfBasis:
    """Triangular substitution ``x_i -> a_i * x_i + Q_i`` with ``a_i`` a positive integer.

    Dimensions missing from ``subst`` map to themselves.
    """

    subst: Mapping[int, Polynomial] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for d, e in self.subst.items():
            if e.dim != d:
                raise MalformedInput(f"substitution for dimension {d} has dimension {e.dim}")
            a = e.leading
            if a <= 0 or a.denominator != 1:
                raise MalformedInput(f"substitution for dimension {d} has leading coefficient {a}")
            if e != Polynomial.var(d):
                clean[d] = e
        object.__setattr__(self, "subst", clean)

    def __hash__(self):
        return hash(tuple(sorted(self.subst.items())))

    @property
    def is_identity(self) -> bool:
        return not self.subst

    def image(self, dim: int) -> Polynomial:
        return self.subst.get(dim) or Polynomial.var(dim)

    def apply(self, eta: Sequence[Number]) -> tuple:
        """``sigma[eta]``: evaluate every substitution at ``eta``."""
        out = list(eta)
        for d, e in self.subst.items():
            out[d - 1] = _as_number(poly_eval(e, eta))
        return tuple(out)


IDENTITY = ChangeOfBasis()


def _as_number(x: Fraction) -> Number:
    return int(x) if x.denominator == 1 else x


@dataclass(frozen=True)
class DivisibilityConstraint:
    """``modulus | expr`` over integer variables."""

    modulus: int
    expr: Polynomial

    def __post_init__(self):
        if self.modulus < 1:
            raise MalformedInput("modulus must be positive")
        if poly_lcd(self.expr) != 1:
            raise MalformedInput("divisibility expression needs integer coefficients")

    def holds(self, v: Sequence[Number]) -> bool:
        return poly_eval(self.expr, v) % self.modulus == 0


@dataclass(frozen=True)
class RestrictionResult:
    trapezoid: Trapezoid
    basis: ChangeOfBasis
    reference: tuple


# Change-of-basis algebra


def cob_apply_poly(sigma: ChangeOfBasis, p: Polynomial) -> Polynomial:
    if sigma.is_identity:
        return p
    out = Polynomial.constant(p.const)
    for d, c in p.terms:
        out = out + sigma.image(d).scale(c)
    return out


def cob_apply_bound(sigma: ChangeOfBasis, b: VariableBound) -> VariableBound:
    e = sigma.image(b.var)
    a = e.leading
    return VariableBound(b.var, b.op, (cob_apply_poly(sigma, b.poly) - e.drop(b.var)) / a)


def cob_apply_interval(sigma: ChangeOfBasis, i: Interval) -> Interval:
    def f(b):
        return None if b is None else cob_apply_bound(sigma, b)
    return Interval(i.var, lower=f(i.lower), upper=f(i.upper), equal=f(i.equal))


def cob_apply_trapezoid(sigma: ChangeOfBasis, t: Trapezoid) -> Trapezoid:
    if sigma.is_identity:
        return t
    return Trapezoid(tuple(cob_apply_interval(sigma, i) for i in t.intervals))


def cob_compose(acc: ChangeOfBasis, nxt: ChangeOfBasis) -> ChangeOfBasis:
    """Basis with ``result[eta] == acc[nxt[eta]]``."""
    if nxt.is_identity:
        return acc
    dims = set(acc.subst) | set(nxt.subst)
    return ChangeOfBasis({d: cob_apply_poly(nxt, acc.image(d)) for d in dims})


def cob_invert_apply(sigma: ChangeOfBasis, v: Sequence[Number]) -> tuple:
    """Solve ``sigma[eta] == v`` for ``eta``, lowest dimension first."""
    eta = list(v)
    for d in sorted(sigma.subst):
        e = sigma.subst[d]
        a = e.leading
        val = (Fraction(v[d - 1]) - poly_eval(e.drop(d), eta)) / a
        if val.denominator != 1:
            raise SpanViolation(f"dimension {d}: no integral preimage of {v[d - 1]}")
        eta[d - 1] = int(val)
    return tuple(eta)


# Divisibility


def tcob_for_divisibility(dc: DivisibilityConstraint) -> ChangeOfBasis:
    """Change of basis under which ``dc.modulus`` divides ``dc.expr`` identically.

    Every solution of the constraint is in the span of the returned basis.
    """
    subst: dict[int, Polynomial] = {}
    _tcob(dc.modulus, dc.expr, subst)
    return ChangeOfBasis(subst)


def _tcob(m: int, e: Polynomial, subst: dict[int, Polynomial]) -> None:
    if e.is_constant:
        if int(e.const) % m:
            raise UnsolvableDivisibility(f"{m} does not divide constant {e.const}")
        return
    n, c = e.terms[0]
    c = int(c)
    rest = e.drop(n)
    g = math.gcd(c, m)
    c1, m1 = c // g, m // g
    _tcob(g, rest, subst)
    reduced = cob_apply_poly(ChangeOfBasis(dict(subst)), rest) / g
    inv = pow(c1 % m1, -1, m1)
    subst[n] = Polynomial.var(n, m1) - reduced.scale(inv)


# Restriction steps


def bound_fix(interval: Interval, vars: VarTable) -> Interval:
    """Turn strict bounds on an integer variable into the equivalent inclusive ones."""
    if not vars.is_integer(interval.var) or interval.is_equality:
        return interval

    def fix(b: VariableBound | None) -> VariableBound | None:
        if b is None or not b.op.strict:
            return b
        step = Fraction(1, poly_lcd(b.poly))
        if b.op is RelOp.LT:
            return VariableBound(b.var, RelOp.LEQ, b.poly - step)
        return VariableBound(b.var, RelOp.GEQ, b.poly + step)

    return Interval(interval.var, lower=fix(interval.lower), upper=fix(interval.upper))


def _divisibility_basis(p: Polynomial) -> tuple[ChangeOfBasis, int]:
    """Basis making the integer-variable polynomial ``p`` integer valued everywhere."""
    d = poly_lcd(p)
    if d == 1:
        return IDENTITY, 1
    return tcob_for_divisibility(DivisibilityConstraint(d, p.scale(d))), d


def _integer_equality(interval: Interval, t: Trapezoid, v: Sequence[Number]):
    poly = interval.equal.poly
    sigma, d = _divisibility_basis(poly)
    if sigma.is_identity:
        return interval, t, IDENTITY, tuple(v)
    new_eq = VariableBound(interval.var, RelOp.EQ, cob_apply_poly(sigma, poly))
    v2 = cob_invert_apply(sigma, v)
    return Interval(interval.var, equal=new_eq), cob_apply_trapezoid(sigma, t), sigma, v2


def integer_equality_step(interval: Interval, t: Trapezoid, acc: ChangeOfBasis,
                          v: Sequence[Number]):
    """Rewrite ``x = P`` on an integer ``x`` so ``P`` is integral for every integer input."""
    interval, t, sigma, v = _integer_equality(interval, t, v)
    return interval, t, cob_compose(acc, sigma), v


def _restrict_with(rel: LinearRelation, t: Trapezoid, v: Sequence[Number]) -> Trapezoid:
    region = normalize_relation(rel, v)
    if not region.is_positive:
        raise TrapgenError("domain restriction is false at the reference vector")
    return trapezoid_intersect(t, region.body, v)


def _interval_restrict(interval: Interval, t: Trapezoid, v: Sequence[Number], vars: VarTable):
    if not interval.is_pair:
        return interval, t, IDENTITY, tuple(v)
    lo, hi = interval.lower, interval.upper
    n = interval.var
    if not vars.is_integer(n) or poly_lcd(lo.poly) == 1 or poly_lcd(hi.poly) == 1:
        strict = lo.op.strict or hi.op.strict
        rel = LinearRelation(lo.poly, RelOp.LT if strict else RelOp.LEQ, hi.poly)
        return interval, _restrict_with(rel, t, v), IDENTITY, tuple(v)

    if lo.op.strict or hi.op.strict:
        raise TrapgenError("integer interval still has strict bounds; run bound_fix first")
    lv, uv = poly_eval(lo.poly, v), poly_eval(hi.poly, v)
    if lv + 1 <= uv:
        rel = LinearRelation(lo.poly + 1, RelOp.LEQ, hi.poly)
        return interval, _restrict_with(rel, t, v), IDENTITY, tuple(v)

    # only x[v] fits: pin the lower bound to it and make it integral
    tight = lo.poly + (v[n - 1] - lv)
    sigma, _ = _divisibility_basis(tight)
    new_lo = cob_apply_poly(sigma, tight)
    new_hi = cob_apply_poly(sigma, hi.poly)
    v2 = cob_invert_apply(sigma, v)
    t2 = cob_apply_trapezoid(sigma, t)
    new_interval = Interval(n, lower=VariableBound(n, RelOp.GEQ, new_lo),
                            upper=VariableBound(n, RelOp.LEQ, new_hi))
    t3 = _restrict_with(LinearRelation(new_lo, RelOp.LEQ, new_hi), t2, v2)
    return new_interval, t3, sigma, v2


def interval_restrict_step(interval: Interval, t: Trapezoid, acc: ChangeOfBasis,
                           v: Sequence[Number], vars: VarTable):
    interval, t, sigma, v = _interval_restrict(interval, t, v, vars)
    return interval, t, cob_compose(acc, sigma), v


def restrict(t: Trapezoid, v: Sequence[Number], vars: VarTable) -> RestrictionResult:
    if not t.holds(v):
        raise MalformedInput("reference vector does not satisfy the trapezoid")
    v = tuple(v)
    acc = IDENTITY
    done: list[Interval] = []
    rest = t
    while rest:
        interval, rest = rest.intervals[0], Trapezoid(rest.intervals[1:])
        interval = bound_fix(interval, vars)
        sigma = IDENTITY
        if interval.is_equality and vars.is_integer(interval.var):
            interval, rest, sigma, v = _integer_equality(interval, rest, v)
        elif interval.is_pair:
            interval, rest, sigma, v = _interval_restrict(interval, rest, v, vars)
        if not sigma.is_identity:
            # intervals already emitted mention the variables sigma rewrites
            done = [cob_apply_interval(sigma, i) for i in done]
            acc = cob_compose(acc, sigma)
        done.append(interval)
    return RestrictionResult(Trapezoid(tuple(done)), acc, v)
