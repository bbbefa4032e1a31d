"""Generalize a reference vector of a linear formula into a trapezoidal region.

The result ``R`` of :func:`generalize` agrees with the formula at the
reference vector ``v`` and under-approximates it on the side ``v`` lies on:
if ``F[v]`` then ``R`` implies ``F`` everywhere, otherwise ``F`` implies ``R``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

from .core import (And, Atom, Formula, Interval, LinearRelation, Not, Number, Or,
                   Polynomial, Region, RelOp, Sign, Trapezoid, VariableBound,
                   poly_eval)
from .errors import TrapgenError


@dataclass
class RewriteStats:
    """Counts of same-variable rewrites and termination-measure checks."""

    rewrites: int = 0
    measure_failures: int = 0


STATS = RewriteStats()

_FLIP_FALSE = {
    # x op P false at v  ->  complement of the bound that is true there
    RelOp.LT: RelOp.GEQ,
    RelOp.LEQ: RelOp.GT,
    RelOp.GT: RelOp.LEQ,
    RelOp.GEQ: RelOp.LT,
}


def normalize_relation(rel: LinearRelation, v: Sequence[Number]) -> Region:
    """Turn one linear relation into a singleton region whose bound holds at ``v``."""
    op = rel.op
    if op in (RelOp.GT, RelOp.GEQ):
        diff, op = rel.rhs - rel.lhs, op.mirrored
    else:
        diff = rel.lhs - rel.rhs
    # now: diff op 0 with op in {<, <=, =}
    if diff.is_constant:
        return Region.positive() if op.holds(diff.const, 0) else Region.negative()

    n, c = diff.terms[0]
    bound_poly = -(diff.drop(n) / c)
    if op is RelOp.EQ:
        bound = VariableBound(n, RelOp.EQ, bound_poly)
    elif c > 0:
        bound = VariableBound(n, op, bound_poly)
    else:
        bound = VariableBound(n, op.mirrored, bound_poly)

    x, p = v[n - 1], poly_eval(bound_poly, v)
    if bound.op.holds(x, p):
        return Region.positive(Trapezoid((Interval.of(bound),)))
    if bound.op is RelOp.EQ:
        flipped = RelOp.GT if x > p else RelOp.LT
    else:
        flipped = _FLIP_FALSE[bound.op]
    return Region.negative(Trapezoid((Interval.of(VariableBound(n, flipped, bound_poly)),)))


def _residual_op(kept: RelOp, dropped: RelOp) -> RelOp:
    # kept inclusive, dropped strict needs a strict gap; every other mix is inclusive
    return RelOp.LT if (not kept.strict and dropped.strict) else RelOp.LEQ


def intersect_same_var(b1: VariableBound, b2: VariableBound, v: Sequence[Number]
                       ) -> tuple[VariableBound, LinearRelation] | None:
    """Merge two bounds on one variable into a kept bound plus a lower-dimension residual.

    Returns ``None`` when one bound is an upper and the other a lower bound;
    those pair up into an interval untouched.
    """
    if b1.var != b2.var:
        raise ValueError("bounds constrain different variables")
    if b2.op is RelOp.EQ and b1.op is not RelOp.EQ:
        b1, b2 = b2, b1
    p, q = b1.poly, b2.poly
    if b1.op is RelOp.EQ:
        if b2.op is RelOp.EQ:
            return b1, LinearRelation(p, RelOp.EQ, q)
        # x = P together with x op Q leaves P op Q
        return b1, LinearRelation(p, b2.op, q)
    if b1.op.is_upper != b2.op.is_upper:
        return None

    pv, qv = poly_eval(p, v), poly_eval(q, v)
    if b1.op.is_upper:
        # keep the tighter upper bound K; residual K (<|<=) dropped
        for kept, dropped, kv, dv in ((b1, b2, pv, qv), (b2, b1, qv, pv)):
            rop = _residual_op(kept.op, dropped.op)
            if rop.holds(kv, dv):
                return kept, LinearRelation(kept.poly, rop, dropped.poly)
    else:
        for kept, dropped, kv, dv in ((b1, b2, pv, qv), (b2, b1, qv, pv)):
            rop = _residual_op(kept.op, dropped.op)
            if rop.holds(dv, kv):
                return kept, LinearRelation(dropped.poly, rop, kept.poly)
    raise TrapgenError("bound intersection side conditions not met; bounds are not both true at the reference vector")


def _check_measure(var: int, residual_region: Region) -> None:
    # rewrite replaces two bounds of dimension var by one of dimension var plus
    # at most one residual bound of lower dimension
    STATS.rewrites += 1
    before = 2 * var
    after = var + sum(b.var for b in residual_region.body.bounds())
    if not after < before:
        STATS.measure_failures += 1
    assert after < before, f"termination measure did not decrease ({before} -> {after})"


def intersect_bounds(bounds: Iterable[VariableBound], v: Sequence[Number]) -> Trapezoid:
    """Reduce a set of bounds, all true at ``v``, to a trapezoid.

    Variables are processed from the highest dimension down; residuals only
    ever land on lower dimensions, so each dimension is visited once.
    """
    pending: dict[int, list[VariableBound]] = {}
    for b in bounds:
        pending.setdefault(b.var, []).append(b)
    intervals = []
    while pending:
        var = max(pending)
        todo = pending.pop(var)
        eq = next((b for b in todo if b.op is RelOp.EQ), None)
        slots: dict[str, VariableBound] = {}
        if eq is not None:
            slots["equal"] = eq
            todo = [b for b in todo if b is not eq]
        for b in todo:
            key = "equal" if "equal" in slots else ("upper" if b.op.is_upper else "lower")
            if key not in slots:
                slots[key] = b
                continue
            kept, residual = intersect_same_var(slots[key], b, v)
            slots[key] = kept
            reg = normalize_relation(residual, v)
            if not reg.is_positive:
                raise TrapgenError("residual relation is false at the reference vector")
            _check_measure(var, reg)
            for rb in reg.body.bounds():
                pending.setdefault(rb.var, []).append(rb)
        intervals.append(Interval(var, **slots))
    return Trapezoid(tuple(intervals))


def trapezoid_intersect(ta: Trapezoid, tb: Trapezoid, v: Sequence[Number]) -> Trapezoid:
    if not ta:
        return tb
    if not tb:
        return ta
    return intersect_bounds(ta.bounds() + tb.bounds(), v)


def region_complement(r: Region) -> Region:
    return Region(Sign.NEGATIVE if r.sign is Sign.POSITIVE else Sign.POSITIVE, r.body)


def region_intersect(ra: Region, rb: Region, v: Sequence[Number]) -> Region:
    if not ra.is_positive:
        return ra
    if not rb.is_positive:
        return rb
    return Region.positive(trapezoid_intersect(ra.body, rb.body, v))


def generalize(f: Formula, v: Sequence[Number]) -> Region:
    if isinstance(f, Atom):
        return normalize_relation(f.rel, v)
    if isinstance(f, Not):
        return region_complement(generalize(f.child, v))
    if isinstance(f, And):
        return reduce(lambda acc, g: region_intersect(acc, generalize(g, v), v),
                      f.children[1:], generalize(f.children[0], v))
    if isinstance(f, Or):
        def _or(acc: Region, g: Formula) -> Region:
            rg = generalize(g, v)
            return region_complement(
                region_intersect(region_complement(acc), region_complement(rg), v))
        return reduce(_or, f.children[1:], generalize(f.children[0], v))
    raise TypeError(f"not a formula: {f!r}")
