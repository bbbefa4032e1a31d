"""Brute-force checkers over finite grids.

Grid evaluation scales every coordinate by the grid denominator so formulas
and regions are evaluated with integer arithmetic only (``int64`` when the
magnitudes allow it, Python integers otherwise).  Results are exact.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .core import (And, Atom, Formula, Not, Or, Polynomial, Region, RelOp, Sign,
                   VarTable, VarType, formula_eval, poly_lcd, region_eval)
from .errors import MalformedInput
from .restrictor import ChangeOfBasis, DivisibilityConstraint, cob_apply_poly, cob_invert_apply

_INT64_SAFE = 2 ** 62


@dataclass(frozen=True)
class GridSpec:
    lo: int = -8
    hi: int = 8
    denom: int = 2

    def __post_init__(self):
        if self.lo > self.hi:
            raise MalformedInput("grid needs lo <= hi")
        if self.denom < 1:
            raise MalformedInput("grid denominator must be positive")

    def axis(self, is_int: bool) -> list:
        if is_int:
            return list(range(self.lo, self.hi + 1))
        d = self.denom
        return [Fraction(k, d) if d > 1 else k for k in range(self.lo * d, self.hi * d + 1)]


def grid_points(spec: GridSpec, vars: VarTable) -> Iterator[tuple]:
    axes = [spec.axis(vars.is_integer(d)) for d in range(1, len(vars) + 1)]
    return itertools.product(*axes)


class _Grid:
    """Grid coordinates scaled by ``denom`` as integer arrays, in chunks."""

    def __init__(self, spec: GridSpec, vars: VarTable, chunk: int = 1 << 18):
        self.spec = spec
        self.vars = vars
        self.scale = spec.denom
        self.axes = []
        for d in range(1, len(vars) + 1):
            step = self.scale if vars.is_integer(d) else 1
            self.axes.append(np.arange(spec.lo * self.scale, spec.hi * self.scale + 1, step,
                                       dtype=np.int64))
        self.shape = tuple(len(a) for a in self.axes)
        self.size = int(np.prod(self.shape)) if self.shape else 1
        self.chunk = max(1, chunk)
        self.kmax = max(abs(spec.lo), abs(spec.hi)) * self.scale

    def chunks(self) -> Iterator[tuple[int, list[np.ndarray]]]:
        for start in range(0, self.size, self.chunk):
            idx = np.arange(start, min(start + self.chunk, self.size))
            if not self.shape:
                yield start, []
                continue
            parts = np.unravel_index(idx, self.shape)
            yield start, [ax[p] for ax, p in zip(self.axes, parts)]

    def vector(self, cols: list[np.ndarray], i: int) -> tuple:
        out = []
        for d, col in enumerate(cols, start=1):
            k = int(col[i])
            val = Fraction(k, self.scale)
            out.append(int(val) if self.vars.is_integer(d) else val)
        return tuple(out)


def _linear(p: Polynomial, cols: list[np.ndarray], scale: int, kmax: int) -> np.ndarray:
    """``p`` times a positive integer, evaluated on scaled coordinates."""
    lcd = poly_lcd(p)
    coeffs = [(d, int(c * lcd)) for d, c in p.terms]
    const = int(p.const * lcd) * scale
    magnitude = sum(abs(c) for _, c in coeffs) * kmax + abs(const)
    n = len(cols[0]) if cols else 1
    if magnitude < _INT64_SAFE:
        acc = np.full(n, const, dtype=np.int64)
        for d, c in coeffs:
            acc += c * cols[d - 1]
    else:
        acc = np.full(n, const, dtype=object)
        for d, c in coeffs:
            acc = acc + c * cols[d - 1].astype(object)
    return acc


def _compare(op: RelOp, x: np.ndarray) -> np.ndarray:
    if op is RelOp.EQ:
        return x == 0
    if op is RelOp.LT:
        return x < 0
    if op is RelOp.LEQ:
        return x <= 0
    if op is RelOp.GT:
        return x > 0
    return x >= 0


def _eval_formula(f: Formula, grid: _Grid, cols) -> np.ndarray:
    if isinstance(f, Atom):
        diff = f.rel.lhs - f.rel.rhs
        return np.asarray(_compare(f.rel.op, _linear(diff, cols, grid.scale, grid.kmax)), dtype=bool)
    if isinstance(f, Not):
        return ~_eval_formula(f.child, grid, cols)
    parts = [_eval_formula(c, grid, cols) for c in f.children]
    if isinstance(f, And):
        return np.logical_and.reduce(parts)
    if isinstance(f, Or):
        return np.logical_or.reduce(parts)
    raise TypeError(f"not a formula: {f!r}")


def _eval_region(r: Region, grid: _Grid, cols) -> np.ndarray:
    n = len(cols[0]) if cols else 1
    inside = np.ones(n, dtype=bool)
    for b in r.body.bounds():
        diff = Polynomial.var(b.var) - b.poly
        inside &= np.asarray(_compare(b.op, _linear(diff, cols, grid.scale, grid.kmax)), dtype=bool)
    return inside if r.sign is Sign.POSITIVE else ~inside


def grid_formula_mask(f: Formula, spec: GridSpec, vars: VarTable) -> np.ndarray:
    """Truth value of ``f`` at every grid point, in :func:`grid_points` order."""
    grid = _Grid(spec, vars)
    return np.concatenate([_eval_formula(f, grid, cols) for _, cols in grid.chunks()])


def grid_region_mask(r: Region, spec: GridSpec, vars: VarTable) -> np.ndarray:
    grid = _Grid(spec, vars)
    return np.concatenate([_eval_region(r, grid, cols) for _, cols in grid.chunks()])


@dataclass
class InvariantReport:
    inv1_ok: bool
    inv2_violations: list = field(default_factory=list)
    points_checked: int = 0
    reference_satisfies: bool = True

    @property
    def ok(self) -> bool:
        return self.inv1_ok and not self.inv2_violations

    def summary(self) -> str:
        direction = "2.a (region implies formula)" if self.reference_satisfies else \
            "2.b (formula implies region)"
        lines = [
            f"invariant 1 (agreement at reference): {'ok' if self.inv1_ok else 'VIOLATED'}",
            f"invariant {direction}: "
            f"{'ok' if not self.inv2_violations else f'{len(self.inv2_violations)} violation(s) shown'}",
            f"grid points checked: {self.points_checked}",
        ]
        return "\n".join(lines)


def check_invariants(f: Formula, v: Sequence, r: Region, spec: GridSpec, vars: VarTable,
                     cap: int = 10, chunk: int = 1 << 18) -> InvariantReport:
    """Check agreement at ``v`` exactly and the under-approximation direction on the grid."""
    fv = formula_eval(f, v)
    report = InvariantReport(inv1_ok=(fv == region_eval(r, v)), reference_satisfies=fv)
    grid = _Grid(spec, vars, chunk)
    for _, cols in grid.chunks():
        fm = _eval_formula(f, grid, cols)
        rm = _eval_region(r, grid, cols)
        bad = (rm & ~fm) if fv else (fm & ~rm)
        report.points_checked += len(fm)
        for i in np.flatnonzero(bad)[: cap - len(report.inv2_violations)]:
            report.inv2_violations.append(grid.vector(cols, int(i)))
    return report


@dataclass
class SpanReport:
    symbolic_ok: bool
    solutions: int = 0
    missed: list = field(default_factory=list)
    points_checked: int = 0

    @property
    def ok(self) -> bool:
        return self.symbolic_ok and not self.missed


def check_divisibility_span(dc: DivisibilityConstraint, sigma: ChangeOfBasis, spec: GridSpec,
                            dims: int | None = None, cap: int = 10,
                            scalar_checks: int = 25) -> SpanReport:
    """Verify that ``sigma`` makes ``dc`` hold identically and covers every solution.

    All ``dims`` dimensions (default: ``dc.expr.dim``) are treated as integers.
    """
    m = dc.modulus
    image = cob_apply_poly(sigma, dc.expr)
    symbolic_ok = (image.const % m == 0 and all(c % m == 0 for _, c in image.terms))
    if dims is None:
        dims = max([dc.expr.dim, *sigma.subst])
    n = max(dims, 1)
    vars = VarTable(tuple(f"x{i}" for i in range(1, n + 1)), (VarType.INTEGER,) * n)
    grid = _Grid(GridSpec(spec.lo, spec.hi, 1), vars)
    report = SpanReport(symbolic_ok)
    plan = []
    for d in sorted(sigma.subst):
        e = sigma.subst[d]
        q = e.drop(d)
        qd = poly_lcd(q)
        plan.append((d, int(e.leading * qd), [(k, int(c * qd)) for k, c in q.terms],
                     int(q.const * qd), qd))
    scalar_left = scalar_checks
    for _, cols in grid.chunks():
        report.points_checked += len(cols[0])
        value = _linear(dc.expr, cols, 1, grid.kmax)
        sol = (value % m) == 0
        idx = np.flatnonzero(sol)
        report.solutions += len(idx)
        if not len(idx):
            continue
        w = [c[idx].astype(object) for c in cols]
        eta = list(w)
        ok = np.ones(len(idx), dtype=bool)
        for d, a, qterms, qconst, qd in plan:
            num = qd * w[d - 1] - qconst
            for k, c in qterms:
                num = num - c * eta[k - 1]
            divisible = (num % a) == 0
            ok &= divisible.astype(bool)
            eta[d - 1] = num // a
        for i in np.flatnonzero(~ok)[: cap - len(report.missed)]:
            report.missed.append(tuple(int(x[i]) for x in w))
        for i in range(min(scalar_left, len(idx))):
            # independent scalar path through cob_invert_apply
            point = tuple(int(x[i]) for x in w)
            try:
                back = cob_invert_apply(sigma, point)
                good = sigma.apply(back) == point
            except Exception:
                good = False
            if not good and len(report.missed) < cap:
                report.missed.append(point)
        scalar_left -= min(scalar_left, len(idx))
    return report


def naive_solve(f: Formula, vars: VarTable, spec: GridSpec, budget: int = 200,
                seed: int = 0) -> tuple | None:
    """Random grid probes, then an exhaustive scan; the first satisfying point or ``None``."""
    rng = random.Random(seed)
    axes = [spec.axis(vars.is_integer(d)) for d in range(1, len(vars) + 1)]
    for _ in range(budget):
        w = tuple(rng.choice(a) for a in axes)
        if formula_eval(f, w):
            return w
    grid = _Grid(spec, vars)
    for _, cols in grid.chunks():
        hits = np.flatnonzero(_eval_formula(f, grid, cols))
        if len(hits):
            w = grid.vector(cols, int(hits[0]))
            if not formula_eval(f, w):
                raise AssertionError("grid evaluation disagrees with formula_eval")
            return w
    return None
