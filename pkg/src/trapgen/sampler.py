"""Random, type-consistent vectors from restricted trapezoids and complements.

Randomness comes from :class:`random.Random` (Mersenne Twister MT19937)
seeded with ``SamplerConfig.seed``; equal seeds give equal streams.

Per dimension the draw is uniform between the concrete endpoints: integers
uniformly in ``[ceil(lo), floor(hi)]``, rationals on the lattice
``lo + (hi - lo) * k / G``.  A missing side is replaced by a window of
width ``W`` next to the present one (or ``[-W, W]`` when both are missing).
"""

from __future__ import annotations

import math
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .core import Polynomial, Region, RelOp, Trapezoid, VarTable, VariableBound, poly_lcd
from .errors import BacktrackViolation, MalformedInput, UnsatisfiableComplement
from .restrictor import IDENTITY, ChangeOfBasis, RestrictionResult, restrict


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 0
    width: int = 1000
    granularity: int = 2 ** 20

    def __post_init__(self):
        if not 0 <= self.seed < 2 ** 64:
            raise MalformedInput("seed must be a 64-bit unsigned integer")
        if self.width < 1:
            raise MalformedInput("width must be positive")
        if self.granularity < 2:
            raise MalformedInput("granularity must be at least 2")

    def rng(self) -> random.Random:
        return random.Random(self.seed)


def _compile(p: Polynomial) -> tuple[tuple[tuple[int, int], ...], int, int]:
    """``p`` as ``(sum(c * w[i]) + const) / den`` with integer ``c``, ``const``."""
    d = poly_lcd(p)
    terms = tuple((dim - 1, int(c * d)) for dim, c in p.terms)
    return terms, int(p.const * d), d


def _eval(compiled, w):
    terms, s, den = compiled
    for i, c in terms:
        s += c * w[i]
    return s, den


def _as_value(s, den):
    if den == 1:
        return s
    return Fraction(s, den)


if sys.version_info >= (3, 12):
    def _fraction(n: int, d: int) -> Fraction:
        return Fraction._from_coprime_ints(n, d)
else:
    def _fraction(n: int, d: int) -> Fraction:
        return Fraction(n, d, _normalize=False)


def _eval_pair(compiled, nums, dens):
    """Evaluate on values stored as reduced ``nums[i] / dens[i]``; returns a reduced pair."""
    terms, num, den = compiled
    dd = 1
    for i, c in terms:
        d = dens[i]
        if d == dd:
            num += c * nums[i]
        elif d == 1:
            num += c * nums[i] * dd
        else:
            g = math.gcd(dd, d)
            f = d // g
            num = num * f + c * nums[i] * (dd // g)
            dd *= f
    dd *= den
    if dd == 1:
        return num, 1
    g = math.gcd(num, dd)
    return num // g, dd // g


def _empty(dim, lo, hi):
    return BacktrackViolation(f"dimension {dim}: no admissible value between {lo} and {hi}")


class TrapezoidSampler:
    """Reusable sampler for one trapezoid, optionally mapped through a basis.

    Values are carried as reduced integer pairs while sampling; rational
    outputs become :class:`Fraction` only at the end.
    """

    def __init__(self, trapezoid: Trapezoid, vars: VarTable,
                 cfg: SamplerConfig = SamplerConfig(), basis: ChangeOfBasis = IDENTITY,
                 rng: random.Random | None = None):
        self.vars = vars
        self.cfg = cfg
        self.rng = rng if rng is not None else cfg.rng()
        n = len(vars)
        if trapezoid.intervals and trapezoid.intervals[0].var > n:
            raise MalformedInput("trapezoid mentions undeclared dimensions")
        by_var = {i.var: i for i in trapezoid.intervals}
        plan = []
        for dim in range(1, n + 1):
            iv = by_var.get(dim)
            is_int = vars.is_integer(dim)
            if iv is None:
                plan.append((dim, is_int, None, None, None, False, False))
                continue
            eq = _compile(iv.equal.poly) if iv.equal else None
            lo = _compile(iv.lower.poly) if iv.lower else None
            hi = _compile(iv.upper.poly) if iv.upper else None
            plan.append((dim, is_int, eq, lo, hi,
                         bool(iv.lower and iv.lower.op.strict),
                         bool(iv.upper and iv.upper.op.strict)))
        self._plan = plan
        self._basis = [(d - 1, _compile(basis.subst[d])) for d in sorted(basis.subst)]
        self._int_dims = tuple(vars.is_integer(d) for d in range(1, n + 1))

    def _draw_pairs(self) -> tuple[list, list]:
        randrange = self.rng.randrange
        width = self.cfg.width
        g = self.cfg.granularity
        nums: list = []
        dens: list = []
        for dim, is_int, eq, lo, hi, lo_strict, hi_strict in self._plan:
            if eq is not None:
                a, b = _eval_pair(eq, nums, dens)
                if is_int and b != 1:
                    raise BacktrackViolation(f"dimension {dim}: equality has no integer value")
                nums.append(a)
                dens.append(b)
                continue
            if lo is not None:
                a, b = _eval_pair(lo, nums, dens)
            if hi is not None:
                c, e = _eval_pair(hi, nums, dens)
            if is_int:
                if lo is not None:
                    lo_v = a // b + 1 if lo_strict else -((-a) // b)
                if hi is not None:
                    hi_v = -((-c) // e) - 1 if hi_strict else c // e
                if lo is None:
                    lo_v = (hi_v if hi is not None else 0) - width
                if hi is None:
                    hi_v = lo_v + width if lo is not None else width
                if lo_v > hi_v:
                    raise _empty(dim, lo_v, hi_v)
                nums.append(randrange(lo_v, hi_v + 1))
                dens.append(1)
                continue
            if lo is None:
                if hi is None:
                    a, b, c, e = -width, 1, width, 1
                else:
                    a, b = c - width * e, e
            elif hi is None:
                c, e = a + width * b, b
            # common denominator
            if b == e:
                big_l, lo_n, hi_n = b, a, c
            else:
                q = math.gcd(b, e)
                big_l = b // q * e
                lo_n, hi_n = a * (big_l // b), c * (big_l // e)
            if lo_n > hi_n or (lo_n == hi_n and (lo_strict or hi_strict)):
                raise _empty(dim, Fraction(a, b), Fraction(c, e))
            if lo_n == hi_n:
                nums.append(a)
                dens.append(b)
                continue
            k = randrange(1, g) if (lo_strict or hi_strict) else randrange(0, g + 1)
            num = lo_n * g + (hi_n - lo_n) * k
            den = big_l * g
            q = math.gcd(num, den)
            nums.append(num // q)
            dens.append(den // q)
        return nums, dens

    def _finish(self, nums, dens) -> tuple:
        return tuple(n if d == 1 and is_int else _fraction(n, d)
                     for n, d, is_int in zip(nums, dens, self._int_dims))

    def draw_eta(self) -> tuple:
        """One sample of the trapezoid itself, before any change of basis."""
        return self._finish(*self._draw_pairs())

    def draw(self) -> tuple:
        """One sample mapped back to the original variables."""
        nums, dens = self._draw_pairs()
        if self._basis:
            out_n, out_d = list(nums), list(dens)
            for i, compiled in self._basis:
                out_n[i], out_d[i] = _eval_pair(compiled, nums, dens)
            nums, dens = out_n, out_d
        return self._finish(nums, dens)

    def stream(self, count: int) -> Iterator[tuple]:
        for _ in range(count):
            yield self.draw()


def sample_trapezoid(t: Trapezoid, vars: VarTable, rng: random.Random,
                     cfg: SamplerConfig = SamplerConfig()) -> tuple:
    return TrapezoidSampler(t, vars, cfg, rng=rng).draw_eta()


def sample_original(res: RestrictionResult, vars: VarTable, rng: random.Random,
                    cfg: SamplerConfig = SamplerConfig()) -> tuple:
    return TrapezoidSampler(res.trapezoid, vars, cfg, basis=res.basis, rng=rng).draw()


def _free_value(rng, is_int, cfg):
    w = cfg.width
    if is_int:
        return rng.randrange(-w, w + 1)
    return Fraction(-w) + Fraction(2 * w * rng.randrange(0, cfg.granularity + 1), cfg.granularity)


def _negated_value(rng, bound: VariableBound, p, is_int, cfg):
    """A value for the bound variable that falsifies ``x op p``."""
    op = bound.op
    w, g = cfg.width, cfg.granularity
    if op is RelOp.EQ:
        op = RelOp.LEQ if rng.randrange(2) else RelOp.GEQ
        # x > p  or  x < p
        strict_side = True
    else:
        strict_side = not op.strict
    # the negation points up (x >= p / x > p) for upper bounds, down for lower bounds
    up = op.is_upper
    if is_int:
        if up:
            start = math.floor(p) + 1 if strict_side else math.ceil(p)
            return rng.randrange(start, start + w + 1)
        start = math.ceil(p) - 1 if strict_side else math.floor(p)
        return rng.randrange(start - w, start + 1)
    k = rng.randrange(1 if strict_side else 0, g + 1)
    step = Fraction(w * k, g)
    return p + step if up else p - step


def sample_complement(t: Trapezoid, vars: VarTable, rng: random.Random,
                      cfg: SamplerConfig = SamplerConfig()) -> tuple:
    """A vector violating one randomly chosen bound of ``t``."""
    bounds = t.bounds()
    if not bounds:
        raise UnsatisfiableComplement("the complement of the empty trapezoid is unsatisfiable")
    bound = bounds[rng.randrange(len(bounds))]
    w = [_free_value(rng, vars.is_integer(d), cfg) for d in range(1, len(vars) + 1)]
    p = _as_value(*_eval(_compile(bound.poly), w))
    w[bound.var - 1] = _negated_value(rng, bound, p, vars.is_integer(bound.var), cfg)
    return tuple(w)


class RegionSampler:
    """Draws vectors from a generalized region.

    Positive regions are restricted once and then sampled; negative regions
    are sampled through their complement.
    """

    def __init__(self, region: Region, reference: Sequence, vars: VarTable,
                 cfg: SamplerConfig = SamplerConfig()):
        self.region = region
        self.vars = vars
        self.cfg = cfg
        self.rng = cfg.rng()
        self.restriction = None
        if region.is_positive:
            self.restriction = restrict(region.body, reference, vars)
            self._sampler = TrapezoidSampler(self.restriction.trapezoid, vars, cfg,
                                             basis=self.restriction.basis, rng=self.rng)
        elif not region.body:
            raise UnsatisfiableComplement("the region is the complement of the empty trapezoid")

    def draw(self) -> tuple:
        if self.restriction is not None:
            return self._sampler.draw()
        return sample_complement(self.region.body, self.vars, self.rng, self.cfg)

    def stream(self, count: int) -> Iterator[tuple]:
        for _ in range(count):
            yield self.draw()
