"""Exact-arithmetic values: polynomials, bounds, trapezoids, regions, formulas.

Dimensions are 1-based positions in a :class:`VarTable`; dimension 0 is the
constant term.  Vectors are plain tuples indexed by ``dim - 1`` whose entries
are ``int`` or :class:`fractions.Fraction`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import MalformedInput

Number = Union[int, Fraction]
Vector = tuple  # tuple[Number, ...], position i holds dimension i + 1


class VarType(enum.Enum):
    INTEGER = "int"
    RATIONAL = "rat"


@dataclass(frozen=True)
class VarTable:
    names: tuple[str, ...]
    types: tuple[VarType, ...]
    _index: Mapping[str, int] = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if len(self.names) != len(self.types):
            raise MalformedInput("names and types differ in length")
        index = {}
        for dim, name in enumerate(self.names, start=1):
            if name in index:
                raise MalformedInput(f"variable {name!r} declared twice")
            index[name] = dim
        seen_rational = None
        for name, kind in zip(self.names, self.types):
            if kind is VarType.RATIONAL:
                seen_rational = seen_rational or name
            elif seen_rational is not None:
                pairs = list(zip(self.names, self.types))
                order = [p for p in pairs if p[1] is VarType.INTEGER]
                order += [p for p in pairs if p[1] is VarType.RATIONAL]
                suggestion = " ".join(f"({n} {t.value})" for n, t in order)
                raise MalformedInput(
                    f"integer variable {name!r} declared after rational variable "
                    f"{seen_rational!r}; integers must come first: (vars {suggestion})"
                )
        object.__setattr__(self, "_index", index)

    @classmethod
    def of(cls, *pairs: tuple[str, str]) -> "VarTable":
        """Build from ``("x", "int"), ("q", "rat")`` style pairs."""
        return cls(tuple(p[0] for p in pairs), tuple(VarType(p[1]) for p in pairs))

    def __len__(self) -> int:
        return len(self.names)

    def dim(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise MalformedInput(f"undeclared variable {name!r}") from None

    def name(self, dim: int) -> str:
        return self.names[dim - 1]

    def is_integer(self, dim: int) -> bool:
        return self.types[dim - 1] is VarType.INTEGER

    def is_consistent(self, v: Sequence[Number]) -> bool:
        if len(v) != len(self.names):
            return False
        return all(
            t is VarType.RATIONAL or Fraction(x).denominator == 1
            for x, t in zip(v, self.types)
        )


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class Polynomial:
    """Linear polynomial ``const + sum(c * x_d)``.

    ``terms`` holds ``(dim, coeff)`` pairs, strictly descending by dim, no zeros.
    """

    terms: tuple[tuple[int, Fraction], ...] = ()
    const: Fraction = Fraction(0)

    @classmethod
    def build(cls, coeffs: Mapping[int, Number] | Iterable[tuple[int, Number]] = (),
              const: Number = 0) -> "Polynomial":
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict[int, Fraction] = {}
        for d, c in items:
            if d < 1:
                raise MalformedInput(f"dimension must be >= 1, got {d}")
            acc[d] = acc.get(d, Fraction(0)) + _frac(c)
        terms = tuple(sorted(((d, c) for d, c in acc.items() if c != 0), reverse=True))
        return cls(terms, _frac(const))

    @classmethod
    def var(cls, dim: int, coeff: Number = 1) -> "Polynomial":
        return cls.build({dim: coeff})

    @classmethod
    def constant(cls, c: Number) -> "Polynomial":
        return cls((), _frac(c))

    @property
    def dim(self) -> int:
        return self.terms[0][0] if self.terms else 0

    @property
    def is_constant(self) -> bool:
        return not self.terms

    @property
    def leading(self) -> Fraction:
        """Coefficient of the highest-dimension variable (0 for constants)."""
        return self.terms[0][1] if self.terms else Fraction(0)

    def coeff(self, dim: int) -> Fraction:
        for d, c in self.terms:
            if d == dim:
                return c
        return Fraction(0)

    def coeffs(self) -> dict[int, Fraction]:
        return dict(self.terms)

    def __add__(self, other: "Polynomial | Number") -> "Polynomial":
        if not isinstance(other, Polynomial):
            return Polynomial(self.terms, self.const + _frac(other))
        return poly_combine(1, self, 1, other)

    __radd__ = __add__

    def __sub__(self, other: "Polynomial | Number") -> "Polynomial":
        if not isinstance(other, Polynomial):
            return Polynomial(self.terms, self.const - _frac(other))
        return poly_combine(1, self, -1, other)

    def __rsub__(self, other: Number) -> "Polynomial":
        return (-self) + other

    def __neg__(self) -> "Polynomial":
        return self.scale(-1)

    def __mul__(self, k: Number) -> "Polynomial":
        return self.scale(k)

    __rmul__ = __mul__

    def __truediv__(self, k: Number) -> "Polynomial":
        return self.scale(1 / _frac(k))

    def scale(self, k: Number) -> "Polynomial":
        k = _frac(k)
        if k == 0:
            return Polynomial()
        return Polynomial(tuple((d, c * k) for d, c in self.terms), self.const * k)

    def drop(self, dim: int) -> "Polynomial":
        """The polynomial without its ``dim`` term."""
        return Polynomial(tuple(t for t in self.terms if t[0] != dim), self.const)

    def __call__(self, v: Sequence[Number]) -> Fraction:
        return poly_eval(self, v)


def poly_eval(p: Polynomial, v: Sequence[Number]) -> Fraction:
    total = p.const
    try:
        for d, c in p.terms:
            total += c * v[d - 1]
    except IndexError:
        raise MalformedInput(f"vector of length {len(v)} does not assign dimension {p.dim}") from None
    return total


def poly_lcd(p: Polynomial) -> int:
    """Least common denominator of the coefficients and the constant."""
    return math.lcm(p.const.denominator, *(c.denominator for _, c in p.terms))


def poly_combine(a: Number, p: Polynomial, b: Number, q: Polynomial) -> Polynomial:
    """Return ``a*p + b*q``."""
    a, b = _frac(a), _frac(b)
    acc: dict[int, Fraction] = {}
    if a:
        for d, c in p.terms:
            acc[d] = a * c
    if b:
        for d, c in q.terms:
            acc[d] = acc.get(d, 0) + b * c
    terms = tuple(sorted(((d, c) for d, c in acc.items() if c != 0), reverse=True))
    return Polynomial(terms, a * p.const + b * q.const)


class RelOp(enum.Enum):
    EQ = "="
    LT = "<"
    LEQ = "<="
    GT = ">"
    GEQ = ">="

    def holds(self, a, b) -> bool:
        if self is RelOp.EQ:
            return a == b
        if self is RelOp.LT:
            return a < b
        if self is RelOp.LEQ:
            return a <= b
        if self is RelOp.GT:
            return a > b
        return a >= b

    @property
    def is_upper(self) -> bool:
        return self in (RelOp.LT, RelOp.LEQ)

    @property
    def is_lower(self) -> bool:
        return self in (RelOp.GT, RelOp.GEQ)

    @property
    def strict(self) -> bool:
        return self in (RelOp.LT, RelOp.GT)

    @property
    def mirrored(self) -> "RelOp":
        """The operator with its arguments swapped (``a < b`` iff ``b > a``)."""
        return _MIRROR[self]


_MIRROR = {RelOp.EQ: RelOp.EQ, RelOp.LT: RelOp.GT, RelOp.LEQ: RelOp.GEQ,
           RelOp.GT: RelOp.LT, RelOp.GEQ: RelOp.LEQ}


@dataclass(frozen=True)
class LinearRelation:
    lhs: Polynomial
    op: RelOp
    rhs: Polynomial

    def holds(self, v: Sequence[Number]) -> bool:
        return self.op.holds(poly_eval(self.lhs, v), poly_eval(self.rhs, v))


# Formulas


@dataclass(frozen=True)
class Atom:
    rel: LinearRelation


@dataclass(frozen=True)
class Not:
    child: "Formula"


@dataclass(frozen=True)
class And:
    children: tuple["Formula", ...]

    def __post_init__(self):
        if not self.children:
            raise MalformedInput("'and' needs at least one argument")


@dataclass(frozen=True)
class Or:
    children: tuple["Formula", ...]

    def __post_init__(self):
        if not self.children:
            raise MalformedInput("'or' needs at least one argument")


Formula = Union[Atom, Not, And, Or]


def formula_eval(f: Formula, v: Sequence[Number]) -> bool:
    if isinstance(f, Atom):
        return f.rel.holds(v)
    if isinstance(f, Not):
        return not formula_eval(f.child, v)
    if isinstance(f, And):
        return all(formula_eval(c, v) for c in f.children)
    if isinstance(f, Or):
        return any(formula_eval(c, v) for c in f.children)
    raise TypeError(f"not a formula: {f!r}")


def formula_atoms(f: Formula) -> Iterator[LinearRelation]:
    if isinstance(f, Atom):
        yield f.rel
    elif isinstance(f, Not):
        yield from formula_atoms(f.child)
    else:
        for c in f.children:
            yield from formula_atoms(c)


# Bounds, intervals, trapezoids, regions


@dataclass(frozen=True)
class VariableBound:
    """The normalized bound ``x_var op poly`` with ``poly.dim < var``."""

    var: int
    op: RelOp
    poly: Polynomial

    def __post_init__(self):
        if self.var < 1:
            raise MalformedInput(f"bound variable dimension must be >= 1, got {self.var}")
        if self.poly.dim >= self.var:
            raise MalformedInput(
                f"bound on dimension {self.var} is not normalized: polynomial has dimension {self.poly.dim}"
            )

    def holds(self, v: Sequence[Number]) -> bool:
        return self.op.holds(v[self.var - 1], poly_eval(self.poly, v))

    def as_relation(self) -> LinearRelation:
        return LinearRelation(Polynomial.var(self.var), self.op, self.poly)


@dataclass(frozen=True)
class Interval:
    """All bounds on one variable: an equality, or at most one lower and one upper."""

    var: int
    lower: VariableBound | None = None
    upper: VariableBound | None = None
    equal: VariableBound | None = None

    def __post_init__(self):
        parts = [b for b in (self.lower, self.upper, self.equal) if b is not None]
        if not parts:
            raise MalformedInput("an interval needs at least one bound")
        if self.equal is not None and len(parts) > 1:
            raise MalformedInput("an equality interval cannot carry other bounds")
        if any(b.var != self.var for b in parts):
            raise MalformedInput("interval bounds must share the interval variable")
        if self.lower is not None and not self.lower.op.is_lower:
            raise MalformedInput("lower slot holds a non-lower bound")
        if self.upper is not None and not self.upper.op.is_upper:
            raise MalformedInput("upper slot holds a non-upper bound")
        if self.equal is not None and self.equal.op is not RelOp.EQ:
            raise MalformedInput("equal slot holds a non-equality bound")

    @classmethod
    def of(cls, bound: VariableBound) -> "Interval":
        if bound.op is RelOp.EQ:
            return cls(bound.var, equal=bound)
        if bound.op.is_lower:
            return cls(bound.var, lower=bound)
        return cls(bound.var, upper=bound)

    @property
    def is_pair(self) -> bool:
        return self.lower is not None and self.upper is not None

    @property
    def is_equality(self) -> bool:
        return self.equal is not None

    def bounds(self) -> tuple[VariableBound, ...]:
        if self.equal is not None:
            return (self.equal,)
        return tuple(b for b in (self.lower, self.upper) if b is not None)

    def holds(self, v: Sequence[Number]) -> bool:
        return all(b.holds(v) for b in self.bounds())


@dataclass(frozen=True)
class Trapezoid:
    """Intervals in strictly descending variable order."""

    intervals: tuple[Interval, ...] = ()

    def __post_init__(self):
        for a, b in zip(self.intervals, self.intervals[1:]):
            if a.var <= b.var:
                raise MalformedInput("trapezoid intervals must be strictly descending by dimension")

    @classmethod
    def from_bounds(cls, bounds: Iterable[VariableBound]) -> "Trapezoid":
        """Group bounds by variable; at most one lower/upper/equality each."""
        slots: dict[int, dict[str, VariableBound]] = {}
        for b in bounds:
            key = "equal" if b.op is RelOp.EQ else ("lower" if b.op.is_lower else "upper")
            slot = slots.setdefault(b.var, {})
            if key in slot:
                raise MalformedInput(f"two {key} bounds on dimension {b.var}")
            slot[key] = b
        return cls(tuple(Interval(var, **slots[var]) for var in sorted(slots, reverse=True)))

    def __len__(self) -> int:
        return len(self.intervals)

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def bounds(self) -> tuple[VariableBound, ...]:
        return tuple(b for i in self.intervals for b in i.bounds())

    def interval(self, var: int) -> Interval | None:
        for i in self.intervals:
            if i.var == var:
                return i
        return None

    def holds(self, v: Sequence[Number]) -> bool:
        return all(i.holds(v) for i in self.intervals)


class Sign(enum.Enum):
    POSITIVE = "+"
    NEGATIVE = "-"


@dataclass(frozen=True)
class Region:
    sign: Sign
    body: Trapezoid = Trapezoid()

    @classmethod
    def positive(cls, body: Trapezoid = Trapezoid()) -> "Region":
        return cls(Sign.POSITIVE, body)

    @classmethod
    def negative(cls, body: Trapezoid = Trapezoid()) -> "Region":
        return cls(Sign.NEGATIVE, body)

    @property
    def is_positive(self) -> bool:
        return self.sign is Sign.POSITIVE


def region_eval(r: Region, v: Sequence[Number]) -> bool:
    inside = r.body.holds(v)
    return inside if r.sign is Sign.POSITIVE else not inside
