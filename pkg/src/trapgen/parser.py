"""S-expression reader and writer for problems, regions and vectors.

Problem files look like::

    (vars (x int) (q rat))
    (assert (and (<= 0 x) (< q x)))
    (reference (x 1) (q 1/2))

Regions render as ``(region + ((<= y (+ (* 1/2 x) 3)) (>= x 0)))``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import (And, Atom, Formula, Interval, LinearRelation, Not, Number, Or,
                   Polynomial, Region, RelOp, Sign, Trapezoid, VarTable, VarType,
                   VariableBound, Vector)
from .errors import MalformedInput, ParseError

_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")
_RATIONAL = re.compile(r"-?\d+(/\d+)?$")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_.']*$")
_OPS = {op.value: op for op in RelOp}


@dataclass(frozen=True)
class Sym:
    text: str
    line: int
    col: int


class SList(list):
    line = 0
    col = 0


def read_sexprs(text: str) -> list:
    """Tokenize and read every top-level s-expression in ``text``."""
    stack: list[SList] = [SList()]
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        tok = m.group()
        col = pos - line_start + 1
        if tok == "(":
            lst = SList()
            lst.line, lst.col = line, col
            stack.append(lst)
        elif tok == ")":
            if len(stack) == 1:
                raise ParseError("unbalanced ')'", line, col)
            done = stack.pop()
            stack[-1].append(done)
        elif not tok[0].isspace() and tok[0] != ";":
            stack[-1].append(Sym(tok, line, col))
        newlines = tok.count("\n")
        if newlines:
            line += newlines
            line_start = pos + tok.rindex("\n") + 1
        pos = m.end()
    if len(stack) > 1:
        opened = stack[-1]
        raise ParseError("unclosed '('", opened.line, opened.col)
    return stack[0]


def _where(node) -> tuple[int, int]:
    return (node.line, node.col) if isinstance(node, (Sym, SList)) else (None, None)


def _fail(msg: str, node) -> ParseError:
    return ParseError(msg, *_where(node))


def _head(node) -> str | None:
    if isinstance(node, SList) and node and isinstance(node[0], Sym):
        return node[0].text
    return None


def parse_rational(node) -> Fraction:
    if not isinstance(node, Sym) or not _RATIONAL.match(node.text):
        raise _fail(f"expected a rational literal, got {_show(node)}", node)
    value = Fraction(node.text)
    if "/" in node.text and int(node.text.split("/")[1]) == 0:
        raise _fail("zero denominator", node)
    return value


def _show(node) -> str:
    if isinstance(node, Sym):
        return repr(node.text)
    return "a list" if isinstance(node, SList) else repr(node)


def parse_poly(node, vars: VarTable) -> Polynomial:
    if isinstance(node, Sym):
        if _RATIONAL.match(node.text):
            return Polynomial.constant(parse_rational(node))
        if not _NAME.match(node.text):
            raise _fail(f"bad polynomial term {node.text!r}", node)
        try:
            return Polynomial.var(vars.dim(node.text))
        except MalformedInput:
            raise _fail(f"undeclared variable {node.text!r}", node) from None
    head = _head(node)
    args = node[1:] if head else None
    if head == "+" and args:
        out = Polynomial()
        for a in args:
            out = out + parse_poly(a, vars)
        return out
    if head == "-" and len(args) == 2:
        return parse_poly(args[0], vars) - parse_poly(args[1], vars)
    if head == "*" and len(args) == 2:
        coeff = parse_rational(args[0])
        if not isinstance(args[1], Sym) or not _NAME.match(args[1].text):
            raise _fail("'*' takes a rational literal and a variable name", node)
        return parse_poly(args[1], vars).scale(coeff)
    raise _fail("malformed polynomial", node)


def parse_formula(node, vars: VarTable) -> Formula:
    head = _head(node)
    if head is None:
        raise _fail(f"expected a formula, got {_show(node)}", node)
    args = node[1:]
    if head in ("and", "or"):
        if not args:
            raise _fail(f"'{head}' needs at least one argument", node)
        kids = tuple(parse_formula(a, vars) for a in args)
        return And(kids) if head == "and" else Or(kids)
    if head == "not":
        if len(args) != 1:
            raise _fail("'not' takes exactly one argument", node)
        return Not(parse_formula(args[0], vars))
    if head in _OPS:
        if len(args) != 2:
            raise _fail(f"'{head}' takes exactly two polynomials", node)
        return Atom(LinearRelation(parse_poly(args[0], vars), _OPS[head], parse_poly(args[1], vars)))
    raise _fail(f"unknown formula operator {head!r}", node)


@dataclass(frozen=True)
class Problem:
    vars: VarTable
    formula: Formula
    reference: Vector | None = None


def _parse_vars(node) -> VarTable:
    names, types = [], []
    for decl in node[1:]:
        if not (isinstance(decl, SList) and len(decl) == 2 and all(isinstance(s, Sym) for s in decl)):
            raise _fail("variable declarations look like (name int) or (name rat)", decl)
        name, kind = decl[0].text, decl[1].text
        if not _NAME.match(name):
            raise _fail(f"bad variable name {name!r}", decl[0])
        if kind not in ("int", "rat"):
            raise _fail(f"unknown type {kind!r}; use int or rat", decl[1])
        if name in names:
            raise _fail(f"variable {name!r} declared twice", decl[0])
        names.append(name)
        types.append(VarType(kind))
    if not names:
        raise _fail("'vars' needs at least one declaration", node)
    try:
        return VarTable(tuple(names), tuple(types))
    except MalformedInput as exc:
        raise _fail(str(exc), node) from None


def _parse_reference(node, vars: VarTable) -> Vector:
    values: dict[int, Fraction] = {}
    for b in node[1:]:
        if not (isinstance(b, SList) and len(b) == 2 and isinstance(b[0], Sym)):
            raise _fail("reference bindings look like (name value)", b)
        try:
            d = vars.dim(b[0].text)
        except MalformedInput:
            raise _fail(f"undeclared variable {b[0].text!r}", b[0]) from None
        if d in values:
            raise _fail(f"variable {b[0].text!r} bound twice", b[0])
        value = parse_rational(b[1])
        if vars.is_integer(d):
            if value.denominator != 1:
                raise _fail(f"integer variable {b[0].text!r} given rational value {b[1].text}", b[1])
            value = int(value)
        values[d] = value
    missing = [vars.name(d) for d in range(1, len(vars) + 1) if d not in values]
    if missing:
        raise _fail(f"reference does not bind {', '.join(missing)}", node)
    return tuple(values[d] for d in range(1, len(vars) + 1))


def parse_problem(text: str) -> Problem:
    decls = read_sexprs(text)
    vars_node = assert_node = ref_node = None
    for d in decls:
        head = _head(d)
        if head == "vars":
            if vars_node is not None:
                raise _fail("more than one 'vars' declaration", d)
            vars_node = d
        elif head == "assert":
            if assert_node is not None:
                raise _fail("more than one 'assert'", d)
            assert_node = d
        elif head == "reference":
            if ref_node is not None:
                raise _fail("more than one 'reference'", d)
            ref_node = d
        else:
            raise _fail("expected (vars ...), (assert ...) or (reference ...)", d)
    if vars_node is None:
        raise ParseError("missing (vars ...)", 1, 1)
    if assert_node is None:
        raise ParseError("missing (assert ...)", 1, 1)
    vars = _parse_vars(vars_node)
    if len(assert_node) != 2:
        raise _fail("'assert' takes exactly one formula", assert_node)
    formula = parse_formula(assert_node[1], vars)
    reference = _parse_reference(ref_node, vars) if ref_node is not None else None
    return Problem(vars, formula, reference)


# Rendering


def render_rational(x: Number) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def render_poly(p: Polynomial, vars: VarTable) -> str:
    parts = []
    for d, c in p.terms:
        name = vars.name(d)
        parts.append(name if c == 1 else f"(* {render_rational(c)} {name})")
    if p.const != 0 or not parts:
        parts.append(render_rational(p.const))
    return parts[0] if len(parts) == 1 else f"(+ {' '.join(parts)})"


def render_bound(b: VariableBound, vars: VarTable) -> str:
    return f"({b.op.value} {vars.name(b.var)} {render_poly(b.poly, vars)})"


def render_region(r: Region, vars: VarTable) -> str:
    bounds = []
    for interval in r.body.intervals:
        # lower before upper so a re-parse rebuilds the same interval
        for b in (interval.equal, interval.lower, interval.upper):
            if b is not None:
                bounds.append(render_bound(b, vars))
    return f"(region {r.sign.value} ({' '.join(bounds)}))"


def parse_region(text: str, vars: VarTable) -> Region:
    nodes = read_sexprs(text)
    if len(nodes) != 1 or _head(nodes[0]) != "region" or len(nodes[0]) != 3:
        raise ParseError("expected (region +|- (bound ...))", 1, 1)
    _, sign, body = nodes[0]
    if not isinstance(sign, Sym) or sign.text not in ("+", "-"):
        raise _fail("region sign must be + or -", sign)
    if not isinstance(body, SList):
        raise _fail("region body must be a list of bounds", body)
    bounds = []
    for node in body:
        head = _head(node)
        if head not in _OPS or len(node) != 3 or not isinstance(node[1], Sym):
            raise _fail("bounds look like (op var polynomial)", node)
        var = parse_poly(node[1], vars)
        if var.is_constant or var.const != 0 or len(var.terms) != 1 or var.leading != 1:
            raise _fail("bound must name a variable", node[1])
        try:
            bounds.append(VariableBound(var.dim, _OPS[head], parse_poly(node[2], vars)))
        except MalformedInput as exc:
            raise _fail(str(exc), node) from None
    try:
        body_t = Trapezoid.from_bounds(bounds)
    except MalformedInput as exc:
        raise _fail(str(exc), body) from None
    return Region(Sign(sign.text), body_t)


def render_vector(v: Sequence[Number], vars: VarTable | None = None) -> str:
    return " ".join(render_rational(x) if type(x) is not int else str(x) for x in v)


def render_relation(rel: LinearRelation, vars: VarTable) -> str:
    return f"({rel.op.value} {render_poly(rel.lhs, vars)} {render_poly(rel.rhs, vars)})"


def render_formula(f: Formula, vars: VarTable) -> str:
    if isinstance(f, Atom):
        return render_relation(f.rel, vars)
    if isinstance(f, Not):
        return f"(not {render_formula(f.child, vars)})"
    word = "and" if isinstance(f, And) else "or"
    return f"({word} {' '.join(render_formula(c, vars) for c in f.children)})"


def render_problem(problem: Problem) -> str:
    vars = problem.vars
    decls = " ".join(f"({n} {t.value})" for n, t in zip(vars.names, vars.types))
    lines = [f"(vars {decls})", f"(assert {render_formula(problem.formula, vars)})"]
    if problem.reference is not None:
        binds = " ".join(f"({n} {render_rational(x)})" for n, x in zip(vars.names, problem.reference))
        lines.append(f"(reference {binds})")
    return "\n".join(lines) + "\n"
