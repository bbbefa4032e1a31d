"""``trapgen`` command line.

Exit codes: 0 ok, 1 usage or parse error, 2 no satisfying vector found,
3 invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import shlex
import sys
from typing import Sequence

from .core import Region, formula_eval
from .errors import TrapgenError
from .fuzz import Fuzzer, SpawnError
from .generalizer import generalize, region_complement
from .oracle import GridSpec, check_invariants, naive_solve
from .parser import (Problem, parse_problem, render_poly, render_rational, render_region,
                     render_vector)
from .restrictor import restrict
from .sampler import RegionSampler, SamplerConfig

EXIT_OK, EXIT_USAGE, EXIT_UNSAT, EXIT_VIOLATION = 0, 1, 2, 3


class CommandError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


def _load(path: str) -> Problem:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc}") from exc
    try:
        return parse_problem(text)
    except TrapgenError as exc:
        raise CommandError(f"{path}:{exc}") from exc


def _grid(args) -> GridSpec:
    try:
        return GridSpec(args.box[0], args.box[1], args.denom)
    except TrapgenError as exc:
        raise CommandError(str(exc)) from exc


def _reference(problem: Problem, args) -> tuple:
    if args.solve:
        v = naive_solve(problem.formula, problem.vars, _grid(args), args.budget, args.seed)
        if v is None:
            raise CommandError("no satisfying vector found in the search box", EXIT_UNSAT)
        return v
    if problem.reference is None:
        raise CommandError("problem has no (reference ...); pass --solve to search for one")
    return problem.reference


def _config(args) -> SamplerConfig:
    try:
        return SamplerConfig(args.seed, args.width, args.granularity)
    except TrapgenError as exc:
        raise CommandError(str(exc)) from exc


def _sampler(problem: Problem, args) -> tuple[Region, RegionSampler]:
    v = _reference(problem, args)
    region = generalize(problem.formula, v)
    try:
        return region, RegionSampler(region, v, problem.vars, _config(args))
    except TrapgenError as exc:
        raise CommandError(f"cannot sample region: {exc}") from exc


def cmd_generalize(args) -> int:
    problem = _load(args.file)
    v = _reference(problem, args)
    print(render_region(generalize(problem.formula, v), problem.vars))
    return EXIT_OK


def cmd_restrict(args) -> int:
    problem = _load(args.file)
    v = _reference(problem, args)
    region = generalize(problem.formula, v)
    print(render_region(region, problem.vars))
    if not region.is_positive:
        return EXIT_OK
    res = restrict(region.body, v, problem.vars)
    vars = problem.vars
    print(render_region(Region.positive(res.trapezoid), vars))
    subst = " ".join(f"({vars.name(d)} {render_poly(res.basis.subst[d], vars)})"
                     for d in sorted(res.basis.subst))
    print(f"(basis {subst})" if subst else "(basis)")
    print(f"(reference {' '.join(f'({n} {render_rational(x)})' for n, x in zip(vars.names, res.reference))})")
    return EXIT_OK


def cmd_sample(args) -> int:
    problem = _load(args.file)
    _, sampler = _sampler(problem, args)
    out = sys.stdout
    for vec in sampler.stream(args.count):
        out.write(render_vector(vec))
        out.write("\n")
    return EXIT_OK


def cmd_fuzz(args) -> int:
    problem = _load(args.file)
    _, sampler = _sampler(problem, args)
    argv = shlex.split(args.cmd)
    fuzzer = Fuzzer(lambda: render_vector(sampler.draw()), argv, per_vector=args.per_vector,
                    queue_size=args.queue_size, show_output=args.show_target_output)
    try:
        report = fuzzer.run(count=args.count, seconds=args.seconds)
    except SpawnError as exc:
        raise CommandError(str(exc)) from exc
    print(json.dumps(report.as_dict()))
    return EXIT_OK


def cmd_check(args) -> int:
    problem = _load(args.file)
    v = _reference(problem, args)
    region = generalize(problem.formula, v)
    if args.inject_bad_region:
        region = region_complement(region)
    report = check_invariants(problem.formula, v, region, _grid(args), problem.vars, cap=args.cap)
    print(f"reference: {render_vector(v)}")
    print(f"region: {render_region(region, problem.vars)}")
    print(report.summary())
    for w in report.inv2_violations:
        print(f"counterexample: {render_vector(w)}")
    return EXIT_OK if report.ok else EXIT_VIOLATION


def cmd_heatmap(args) -> int:
    problem = _load(args.file)
    try:
        dims = [problem.vars.dim(n) for n in args.vars]
    except TrapgenError as exc:
        raise CommandError(str(exc)) from exc
    region, sampler = _sampler(problem, args)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    for vec in sampler.stream(args.count):
        if region.is_positive and not formula_eval(problem.formula, vec):
            raise CommandError("internal error: sample does not satisfy the formula", EXIT_VIOLATION)
        writer.writerow([render_rational(vec[d - 1]) for d in dims])
    return EXIT_OK


def _add_solve(p: argparse.ArgumentParser, box_default=(-100, 100), denom_default=2):
    p.add_argument("--solve", action="store_true",
                   help="search the box for a satisfying reference vector")
    p.add_argument("--box", nargs=2, type=int, metavar=("LO", "HI"), default=list(box_default))
    p.add_argument("--denom", type=int, default=denom_default,
                   help="rational variables take multiples of 1/DENOM in the box")
    p.add_argument("--budget", type=int, default=1000, help="random probes before the scan")


def _add_sampling(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--width", type=int, default=1000, help="window for unbounded sides")
    p.add_argument("--granularity", type=int, default=2 ** 20,
                   help="lattice size for rational draws")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trapgen", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generalize", help="print the generalized region")
    p.add_argument("file")
    _add_solve(p)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_generalize)

    p = sub.add_parser("restrict", help="print the region, its restriction and the change of basis")
    p.add_argument("file")
    _add_solve(p)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_restrict)

    p = sub.add_parser("sample", help="print sampled vectors, one per line")
    p.add_argument("file")
    p.add_argument("--count", type=int, required=True)
    _add_solve(p)
    _add_sampling(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("fuzz", help="pipe sampled vectors into a target program")
    p.add_argument("file")
    p.add_argument("--cmd", required=True, help="target command line")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--count", type=int)
    group.add_argument("--seconds", type=float)
    p.add_argument("--per-vector", action="store_true",
                   help="start a fresh target for every vector")
    p.add_argument("--queue-size", type=int, default=1024)
    p.add_argument("--show-target-output", action="store_true")
    _add_solve(p)
    _add_sampling(p)
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("check", help="check the generalization invariants on a grid")
    p.add_argument("file")
    _add_solve(p, box_default=(-8, 8))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=10, help="counterexamples to print")
    p.add_argument("--inject-bad-region", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("heatmap", help="CSV projection of samples onto two variables")
    p.add_argument("file")
    p.add_argument("--vars", nargs=2, required=True, metavar=("X", "Y"))
    p.add_argument("--count", type=int, required=True)
    _add_solve(p)
    _add_sampling(p)
    p.set_defaults(func=cmd_heatmap)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors; 2 is reserved for "no satisfying vector"
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CommandError as exc:
        print(f"trapgen: {exc}", file=sys.stderr)
        return exc.code
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
