"""Trapezoidal generalization, restriction and sampling of linear constraints."""

from .core import (And, Atom, Interval, LinearRelation, Not, Or, Polynomial, Region, RelOp,
                   Sign, Trapezoid, VarTable, VarType, VariableBound, formula_eval, poly_combine,
                   poly_eval, poly_lcd, region_eval)
from .errors import (BacktrackViolation, MalformedInput, ParseError, SpanViolation, TrapgenError,
                     UnsatisfiableComplement, UnsolvableDivisibility)
from .generalizer import (generalize, intersect_same_var, normalize_relation, region_complement,
                          region_intersect, trapezoid_intersect)
from .parser import Problem, parse_problem, parse_region, render_region, render_vector
from .restrictor import (ChangeOfBasis, DivisibilityConstraint, RestrictionResult, bound_fix,
                         cob_apply_poly, cob_apply_trapezoid, cob_compose, cob_invert_apply,
                         integer_equality_step, interval_restrict_step, restrict,
                         tcob_for_divisibility)
from .sampler import (RegionSampler, SamplerConfig, TrapezoidSampler, sample_complement,
                      sample_original, sample_trapezoid)

__version__ = "0.1.0"
