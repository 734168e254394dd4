"""Nearest fixed points of quasi-nonexpansive operators by halfspace outer approximation."""
from .driver import RunConfig, RunResult, Status, Trace, TraceEntry, halpern_baseline, run, verify_trace
from .geometry import EPS_FEAS, HalfSpace, as_vector, halfspace_from_pair, inner, norm
from .operators import (Operator, SmoothConvexFunction, check_quasi_firm, contraction_operator, ell2_example,
                        sign_operator, subgradient_projector, translation_operator)
from .polyproject import (OutcomeKind, Polyhedron, ProjectionOutcome, QPBreakdownError, add_constraint,
                          brute_force_project, project)

__version__ = "0.1.0"
