"""Exponential cubic B-spline differential quadrature for the 2-D telegraph equation.

Space is discretised with modified exponential cubic B-spline weights, time
with the five-stage fourth-order SSP Runge-Kutta scheme.
"""

from .errors import (
    CoincidentNodes,
    DegenerateShape,
    IndexOutOfRange,
    NoConvergence,
    NoExactSolution,
    NonFinite,
    NotDominant,
    SingularClosure,
    TelegraphError,
    TooFewNodes,
    UnknownProblem,
)
from .integrator import amplification, integrate, ssprk54_step, step
from .norms import ErrorReport, convergence_study, error_norms
from .problem import (
    DIRICHLET,
    NEUMANN,
    FaceCondition,
    Grid,
    TelegraphSpec,
    builtin,
    load_spec_file,
    validate,
)
from .semidiscrete import Semidiscrete, State
from .splines import SplineShape, eval_spline, make_shape, modified_nodal_value
from .stability import OperatorMatrices, StabilityReport, analyze, assemble_B
from .weights import WeightSet, build_weights

__version__ = "0.1.0"
