"""Factoring objectives as pseudo-Boolean optimization, with a model of
coefficient degradation on analog annealing hardware."""
from .boolpoly import MultilinearPoly, VarId, VarKind, ancilla, poly_add, poly_degree, poly_eval, poly_mul, xbit, ybit
from .hardware import DegradedQubo, HardwareModel, Spin, decode_chains, degrade, dynamic_range, quantize
from .objective import (
    DivisibilityViolation,
    OddEncoding,
    ProblemSpec,
    Role,
    Variant,
    build_objective,
    decode_xy,
    table1_decomposition,
)
from .quadratize import Qubo, qubo_energy, quadratize, safe_penalty_bound
from .solve import AnnealSchedule, Sample, SolveResult, VariableCountExceeded, count_distinct, solve_exact, solve_sa

__version__ = "0.1.0"
