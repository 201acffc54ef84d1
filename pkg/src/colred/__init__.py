"""Colour refinement, equitable partitions and exact LP reduction."""

from .factor import FactorChain, FactorStep, core_factor, factor_matrix, iterated_core_factor, lift_map, project_map
from .fracauto import (
    FracAutoPair,
    check_fractional_isomorphism,
    fracauto_to_partition,
    is_fractional_automorphism,
    partition_to_fracauto,
)
from .lpreduce import Form, LinearProgram, ReducedLP, build_tilde, lift, project, reduce, solve_via_reduction
from .lpsolve import Solution, Status, check_feasible, solve
from .matcore import INF, Partition, SparseMatrix, Vector
from .refine import coarsest_equitable, is_equitable, naive_refine

__version__ = "0.1.0"
