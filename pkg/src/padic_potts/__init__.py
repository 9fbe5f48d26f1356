"""Exact p-adic arithmetic and the (q+1)-state p-adic Potts model on the
binary Cayley tree: quasi Gibbs measures, the fixed points of the boundary
recursion, and phase-transition diagnostics."""

from .dynamics import (
    basin_predicate,
    classify_fixed_point,
    eval_eta,
    eval_f,
    eval_f_prime,
    eval_g,
    eval_g_inverse,
    field_rigidity_check,
    fixed_points,
    iterate_orbit,
)
from .errors import *  # noqa: F401,F403
from .padic import (
    DEFAULT_CONFIG,
    PadicNumber,
    PrecisionConfig,
    from_rational,
    norm_valuation,
    padic,
    padic_sqrt,
)
from .phase import boundedness, brute_force_cross_check, measure_norm_exponent, phase_diagnosis
from .potts import (
    BoundaryField,
    ModelParams,
    compatibility_check,
    finite_volume_measure,
    hamiltonian,
    partition_function,
    partition_recursion_check,
    recursion_map_F,
)
from .tree import Configuration, direct_successors, enumerate_configurations, tree_counts

__version__ = "0.1.0"
