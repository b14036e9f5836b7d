"""Numerical machinery and checks for spline-projection inequalities.

The library side exposes interval partitions and filtrations, exact
piecewise-polynomial arithmetic, B-spline bases and orthogonal projectors,
positive dominating kernel operators, square functions, envelope
construction, and the inequality checks built from them.  The `splinegale`
command drives seeded sweeps and renders reports.
"""

from .partitions import Filtration, Partition, common_refinement, is_refinement
from .piecewise import (IntervalUnion, PiecewisePolynomial,
                        holder_pairing_check, level_set, lplq_norm,
                        remez_bound_check, remez_level_measure,
                        upper_envelope_abs)
from .bsplines import (BSplineBasis, Spline, build_basis, get_basis,
                       refine_spline, regularity, stability_check)
from .projection import (MartingaleSplineSequence, Projector, get_projector,
                         make_martingale)
from .kernels import (KernelOperator, MaximalEstimator, default_decay,
                      domination_constants, jensen_gap,
                      kernel_product_min_constant, maximal_lower,
                      tool_lepingle, tower_constant)
from .martingales import (AdaptedSequence, DeltaSequence, SquareFunction,
                          bmo_norm, burkholder_ratio, doob_checks, h1_norm,
                          lepingle_check, main_duality_check,
                          orthogonality_gap, pairing_check,
                          sign_randomized_ratio, square_function, stein_check)
from .envelopes import (AllocationInstance, EnvelopeSequence, build_envelopes,
                        greedy_allocation, verify_envelopes)
from .config import ExperimentConfig
from .checks import run_check, sweep

__all__ = [
    "AdaptedSequence", "AllocationInstance", "BSplineBasis", "DeltaSequence",
    "EnvelopeSequence", "ExperimentConfig", "Filtration", "IntervalUnion",
    "KernelOperator", "MartingaleSplineSequence", "MaximalEstimator",
    "Partition", "PiecewisePolynomial", "Projector", "Spline",
    "SquareFunction", "bmo_norm", "build_basis", "build_envelopes",
    "burkholder_ratio", "common_refinement", "default_decay", "doob_checks",
    "domination_constants", "get_basis", "get_projector", "greedy_allocation",
    "h1_norm", "holder_pairing_check", "is_refinement", "jensen_gap",
    "kernel_product_min_constant", "lepingle_check", "level_set",
    "lplq_norm", "main_duality_check", "make_martingale", "maximal_lower",
    "orthogonality_gap", "pairing_check", "refine_spline",
    "regularity", "remez_bound_check", "remez_level_measure", "run_check",
    "sign_randomized_ratio", "square_function", "stability_check",
    "stein_check", "sweep", "tool_lepingle", "tower_constant",
    "upper_envelope_abs", "verify_envelopes",
]

__version__ = "0.1.0"
