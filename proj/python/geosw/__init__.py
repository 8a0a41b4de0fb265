"""Entropic optimal transport, Wasserstein dictionary learning, and
barycentric coding on a shared fixed support."""

from ._core import (
    InvalidInput,
    NumericalError,
    Support,
    build_support,
    build_problem,
    class_mass_confusion,
    classify,
    default_epsilon,
    entropic_map,
    exact_w2,
    finite_diff_check,
    fit,
    ibp_barycenter,
    loss_and_grad,
    match_atoms,
    mccann_1d,
    random_simplex,
    regularizer,
    sinkhorn,
    softmax_rows,
    solve_lp,
    solve_qp,
    sparsity_histogram,
    verify_geodesic_extension,
)

__all__ = [
    "InvalidInput",
    "NumericalError",
    "Support",
    "build_support",
    "build_problem",
    "class_mass_confusion",
    "classify",
    "default_epsilon",
    "entropic_map",
    "exact_w2",
    "finite_diff_check",
    "fit",
    "ibp_barycenter",
    "loss_and_grad",
    "match_atoms",
    "mccann_1d",
    "random_simplex",
    "regularizer",
    "sinkhorn",
    "softmax_rows",
    "solve_lp",
    "solve_qp",
    "sparsity_histogram",
    "verify_geodesic_extension",
]
