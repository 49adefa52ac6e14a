"""Numerical laboratory for quaternionic Monge-Ampere type equations on flat models."""

from qmalab._core import (
    HypercomplexFrame,
    OperatorSpec,
    check_lemma31,
    check_prop32,
    check_structural,
    decompose,
    eigenvalues,
    gp_sweep_constant,
    hyperhermitian_part,
    j_pullback,
    laplace_operator,
    linearization_coeffs,
    make_rhs,
    max_eigenvalue_operator,
    norm_entropy,
    pfaffian,
    qma_operator,
    radial_cma_dirichlet,
    recompose,
    sigma_operator,
    solve_torus,
    standard_frame,
    tau,
    volume_constant,
)

__all__ = [
    "HypercomplexFrame",
    "OperatorSpec",
    "check_lemma31",
    "check_prop32",
    "check_structural",
    "decompose",
    "eigenvalues",
    "gp_sweep_constant",
    "hyperhermitian_part",
    "j_pullback",
    "laplace_operator",
    "linearization_coeffs",
    "make_rhs",
    "max_eigenvalue_operator",
    "norm_entropy",
    "pfaffian",
    "qma_operator",
    "radial_cma_dirichlet",
    "recompose",
    "sigma_operator",
    "solve_torus",
    "standard_frame",
    "tau",
    "volume_constant",
]

__version__ = "0.1.0"
