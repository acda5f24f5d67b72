"""Scalar functionals of chart fields."""
from .volume import eval_invariant_I0, eval_Vq, first_variation_Vq, spherical_Vq
from .energy import (
    PowerF,
    coercivity_check,
    coercivity_constants,
    eps_constant,
    eval_Ieps,
    eval_Jeps,
    eval_JF,
    functional_report,
    integral_to_zero,
    rayleigh_lambda,
    sobolev_catalog,
    sobolev_ratio_catalog,
)

__all__ = [
    "eval_invariant_I0",
    "eval_Vq",
    "first_variation_Vq",
    "spherical_Vq",
    "PowerF",
    "coercivity_check",
    "coercivity_constants",
    "eps_constant",
    "eval_Ieps",
    "eval_Jeps",
    "eval_JF",
    "functional_report",
    "integral_to_zero",
    "rayleigh_lambda",
    "sobolev_catalog",
    "sobolev_ratio_catalog",
]
