"""
Boundary exponent fits, scaling identities and convergence studies.
"""
from .convergence import convergence_study, is_radial_instance, orders
from .exponent import (
    RayProbe,
    ScatterProbe,
    band_check,
    default_window,
    fit_boundary_exponent,
    fit_samples,
    split_window_check,
    write_fit_profile,
)
from .scaling import (
    scaling_exponent,
    scaling_identity_check,
    uniqueness_sweep,
)

__all__ = [
    # Exponent fits
    "RayProbe",
    "ScatterProbe",
    "default_window",
    "fit_samples",
    "fit_boundary_exponent",
    "split_window_check",
    "band_check",
    "write_fit_profile",
    # Scaling
    "scaling_exponent",
    "scaling_identity_check",
    "uniqueness_sweep",
    # Convergence
    "convergence_study",
    "is_radial_instance",
    "orders",
]
