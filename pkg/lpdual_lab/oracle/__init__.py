"""
Independent ground truth: radial shooting, exact quadratics and spherical quadrature.
"""
from .radial import (
    RadialProfile,
    exponent_from_profile,
    paraboloid,
    profile_Vq,
    radial_eigen,
    radial_solve,
    write_profile,
)
from .sphere import (
    cap_area_check,
    cap_refinement,
    invariant_check,
    spherical_cap_area,
    unit_sphere_area,
)

__all__ = [
    # Radial
    "RadialProfile",
    "radial_solve",
    "radial_eigen",
    "paraboloid",
    "profile_Vq",
    "exponent_from_profile",
    "write_profile",
    # Sphere
    "unit_sphere_area",
    "spherical_cap_area",
    "cap_area_check",
    "cap_refinement",
    "invariant_check",
]
