"""
Barrier sub/supersolutions of the singular regime and their certification.
"""
from .certify import (
    Certificate,
    calibrate,
    comparison_check,
    cusp_lower_bound_check,
    fd_cross_check,
    grid_cross_check,
    upper_bound_check,
    verify_inequality,
    write_certificate,
)
from .families import (
    BarrierSpec,
    make_subsolution,
    make_supersolution,
    subsolution_exponent,
    supersolution_exponent,
)

__all__ = [
    # Families
    "BarrierSpec",
    "make_subsolution",
    "make_supersolution",
    "subsolution_exponent",
    "supersolution_exponent",
    # Certification
    "Certificate",
    "verify_inequality",
    "calibrate",
    "fd_cross_check",
    "grid_cross_check",
    "write_certificate",
    # Comparison
    "comparison_check",
    "upper_bound_check",
    "cusp_lower_bound_check",
]
