"""Chart domains, densities and the sphere <-> chart transform."""
from .domain import (
    BaseDomain,
    ConvexDomain,
    Cusp,
    Disk,
    Polygon,
    Superellipse,
    make_domain,
    polar_cap_measure,
)
from .density import (
    BumpDensity,
    ConstantDensity,
    Density,
    make_density,
    pull_back_density,
    push_forward_density,
)
from .chart import (
    ChartMap,
    SphericalField,
    chart_point,
    field_to_support,
    field_values,
    support_to_field,
    support_values,
)

__all__ = [
    "BaseDomain",
    "ConvexDomain",
    "Cusp",
    "Disk",
    "Polygon",
    "Superellipse",
    "make_domain",
    "polar_cap_measure",
    "BumpDensity",
    "ConstantDensity",
    "Density",
    "make_density",
    "pull_back_density",
    "push_forward_density",
    "ChartMap",
    "SphericalField",
    "chart_point",
    "field_to_support",
    "field_values",
    "support_to_field",
    "support_values",
]
