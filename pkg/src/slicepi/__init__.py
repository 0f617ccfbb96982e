"""Orthogonal projection onto slice functions on the quaternionic unit sphere."""

__version__ = "0.1.0"

from .geometry import (
    BoundaryGrid,
    CircleGrid,
    SampledFunction,
    SphereRule,
    build_circle_grid,
    build_sphere_rule,
    integrate_boundary,
    integrate_sphere,
    validate_well_defined,
)
from .norms import (
    NormReport,
    duality_gap,
    extremal_function,
    inner_product,
    lp_norm,
    norm_lower_bound_search,
    ratio,
    sphere_moment,
    sphere_moment_quadrature,
    upper_bound_constant,
)
from .projection import (
    corollary_ab,
    energy_identity,
    project,
    project_boundary,
    project_covariant,
    project_fourier,
    project_interior,
    project_sphere_mean,
    slice_kernel,
    truncate_nonneg,
)
from .quaternion import BoundaryPoint, ImaginaryUnit, Quaternion, exp_unit, qconj, qinv, qmul
from .slices import (
    FourierTable,
    SliceFunction,
    ext_representation,
    fourier_coeffs_slice,
    poisson_extend,
    poisson_kernel,
    slice_defect,
)

__all__ = [
    "__version__",
    "BoundaryGrid",
    "CircleGrid",
    "SampledFunction",
    "SphereRule",
    "build_circle_grid",
    "build_sphere_rule",
    "integrate_boundary",
    "integrate_sphere",
    "validate_well_defined",
    "NormReport",
    "duality_gap",
    "extremal_function",
    "inner_product",
    "lp_norm",
    "norm_lower_bound_search",
    "ratio",
    "sphere_moment",
    "sphere_moment_quadrature",
    "upper_bound_constant",
    "corollary_ab",
    "energy_identity",
    "project",
    "project_boundary",
    "project_covariant",
    "project_fourier",
    "project_interior",
    "project_sphere_mean",
    "slice_kernel",
    "truncate_nonneg",
    "FourierTable",
    "SliceFunction",
    "ext_representation",
    "fourier_coeffs_slice",
    "poisson_extend",
    "poisson_kernel",
    "slice_defect",
    "BoundaryPoint",
    "ImaginaryUnit",
    "Quaternion",
    "exp_unit",
    "qconj",
    "qinv",
    "qmul",
]
