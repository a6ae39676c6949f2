"""First-Born geometric scattering of a spinless particle on embedded surfaces."""

__version__ = "0.1.0"

from .born import (
    THIN_LAYER,
    CurvatureCouplings,
    ScatteringKinematics,
    amplitude_backward,
    amplitude_forward,
    amplitude_oracle_2d,
    amplitude_radial,
    amplitude_radial_pre_ibp,
    differential_cross_section,
    gaussian_amplitude_first_order,
    gaussian_total_cross_section,
    total_cross_section_numeric,
)
from .geometry import (
    CallableProfile,
    FlatProfile,
    GaussianBump,
    GraphSurface,
    RadialProfile,
    TabulatedProfile,
    curvatures,
    g_function,
    monge_patch_geometry,
    radial_graph_surface,
    total_gaussian_curvature,
)
from .lattice import (
    CompositeSurface,
    LatticeSpec,
    composite_amplitude,
    structure_factor_lattice,
    structure_factor_sum,
    translated_amplitude,
    triangular_lattice,
    triangular_lattice_kab,
)
from .perturbation import (
    Harmonic,
    PerturbationSpec,
    PerturbedGaussianSpec,
    perturbation_amplitude,
    perturbed_cross_section,
    perturbed_gaussian_amplitude_first_order,
    z_factors,
)
from .quadrature import QuadratureOptions, QuadratureResult

__all__ = [
    "THIN_LAYER",
    "CurvatureCouplings",
    "ScatteringKinematics",
    "amplitude_backward",
    "amplitude_forward",
    "amplitude_oracle_2d",
    "amplitude_radial",
    "amplitude_radial_pre_ibp",
    "differential_cross_section",
    "gaussian_amplitude_first_order",
    "gaussian_total_cross_section",
    "total_cross_section_numeric",
    "CallableProfile",
    "FlatProfile",
    "GaussianBump",
    "GraphSurface",
    "RadialProfile",
    "TabulatedProfile",
    "curvatures",
    "g_function",
    "monge_patch_geometry",
    "radial_graph_surface",
    "total_gaussian_curvature",
    "CompositeSurface",
    "LatticeSpec",
    "composite_amplitude",
    "structure_factor_lattice",
    "structure_factor_sum",
    "translated_amplitude",
    "triangular_lattice",
    "triangular_lattice_kab",
    "Harmonic",
    "PerturbationSpec",
    "PerturbedGaussianSpec",
    "perturbation_amplitude",
    "perturbed_cross_section",
    "perturbed_gaussian_amplitude_first_order",
    "z_factors",
    "QuadratureOptions",
    "QuadratureResult",
    "__version__",
]
