"""Spectral search for best constants of fractional interpolation inequalities.

Fields live on periodic grids; fractional derivatives are Fourier
multipliers, the Riesz energy is a zero-padded FFT convolution (with a direct
double sum as a cross-check), and extremizers are found by gauge-fixed
gradient ascent.
"""
from .functionals import (
    RieszMethod,
    gn_gradient,
    gn_quotient,
    gradient_norm,
    lp_norm,
    riesz_bilinear,
    riesz_energy,
    riesz_gradient,
    riesz_quotient,
    sobolev_seminorm,
)
from .lemmas import (
    BLReport,
    PqrConstants,
    besov_sup,
    bl_nonlocal_verify,
    interm_gn_ratio,
    pqr_constants,
    pqr_sweep,
    refined_sobolev_ratio,
    riesz_cauchy_schwarz,
    standard_corpus,
    superlevel_measure,
)
from .regimes import (
    GNParams,
    RegimeClass,
    RieszParams,
    classify_gn,
    classify_riesz,
    gn_theta,
    riesz_theta,
)
from .solver import (
    OptimizationReport,
    OptimizerConfig,
    RegimeError,
    endpoint_demo,
    optimize_gn,
    optimize_riesz,
    recenter,
)
from .spectral import (
    Field,
    Grid,
    MultiplierSpec,
    apply_multiplier,
    make_grid,
    make_profile,
    read_field,
    translate,
    write_field,
)

__version__ = "0.1.0"

__all__ = [
    "BLReport", "Field", "GNParams", "Grid", "MultiplierSpec", "OptimizationReport",
    "OptimizerConfig", "PqrConstants", "RegimeClass", "RegimeError", "RieszMethod",
    "RieszParams", "apply_multiplier", "besov_sup", "bl_nonlocal_verify",
    "classify_gn", "classify_riesz", "endpoint_demo", "gn_gradient", "gn_quotient",
    "gn_theta", "gradient_norm", "interm_gn_ratio", "lp_norm", "make_grid",
    "make_profile", "optimize_gn", "optimize_riesz", "pqr_constants", "pqr_sweep",
    "read_field", "recenter", "refined_sobolev_ratio", "riesz_bilinear",
    "riesz_cauchy_schwarz", "riesz_energy", "riesz_gradient", "riesz_quotient",
    "riesz_theta", "sobolev_seminorm", "standard_corpus", "superlevel_measure",
    "translate", "write_field",
]
