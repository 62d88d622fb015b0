"""Spectral two-solution solver for generalized vortex equations on a flat torus.

The package solves  eps^2 lap^2 u - lap u = eps lam a(u) + lam^2 f'(e) e (s - f(e)) - A
(e = e^{sigma+u}) on [0, L)^2 with a prescribed singular vortex background
sigma, producing a constrained local minimum and a mountain-pass saddle of
the associated energy, plus certificates: subsolution margins, system
equivalence residuals, and flux quantization.
"""

from .grid import Field, FieldNorms, Grid, constant_field, h2_norm, integrate, make_grid, mean, norms, read_field, spectral_inner, write_field
from .operators import (
    bilaplacian,
    div,
    grad,
    grad_squared,
    green_eps,
    inv_helmholtz,
    inv_neg_laplacian,
    laplacian,
    solve_fourth_linear,
)
from .model import AssumptionReport, VortexModel, builtin, check_assumptions
from .singular import (
    IdentityReport,
    SingularBackground,
    VortexSet,
    build_sigma,
    default_core_scale,
    verify_singular_identities,
)
from .functional import (
    EnergyBreakdown,
    Problem,
    delta_f_decomposition,
    energy,
    energy_and_gradient,
    gradient,
    identity_check,
    residual_fourth,
)
from .subsolution import (
    ProbeResult,
    SubsolutionResult,
    build_bump,
    build_subsolution,
    default_delta,
    probe_parameters,
    verify_subsolution,
)
from .solvers import (
    ComparisonReport,
    ContinuationReport,
    SolveOptions,
    SolveOutcome,
    comparison_diagnostic,
    continuation,
    minimize_constrained,
    mountain_pass,
    newton_refine,
)
from .system import SystemPair, certify, flux, recover_v, system_residual

__version__ = "0.1.0"

__all__ = [
    "Field",
    "FieldNorms",
    "Grid",
    "constant_field",
    "h2_norm",
    "integrate",
    "make_grid",
    "mean",
    "norms",
    "read_field",
    "spectral_inner",
    "write_field",
    "bilaplacian",
    "div",
    "grad",
    "grad_squared",
    "green_eps",
    "inv_helmholtz",
    "inv_neg_laplacian",
    "laplacian",
    "solve_fourth_linear",
    "AssumptionReport",
    "VortexModel",
    "builtin",
    "check_assumptions",
    "IdentityReport",
    "SingularBackground",
    "VortexSet",
    "build_sigma",
    "default_core_scale",
    "verify_singular_identities",
    "EnergyBreakdown",
    "Problem",
    "delta_f_decomposition",
    "energy",
    "energy_and_gradient",
    "gradient",
    "identity_check",
    "residual_fourth",
    "ProbeResult",
    "SubsolutionResult",
    "build_bump",
    "build_subsolution",
    "default_delta",
    "probe_parameters",
    "verify_subsolution",
    "ComparisonReport",
    "ContinuationReport",
    "SolveOptions",
    "SolveOutcome",
    "comparison_diagnostic",
    "continuation",
    "minimize_constrained",
    "mountain_pass",
    "newton_refine",
    "SystemPair",
    "certify",
    "flux",
    "recover_v",
    "system_residual",
    "__version__",
]
