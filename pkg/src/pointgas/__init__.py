"""Canonical-ensemble fermion/boson/para/composite point processes.

Core layers: exact alpha-determinant combinatorics (:mod:`alphadet`,
:mod:`symgroup`), torus spectra and integral operators (:mod:`kernels`),
Fredholm determinants with contour coefficient extraction
(:mod:`fredholm`), fugacity equations (:mod:`thermo`), the Laplace
functionals and their thermodynamic limits (:mod:`processes`), and
samplers (:mod:`sampler`).
"""

from .alphadet import alpha_det, cycle_count, permanent_ryser, power_sum_alpha_sum
from .fredholm import (
    ContourSpec,
    PFamily,
    coefficient_contour,
    fredholm_det_power,
    lemma_a1_check,
    saddle_limit_check,
    vere_jones_partial_sum,
)
from .kernels import (
    BumpFunction,
    Spectrum,
    TabulatedFunction,
    TorusGrid,
    build_gtilde,
    composite_spectrum,
    heat_kernel_torus,
    heat_spectrum,
    limit_k_operator,
    load_test_function_csv,
)
from .processes import (
    EnsembleSpec,
    LaplaceResult,
    composite_limit_laplace,
    convergence_study,
    finite_laplace,
    limit_laplace,
    para_finite_laplace,
    rho_c_composite,
)
from .sampler import exact_sample_n2, log_density, mcmc_sample
from .symgroup import YoungFrame2, chi_character, immanant, para_trace, psi_character
from .thermo import (
    AlphaParam,
    FugacitySolution,
    finite_fugacity,
    h_alpha,
    rho_c,
    solve_fugacity,
    variance_traces,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaParam",
    "BumpFunction",
    "ContourSpec",
    "EnsembleSpec",
    "FugacitySolution",
    "LaplaceResult",
    "PFamily",
    "Spectrum",
    "TabulatedFunction",
    "TorusGrid",
    "YoungFrame2",
    "alpha_det",
    "build_gtilde",
    "chi_character",
    "coefficient_contour",
    "composite_limit_laplace",
    "composite_spectrum",
    "convergence_study",
    "cycle_count",
    "exact_sample_n2",
    "finite_fugacity",
    "finite_laplace",
    "fredholm_det_power",
    "h_alpha",
    "heat_kernel_torus",
    "heat_spectrum",
    "immanant",
    "lemma_a1_check",
    "limit_k_operator",
    "limit_laplace",
    "load_test_function_csv",
    "log_density",
    "mcmc_sample",
    "para_finite_laplace",
    "para_trace",
    "permanent_ryser",
    "power_sum_alpha_sum",
    "psi_character",
    "rho_c",
    "rho_c_composite",
    "saddle_limit_check",
    "solve_fugacity",
    "variance_traces",
    "vere_jones_partial_sum",
]
