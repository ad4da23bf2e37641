"""Spectral solvers for the non-local fractional Langevin problem.

``D^b(D^a u) + D^b(A u) = f`` on (0, T] with ``u(T) = gamma u(0) + phi`` and
``D^a u(0) = psi``, where A is given by its eigenvalues. The forward problem
and the recovery of a constant source from ``u(t0) = omega`` are solved in
closed form through Mittag-Leffler functions and checked against an
independent L1 time-stepper.
"""

from __future__ import annotations

from ._backend import BACKEND
from .errors import (
    ConvergenceError,
    DegenerateGamma,
    DimensionMismatch,
    DomainError,
    FracLangevinError,
    IllConditioned,
    InsufficientSpectrum,
    QuadratureError,
    Unsolvable,
)
from .forward import (
    ConstantSource,
    DecayRule,
    ForwardSolution,
    ModeSolution,
    ProblemSpec,
    SampledSource,
    coercive_report,
    gamma_one_witness,
    mode_trajectory,
    particular_mode,
    solve_b,
    solve_forward,
)
from .inverse import (
    InverseClassification,
    InverseRegime,
    InverseResult,
    InverseSpec,
    asymptotic_ratio_diagnostic,
    classify,
    classify_params,
    delta_k,
    recover_source,
    with_source,
)
from .mittag_leffler import (
    MlEvalResult,
    MlParams,
    Regime,
    ml_asymptotic,
    ml_bound_constant,
    ml_eval,
    ml_recurrence_residual,
    ml_values,
    recip_gamma,
)
from .oracle import OracleRun, TimeGrid, caputo_l1, default_grid, integrate_mode
from .spectral import SpectrumSpec, apply_power, sobolev_norm_sq

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConstantSource",
    "ConvergenceError",
    "DecayRule",
    "DegenerateGamma",
    "DimensionMismatch",
    "DomainError",
    "ForwardSolution",
    "FracLangevinError",
    "IllConditioned",
    "InsufficientSpectrum",
    "InverseClassification",
    "InverseRegime",
    "InverseResult",
    "InverseSpec",
    "MlEvalResult",
    "MlParams",
    "ModeSolution",
    "OracleRun",
    "ProblemSpec",
    "QuadratureError",
    "Regime",
    "SampledSource",
    "SpectrumSpec",
    "TimeGrid",
    "Unsolvable",
    "apply_power",
    "asymptotic_ratio_diagnostic",
    "caputo_l1",
    "classify",
    "classify_params",
    "coercive_report",
    "default_grid",
    "delta_k",
    "gamma_one_witness",
    "integrate_mode",
    "ml_asymptotic",
    "ml_bound_constant",
    "ml_eval",
    "ml_recurrence_residual",
    "ml_values",
    "mode_trajectory",
    "particular_mode",
    "recip_gamma",
    "recover_source",
    "sobolev_norm_sq",
    "solve_b",
    "solve_forward",
    "with_source",
]
