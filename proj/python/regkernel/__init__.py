"""Regularized Laplace kernels, error calibration and symplectic N-body runs."""

from ._core import (
    CalibrationError,
    DomainError,
    IntegrationBlowup,
    KernelSpec,
    NumericalError,
    convergence_study,
    grad_green_reg,
    green,
    green_reg,
    hyp2f1,
    laplacian_mass,
    laplacian_reg_closed,
    laplacian_reg_series,
    modelling_error,
    orbit_metrics,
    preset_names,
    simulate,
    smoothing_error,
    smoothing_pairings,
    solve_epsilon_modelling,
    solve_epsilon_smoothing,
    tail_sum,
)

__all__ = [
    "CalibrationError",
    "DomainError",
    "IntegrationBlowup",
    "KernelSpec",
    "NumericalError",
    "convergence_study",
    "grad_green_reg",
    "green",
    "green_reg",
    "hyp2f1",
    "laplacian_mass",
    "laplacian_reg_closed",
    "laplacian_reg_series",
    "modelling_error",
    "orbit_metrics",
    "preset_names",
    "simulate",
    "smoothing_error",
    "smoothing_pairings",
    "solve_epsilon_modelling",
    "solve_epsilon_smoothing",
    "tail_sum",
]
