"""Kernel estimates of limiting spectral densities of sample covariance matrices."""

from ._core import (
    DomainError,
    NumericalError,
    SpectralMeasure,
    LawSolution,
    simulate,
    stieltjes,
    find_support,
    density,
    solve_law,
    kernel_density,
    kernel_cdf,
    smoothed_target,
    check_kernel,
    sigma2,
    cdf_variance,
    optimal_bandwidth,
    run_clt,
    check_contour_conditions,
    GAUSSIAN_SIGMA2,
)

__version__ = "0.3.0"
