"""Second-order expansion densities for quadratic forms of Wiener and
diffusion paths, with Monte Carlo validation against exact oracles.

The heavy lifting lives in the C++ extension ``mnx._core``; this package
re-exports its surface.
"""

from ._core import (  # noqa: F401
    Model,
    chisq_oracle_cdf,
    convergence_study_oracle,
    expansion_residual,
    gaussian_derivatives,
    make_model,
    normal_cdf,
    path_symbol,
    qn_cdf,
    run_density,
    simulate_path,
    statistics,
    studentize_reduction,
    studentized_qn,
    validate,
    weak_form_expectation,
    wiener_coefficients,
)
from ._core import __version__  # noqa: F401

__all__ = [
    "Model",
    "chisq_oracle_cdf",
    "convergence_study_oracle",
    "expansion_residual",
    "gaussian_derivatives",
    "make_model",
    "normal_cdf",
    "path_symbol",
    "qn_cdf",
    "run_density",
    "simulate_path",
    "statistics",
    "studentize_reduction",
    "studentized_qn",
    "validate",
    "weak_form_expectation",
    "wiener_coefficients",
    "__version__",
]
