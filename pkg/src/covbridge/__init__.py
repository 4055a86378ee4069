"""Matérn and Generalized Cauchy covariances, their spectral densities, and the limit linking them."""

__version__ = "0.1.0"

from .convergence import (
    EvalGrid,
    MAETable,
    abs_error_curve,
    covariance_limit_scan,
    gamma_ratio_probe,
    mae,
    mae_table,
    spectral_limit_scan,
)
from .covmodels import CauchyParams, MaternParams, cauchy_eval, matern_eval, reparam_cauchy
from .errors import (
    ConvergenceError,
    CovBridgeError,
    DomainError,
    NumericalError,
    ParameterError,
)
from .spectral import (
    MBConfig,
    Route,
    SpectralResult,
    cauchy_sdf,
    cauchy_sdf_hankel,
    cauchy_sdf_mb,
    matern_sdf,
)

__all__ = [
    "__version__",
    "EvalGrid",
    "MAETable",
    "abs_error_curve",
    "covariance_limit_scan",
    "gamma_ratio_probe",
    "mae",
    "mae_table",
    "spectral_limit_scan",
    "CauchyParams",
    "MaternParams",
    "cauchy_eval",
    "matern_eval",
    "reparam_cauchy",
    "ConvergenceError",
    "CovBridgeError",
    "DomainError",
    "NumericalError",
    "ParameterError",
    "MBConfig",
    "Route",
    "SpectralResult",
    "cauchy_sdf",
    "cauchy_sdf_hankel",
    "cauchy_sdf_mb",
    "matern_sdf",
]
