"""Matérn and Generalized Cauchy covariance models.

Both evaluators accept a scalar distance or an array of distances and
return ``sigma2`` times the correlation.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .specfun import bessel_k_scaled, lgamma_real

__all__ = ["MaternParams", "CauchyParams", "matern_eval", "cauchy_eval", "reparam_cauchy"]

# Below this r/alpha the Matérn correlation is returned as its limit 1.
_MATERN_ORIGIN = 1e-10


def _positive(name, value):
    value = float(value)
    if not (math.isfinite(value) and value > 0.0):
        raise ParameterError(f"{name} must be a finite positive number, got {value!r}")
    return value


@dataclass(frozen=True)
class MaternParams:
    nu: float
    alpha: float
    sigma2: float = 1.0

    def __post_init__(self):
        for name in ("nu", "alpha", "sigma2"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))


@dataclass(frozen=True)
class CauchyParams:
    """Generalized Cauchy parameters: shape ``delta`` in (0, 2], tail ``lam``, scale ``gamma``."""

    delta: float
    lam: float
    gamma: float
    sigma2: float = 1.0

    def __post_init__(self):
        for name in ("delta", "lam", "gamma", "sigma2"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))
        if self.delta > 2.0:
            raise ParameterError(f"delta must lie in (0, 2], got {self.delta!r}")


def _distances(r):
    scalar = np.ndim(r) == 0
    r = np.asarray(r, dtype=float)
    if not np.all(np.isfinite(r)) or np.any(r < 0.0):
        raise ParameterError("distances must be finite and >= 0")
    return r, scalar


def matern_eval(p: MaternParams, r):
    """sigma2 * 2^(1-nu)/Gamma(nu) (r/alpha)^nu K_nu(r/alpha); equals sigma2 at r = 0."""
    r, scalar = _distances(r)
    x = r / p.alpha
    out = np.ones_like(x)
    far = x >= _MATERN_ORIGIN
    if far.any():
        xf = x[far]
        # log space: (r/alpha)^nu K_nu overflows/underflows separately
        log_norm = (1.0 - p.nu) * math.log(2.0) - lgamma_real(p.nu)[0]
        with np.errstate(under="ignore"):
            out[far] = np.exp(
                log_norm + p.nu * np.log(xf) + np.log(bessel_k_scaled(p.nu, xf)) - xf
            )
    out = np.minimum(out, 1.0) * p.sigma2
    return float(out) if scalar else out


def cauchy_eval(p: CauchyParams, r):
    """sigma2 * (1 + (r/gamma)^delta)^(-lam)."""
    r, scalar = _distances(r)
    with np.errstate(under="ignore"):
        out = p.sigma2 * np.exp(-p.lam * np.log1p((r / p.gamma) ** p.delta))
    return float(out) if scalar else out


def reparam_cauchy(delta, lam, alpha, sigma2=1.0) -> CauchyParams:
    """Generalized Cauchy parameters with the scale tied to the tail, gamma = alpha * lam."""
    alpha = _positive("alpha", alpha)
    lam = _positive("lam", lam)
    return CauchyParams(delta=delta, lam=lam, gamma=alpha * lam, sigma2=sigma2)
