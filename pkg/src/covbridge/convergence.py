"""Convergence of the reparameterized Generalized Cauchy family to the Matérn family.

With gamma = alpha * lam and delta = 1 the Cauchy correlation is
(1 + r/(alpha lam))^(-lam), which tends to exp(-r/alpha), the Matérn
correlation with nu = 1/2. This module measures that approach for the
covariances (absolute-error curves and their maxima) and for the spectral
densities, and probes the gamma-function ratio behind the spectral limit.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .covmodels import MaternParams, cauchy_eval, matern_eval, reparam_cauchy
from .errors import DomainError, ParameterError
from .spectral import cauchy_sdf, matern_sdf
from .specfun import lgamma_real

__all__ = [
    "EvalGrid",
    "MAETable",
    "abs_error_curve",
    "mae",
    "mae_table",
    "spectral_limit_scan",
    "gamma_ratio_probe",
    "covariance_limit_scan",
    "REFERENCE_LAMBDAS",
    "REFERENCE_ALPHAS",
]

REFERENCE_LAMBDAS = (1.0, 2.0, 5.0, 20.0, 60.0, 160.0, 390.0, 700.0, 2000.0)
REFERENCE_ALPHAS = (0.02 / 3, 0.2 / 3, 2 / 3, 20 / 3)


@dataclass(frozen=True)
class EvalGrid:
    """Strictly increasing grid of positive evaluation points.

    ``lower`` is the left end of the span the grid stands for; it defaults to
    the first point and is ``lo`` for open-left spans built by :meth:`span`.
    """

    points: np.ndarray
    description: str = ""
    lower: float = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).ravel()
        if pts.size == 0:
            raise ParameterError("grid must contain at least one point")
        if not np.all(np.isfinite(pts)) or np.any(pts <= 0.0):
            raise ParameterError("grid points must be finite and > 0")
        if np.any(np.diff(pts) <= 0.0):
            raise ParameterError("grid points must be strictly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        lower = pts[0] if self.lower is None else self.lower
        if not (0.0 <= lower <= pts[0]):
            raise ParameterError(f"lower={lower!r} must lie in [0, first point]")
        object.__setattr__(self, "lower", float(lower))

    @classmethod
    def span(cls, lo, hi, count):
        """``count`` uniform points on (lo, hi]: lo + (hi - lo) * i / count, i = 1..count."""
        lo, hi, count = _grid_args(lo, hi, count, min_count=1)
        pts = lo + (hi - lo) * np.arange(1, count + 1) / count
        return cls(pts, f"uniform on ({lo!r}, {hi!r}], {count} points", lower=lo)

    @classmethod
    def linear(cls, lo, hi, count):
        lo, hi, count = _grid_args(lo, hi, count)
        return cls(np.linspace(lo, hi, count), f"linear on [{lo!r}, {hi!r}], {count} points")

    @classmethod
    def log(cls, lo, hi, count):
        lo, hi, count = _grid_args(lo, hi, count)
        return cls(np.geomspace(lo, hi, count), f"log-spaced on [{lo!r}, {hi!r}], {count} points")

    def __len__(self):
        return self.points.size


def _grid_args(lo, hi, count, min_count=2):
    lo, hi = float(lo), float(hi)
    if isinstance(count, bool) or int(count) != count or count < min_count:
        raise ParameterError(f"grid count must be an integer >= {min_count}, got {count!r}")
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ParameterError(f"grid needs finite lo < hi, got {lo!r}, {hi!r}")
    return lo, hi, int(count)


@dataclass(frozen=True)
class MAETable:
    lambdas: tuple
    alphas: tuple
    cells: np.ndarray  # shape (len(alphas), len(lambdas))
    grid: EvalGrid
    notes: tuple = field(default=())

    def row(self, alpha):
        return self.cells[self.alphas.index(alpha)]


def _positive(name, value):
    value = float(value)
    if not (math.isfinite(value) and value > 0.0):
        raise ParameterError(f"{name} must be finite and > 0, got {value!r}")
    return value


def _abs_error(lam, alpha, r):
    cauchy = cauchy_eval(reparam_cauchy(1.0, lam, alpha), r)
    matern = matern_eval(MaternParams(0.5, alpha), r)
    return np.abs(cauchy - matern)


def abs_error_curve(lam, alpha, grid: EvalGrid) -> np.ndarray:
    """|(1 + r/(alpha lam))^(-lam) - exp(-r/alpha)| at every grid point."""
    lam = _positive("lambda", lam)
    alpha = _positive("alpha", alpha)
    return _abs_error(lam, alpha, grid.points)


def mae(lam, alpha, grid: EvalGrid) -> float:
    """Maximum absolute error over the span of ``grid``.

    The grid maximum is refined by a bounded golden-section search between
    the neighbours of the best grid point, so the result is the supremum
    over the span rather than over the sample points.
    """
    lam = _positive("lambda", lam)
    alpha = _positive("alpha", alpha)
    pts = grid.points
    err = _abs_error(lam, alpha, pts)
    i = int(np.argmax(err))
    best = float(err[i])
    lo = pts[i - 1] if i > 0 else grid.lower
    hi = pts[i + 1] if i + 1 < pts.size else pts[i]
    if hi > lo:
        res = optimize.minimize_scalar(
            lambda r: -float(_abs_error(lam, alpha, r)),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-12 * max(1.0, hi)},
        )
        best = max(best, -float(res.fun))
    return best


def mae_table(lambdas, alphas, grid: EvalGrid) -> MAETable:
    """MAE for every (alpha, lambda) pair; rows follow ``alphas``, columns ``lambdas``."""
    lambdas = tuple(_positive("lambda", v) for v in lambdas)
    alphas = tuple(_positive("alpha", v) for v in alphas)
    if not lambdas or not alphas:
        raise ParameterError("lambdas and alphas must be nonempty")
    cells = np.array([[mae(lam, a, grid) for lam in lambdas] for a in alphas])
    notes = []
    order = np.argsort(lambdas)
    for a, row in zip(alphas, cells):
        if np.any(np.diff(row[order]) > 0.0):
            notes.append(f"row alpha={a!r} is not nonincreasing in lambda")
    return MAETable(lambdas, alphas, cells, grid, tuple(notes))


def covariance_limit_scan(alpha, lambdas, grid: EvalGrid) -> list:
    """mae(lambda_i, alpha, grid) along an increasing lambda ladder."""
    lambdas = [_positive("lambda", v) for v in lambdas]
    if any(b <= a for a, b in zip(lambdas, lambdas[1:])):
        raise ParameterError("lambdas must be strictly increasing")
    return [mae(lam, alpha, grid) for lam in lambdas]


def spectral_limit_scan(alpha, d, z_grid: EvalGrid, lambdas, delta=1.0, tol=1e-10) -> np.ndarray:
    """|Cauchy spectral density - Matérn(1/2) spectral density| over (lambda, z).

    Rows follow ``lambdas``, columns the points of ``z_grid``. ``delta`` must
    lie in [d/2, 2]; the limit towards the Matérn density holds only at
    delta = 1, other values serve as negative controls.
    """
    alpha = _positive("alpha", alpha)
    if d not in (1, 2):
        raise ParameterError(f"d must be 1 or 2, got {d!r}")
    delta = float(delta)
    if not (0.5 * d <= delta <= 2.0):
        raise ParameterError(f"delta must lie in [{0.5 * d}, 2], got {delta!r}")
    lambdas = [_positive("lambda", v) for v in lambdas]
    if any(b <= a for a, b in zip(lambdas, lambdas[1:])):
        raise ParameterError("lambdas must be strictly increasing")
    target = MaternParams(0.5, alpha)
    ref = np.array([matern_sdf(target, d, z).value for z in z_grid.points])
    out = np.empty((len(lambdas), len(z_grid)))
    for i, lam in enumerate(lambdas):
        p = reparam_cauchy(delta, lam, alpha)
        for j, z in enumerate(z_grid.points):
            out[i, j] = abs(cauchy_sdf(p, d, z, tol=tol).value - ref[j])
    return out


# Stirling correction coefficients B_{2k} / (2k (2k - 1)), k = 1..6
_STIRLING = (1 / 12, -1 / 360, 1 / 1260, -1 / 1680, 1 / 1188, -691 / 360360)


def _stirling_tail(x):
    """log Gamma(x) - [(x - 1/2) log x - x + log(2 pi)/2] for x >= 10."""
    inv2 = 1.0 / (x * x)
    acc = 0.0
    for coef in reversed(_STIRLING):
        acc = acc * inv2 + coef
    return acc / x


def gamma_ratio_probe(lam, c) -> float:
    """Gamma(lam - c) * lam^c / Gamma(lam), evaluated in log space.

    For c > 0 the ratio exceeds 1 and decreases to 1 like 1 + c(c+1)/(2 lam).
    Once lam - c >= 10 the log-ratio is assembled from Stirling's series so
    that the large log-gamma values cancel analytically rather than in
    floating point.
    """
    lam, c = float(lam), float(c)
    if not (math.isfinite(lam) and math.isfinite(c)):
        raise DomainError("lambda and c must be finite")
    if lam <= c + 1.0:
        raise DomainError(f"need lambda > c + 1, got lambda={lam!r}, c={c!r}")
    if c == 0.0:
        return 1.0
    if lam - c >= 10.0:
        log_ratio = (
            (lam - c - 0.5) * math.log1p(-c / lam) + c + _stirling_tail(lam - c) - _stirling_tail(lam)
        )
    else:
        log_ratio = lgamma_real(lam - c)[0] + c * math.log(lam) - lgamma_real(lam)[0]
    return math.exp(log_ratio)
