"""Isotropic spectral densities.

The Matérn density has a closed form. The Generalized Cauchy density is
available through three independent routes:

* ``series``: the residue series in :mod:`covbridge.foxwright`;
* ``mellin_barnes``: trapezoidal quadrature of the gamma-function integrand
  along the vertical line Re u = -epsilon;
* ``hankel``: the radial Fourier (Hankel) integral of the covariance,
  split at the zeros of the Bessel kernel and summed with Wynn's epsilon
  algorithm.

:func:`cauchy_sdf` picks a route and falls back on failure.
"""

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import integrate

from .accel import wynn_epsilon
from .covmodels import CauchyParams, MaternParams, cauchy_eval
from .errors import (
    ContourError,
    ConvergenceError,
    NumericalError,
    ParameterError,
    SymmetryError,
    TruncationError,
)
from .foxwright import cauchy_sdf_series, find_pole_collision
from .specfun import bessel_j, bessel_j0_zeros, lgamma_complex, lgamma_real

__all__ = [
    "Route",
    "SpectralResult",
    "MBConfig",
    "matern_sdf",
    "mb_integrand",
    "cauchy_sdf_mb",
    "hankel_sdf",
    "cauchy_sdf_hankel",
    "cauchy_sdf_series_route",
    "cauchy_sdf",
]

_EPS = np.finfo(float).eps
_GL_HI = np.polynomial.legendre.leggauss(32)
_GL_LO = np.polynomial.legendre.leggauss(20)


class Route(str, Enum):
    CLOSED_FORM = "closed_form"
    SERIES = "series"
    MELLIN_BARNES = "mellin_barnes"
    HANKEL = "hankel"


@dataclass(frozen=True)
class SpectralResult:
    value: float
    abs_err_estimate: float
    route: Route
    evaluations: int
    flags: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "abs_err_estimate", float(self.abs_err_estimate))
        object.__setattr__(self, "evaluations", int(self.evaluations))
        object.__setattr__(self, "route", Route(self.route))


def _check_d(d, allowed=(1, 2, 3)):
    if isinstance(d, bool) or int(d) != d or int(d) not in allowed:
        raise ParameterError(f"d must be one of {allowed}, got {d!r}")
    return int(d)


def _check_z(z, allow_zero=False):
    z = float(z)
    ok = math.isfinite(z) and (z >= 0.0 if allow_zero else z > 0.0)
    if not ok:
        raise ParameterError(f"z must be finite and {'>=' if allow_zero else '>'} 0, got {z!r}")
    return z


def matern_sdf(p: MaternParams, d: int, z: float) -> SpectralResult:
    """Closed-form Matérn spectral density in R^d."""
    if isinstance(d, bool) or int(d) != d or d < 1:
        raise ParameterError(f"d must be a positive integer, got {d!r}")
    z = _check_z(z, allow_zero=True)
    nu, alpha = p.nu, p.alpha
    half_d = 0.5 * d
    log_value = (
        lgamma_real(nu + half_d)[0]
        - lgamma_real(nu)[0]
        - half_d * math.log(math.pi)
        + d * math.log(alpha)
        - (nu + half_d) * math.log1p((alpha * z) ** 2)
    )
    value = p.sigma2 * math.exp(log_value)
    return SpectralResult(value, 4.0 * _EPS * value, Route.CLOSED_FORM, 1)


# ---------------------------------------------------------------------------
# Mellin-Barnes route
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MBConfig:
    """Vertical-line quadrature settings: contour offset, truncation height, step."""

    epsilon: float
    t_max: float = 40.0
    step: float = 0.05

    def __post_init__(self):
        for name in ("epsilon", "t_max", "step"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0.0):
                raise ParameterError(f"MBConfig.{name} must be finite and > 0, got {v!r}")
            object.__setattr__(self, name, v)

    @staticmethod
    def default_epsilon(p: CauchyParams):
        return min(0.25, 0.5 * p.lam)

    @classmethod
    def default(cls, p: CauchyParams, **kwargs):
        return cls(epsilon=cls.default_epsilon(p), **kwargs)

    def check_contour(self, p: CauchyParams, d: int):
        eps = self.epsilon
        if not eps < min(1.0, p.lam):
            raise ContourError(
                f"epsilon={eps!r} must lie in (0, min(1, lam)) = (0, {min(1.0, p.lam)!r})"
            )
        if not eps * p.delta < d:
            raise ContourError(f"epsilon*delta={eps * p.delta!r} must be < d={d}")


def _mb_log_integrand(p, d, z, t, epsilon):
    u = -epsilon + 1j * np.asarray(t, dtype=float)
    parts = (
        lgamma_complex(-u),
        lgamma_complex(u + p.lam),
        lgamma_complex(0.5 * d + 0.5 * p.delta * u),
        -lgamma_complex(-0.5 * p.delta * u),
        p.delta * u * math.log(2.0 / (z * p.gamma)),
    )
    log_const = (
        math.log(p.sigma2)
        - d * math.log(z)
        - 0.5 * d * math.log(math.pi)
        - math.log(2.0 * math.pi)
        - lgamma_real(p.lam)[0]
    )
    logg = sum(parts) + log_const
    weight = sum(np.abs(part) for part in parts) + abs(log_const)
    return logg, weight


def mb_integrand(p: CauchyParams, d: int, z: float, t, epsilon: float):
    """Integrand g(t) on u = -epsilon + i t, normalised so the density is the integral of g over the real t line."""
    logg, _ = _mb_log_integrand(p, d, z, t, epsilon)
    return np.exp(logg)


class _MBSampler:
    """Integrand sampler that counts evaluations."""

    def __init__(self, p, d, z, epsilon):
        self.p, self.d, self.z, self.epsilon = p, d, z, epsilon
        self.evaluations = 0

    def __call__(self, t):
        logg, weight = _mb_log_integrand(self.p, self.d, self.z, t, self.epsilon)
        self.evaluations += np.size(t)
        with np.errstate(under="ignore"):
            return np.exp(logg), weight


def _trapezoid(g, h):
    return h * (np.sum(g) - 0.5 * (g[0] + g[-1]))


def cauchy_sdf_mb(p: CauchyParams, d: int, z: float, cfg: MBConfig = None, tol=1e-10) -> SpectralResult:
    """Generalized Cauchy spectral density by Mellin-Barnes quadrature.

    With ``cfg`` given, the trapezoidal rule is applied with exactly
    ``cfg.step`` on ``[-cfg.t_max, cfg.t_max]``; the discretisation error is
    the difference to the rule with twice the step. Without ``cfg`` the
    truncation height grows until the integrand at the ends drops below
    ``tol * 1e-2`` of its peak, and the step is halved until successive
    results agree to ``tol`` (relative) or reach the rounding floor.

    The imaginary part of the assembled integral must vanish within
    ``10 * abs_err_estimate``; it is discarded after the check.
    """
    d = _check_d(d)
    z = _check_z(z)
    tol = float(tol)
    if not tol > 0.0:
        raise ParameterError("tol must be > 0")
    if cfg is None:
        cfg_eps = MBConfig.default_epsilon(p)
        auto = True
    else:
        cfg_eps = cfg.epsilon
        auto = False
    probe = MBConfig(epsilon=cfg_eps)
    probe.check_contour(p, d)

    sample = _MBSampler(p, d, z, cfg_eps)
    peak = float(np.max(np.abs(sample(np.linspace(-2.0, 2.0, 33))[0])))

    if auto:
        t_max = 10.0
        while True:
            g_end, _ = sample(np.array([t_max]))
            if abs(g_end[0]) <= 1e-2 * tol * peak:
                break
            t_max *= 1.4
            if t_max > 2000.0:
                raise TruncationError(
                    f"integrand still {abs(g_end[0]):.3e} (peak {peak:.3e}) at t={t_max:.1f}"
                )
        step = min(0.25, t_max / 64.0)
    else:
        t_max, step = cfg.t_max, cfg.step

    def rule(h):
        n = max(2, int(math.ceil(t_max / h)))
        h = t_max / n
        t = h * np.arange(-n, n + 1)
        g, weight = sample(t)
        return _trapezoid(g, h), g, weight, h

    if auto:
        coarse, _, _, _ = rule(step)
        while True:
            step *= 0.5
            fine, g, weight, h = rule(step)
            disc = abs(fine - coarse)
            floor = 100.0 * _EPS * h * float(np.sum(np.abs(g)))
            if disc <= max(tol * abs(fine.real), floor):
                break
            if step < 1e-3:
                raise ConvergenceError(
                    f"Mellin-Barnes quadrature did not settle: step={step:.2e}, "
                    f"difference={disc:.3e}"
                )
            coarse = fine
    else:
        fine, g, weight, h = rule(step)
        coarse, _, _, _ = rule(2.0 * h)
        disc = abs(fine - coarse)

    g_end = abs(g[-1])
    if g_end > tol * peak:
        raise TruncationError(
            f"integrand magnitude {g_end:.3e} at t_max={t_max} exceeds tol*peak={tol * peak:.3e}"
        )
    g_prev = abs(g[-2])
    rate = math.log(g_prev / g_end) / h if g_end > 0.0 and g_prev > g_end else 0.0
    rate = max(rate, 0.5)
    truncation = 2.0 * g_end / rate
    rounding = _EPS * h * float(np.sum(np.abs(g) * (weight + 4.0)))
    err = disc + truncation + rounding
    if abs(fine.imag) > 10.0 * err:
        raise SymmetryError(
            f"imaginary part {fine.imag:.3e} exceeds 10x error estimate {err:.3e}"
        )
    return SpectralResult(float(fine.real), err, Route.MELLIN_BARNES, sample.evaluations)


# ---------------------------------------------------------------------------
# Hankel route
# ---------------------------------------------------------------------------


def _kernel_zeros(d, k):
    """First ``k`` positive zeros of J_{d/2-1}(x)."""
    idx = np.arange(1, k + 1, dtype=float)
    if d == 1:
        return (idx - 0.5) * np.pi
    if d == 3:
        return idx * np.pi
    return bessel_j0_zeros(k)


def hankel_sdf(phi, d: int, z: float, tol=1e-10, max_segments=8192, integrable=True) -> SpectralResult:
    """Spectral density of a radial covariance ``phi`` in R^d by direct integration.

    Evaluates z^(1-d/2) (2 pi)^(-d/2) * int_0^inf u^(d/2) J_{d/2-1}(u z) phi(u) du.
    The piece up to the first zero of the Bessel factor goes to adaptive
    quadrature; every following half-oscillation is integrated with
    Gauss-Legendre rules and the alternating partial sums are extrapolated.

    ``phi`` must accept numpy arrays. ``integrable=False`` only adds a flag
    to the result.
    """
    d = _check_d(d)
    z = _check_z(z)
    nu = 0.5 * d - 1.0
    const = z ** (1.0 - 0.5 * d) / (2.0 * math.pi) ** (0.5 * d)
    evaluations = 0

    def f(u):
        return const * u ** (0.5 * d) * bessel_j(nu, u * z) * phi(u)

    zeros = _kernel_zeros(d, 64) / z
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        first, first_err, info = integrate.quad(
            lambda u: float(f(np.array(u))), 0.0, zeros[0], epsabs=0.0, epsrel=1e-13, limit=400,
            full_output=True,
        )[:3]
    evaluations += info["neval"]

    def segments(lo_idx, hi_idx):
        nonlocal evaluations
        a = zeros[lo_idx:hi_idx]
        b = zeros[lo_idx + 1 : hi_idx + 1]
        mid = 0.5 * (a + b)[:, None]
        half = 0.5 * (b - a)[:, None]
        out = []
        for nodes, weights in (_GL_HI, _GL_LO):
            u = mid + half * nodes[None, :]
            out.append(half[:, 0] * (f(u) @ weights))
            evaluations += u.size
        return out[0], np.abs(out[0] - out[1])

    pieces = []
    gl_err = []
    done = 0
    n_target = 32
    previous = None
    while True:
        if zeros.size < n_target + 1:
            zeros = _kernel_zeros(d, 2 * n_target + 1) / z
        vals, errs = segments(done, n_target)
        pieces.extend(vals)
        gl_err.extend(errs)
        done = n_target
        partial = first + np.cumsum(pieces)
        plain_err = abs(pieces[-1])
        est, wynn_err = wynn_epsilon(partial)
        if previous is not None:
            wynn_err = max(wynn_err, abs(est - previous))
        previous = est
        if plain_err <= wynn_err:
            value, accel_err = float(partial[-1]), plain_err
        else:
            value, accel_err = est, wynn_err
        err = accel_err + first_err + float(np.sum(gl_err))
        scale = float(np.max(np.abs(partial)))
        if err <= tol * max(abs(value), 1e-3 * scale):
            break
        if n_target >= max_segments:
            raise ConvergenceError(
                f"Hankel extrapolation did not stabilise after {n_target} segments: "
                f"value={value:.6e}, error={err:.3e}"
            )
        n_target *= 2

    flags = () if integrable else ("conditionally_convergent",)
    return SpectralResult(value, err, Route.HANKEL, evaluations, flags)


def cauchy_sdf_hankel(p: CauchyParams, d: int, z: float, tol=1e-10) -> SpectralResult:
    """Generalized Cauchy spectral density from the Hankel integral of the covariance.

    When lam*delta <= d the covariance is not absolutely integrable and the
    integral exists only through oscillation; the result is then flagged
    ``conditionally_convergent``.
    """
    d = _check_d(d)
    return hankel_sdf(
        lambda u: cauchy_eval(p, u), d, z, tol=tol, integrable=p.lam * p.delta > d
    )


# ---------------------------------------------------------------------------
# Series route and dispatcher
# ---------------------------------------------------------------------------


def cauchy_sdf_series_route(p: CauchyParams, d: int, z: float, tol=1e-10, max_terms=400) -> SpectralResult:
    """Residue-series route wrapped as a :class:`SpectralResult`.

    Raises ConvergenceError when the series cannot certify ``tol``.
    """
    d = _check_d(d)
    res = cauchy_sdf_series(p, d, z, tol=tol, max_terms=max_terms)
    if not res.converged:
        raise ConvergenceError(
            f"series did not reach tol={tol:g}: error bound {res.abs_err_estimate:.3e} "
            f"for value {res.value:.6e}"
        )
    return SpectralResult(res.value, res.abs_err_estimate, Route.SERIES, res.terms_used)


SERIES_MAX_ARGUMENT = 0.5


def cauchy_sdf(p: CauchyParams, d: int, z: float, tol=1e-10) -> SpectralResult:
    """Generalized Cauchy spectral density via the most suitable route.

    Uses the series when z*gamma/2 <= 0.5 and no pole collision is near,
    otherwise Mellin-Barnes quadrature; any route failure falls through to
    the next route (series, Mellin-Barnes, Hankel).
    """
    d = _check_d(d)
    z = _check_z(z)
    routes = []
    if 0.5 * z * p.gamma <= SERIES_MAX_ARGUMENT and find_pole_collision(p.lam, p.delta, d, 400) is None:
        routes.append(cauchy_sdf_series_route)
    routes.extend([cauchy_sdf_mb, cauchy_sdf_hankel])
    failures = []
    for route in routes:
        try:
            return route(p, d, z, tol=tol)
        except NumericalError as exc:
            failures.append(f"{route.__name__}: {exc}")
    raise ConvergenceError(
        f"all spectral routes failed for {p} at d={d}, z={z!r}: " + "; ".join(failures)
    )
