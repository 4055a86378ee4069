"""Fox-Wright series and the residue-series form of the Cauchy spectral density.

Terms are formed in log space with explicit sign tracking so that ratios
of large gamma values do not overflow before they cancel.
"""

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from .covmodels import CauchyParams
from .errors import ConvergenceError, ParameterError, PoleCollisionError, PoleError
from .specfun import lgamma_real

__all__ = [
    "FoxWrightSpec",
    "SeriesResult",
    "fox_wright",
    "fox_wright_terms",
    "cauchy_foxwright_form",
    "cauchy_sdf_series",
    "find_pole_collision",
    "COLLISION_GUARD",
]

_EPS = 2.220446049250313e-16
COLLISION_GUARD = 1e-6
# relative distance to a non-positive integer treated as an exact pole
_POLE_ATOL = 1e-12


@dataclass(frozen=True)
class FoxWrightSpec:
    """Parameters of a pψq series: ``upper`` = ((alpha_j, A_j), ...), ``lower`` = ((gamma_j, B_j), ...)."""

    upper: Sequence[tuple]
    lower: Sequence[tuple]
    z: float

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple((float(a), float(b)) for a, b in self.upper))
        object.__setattr__(self, "lower", tuple((float(a), float(b)) for a, b in self.lower))
        object.__setattr__(self, "z", float(self.z))

    @property
    def delta(self):
        return 1.0 + sum(b for _, b in self.lower) - sum(a for _, a in self.upper)

    @property
    def radius(self):
        rho = 1.0
        for _, a in self.upper:
            if a != 0.0:
                rho *= abs(a) ** (-a)
        for _, b in self.lower:
            if b != 0.0:
                rho *= abs(b) ** b
        return rho


@dataclass(frozen=True)
class SeriesResult:
    value: float
    terms_used: int
    tail_bound: float
    converged: bool
    # rounding-error bound from cancellation between terms
    rounding_bound: float = 0.0

    @property
    def abs_err_estimate(self):
        return self.tail_bound + self.rounding_bound


def _near_pole(x):
    r = round(x)
    return r <= 0 and abs(x - r) <= _POLE_ATOL * max(1.0, abs(x))


def _lg(x):
    """(log|Gamma(x)|, sign, error weight).

    The weight bounds the relative error of Gamma(x) in units of eps: the
    log's own rounding plus |x psi(x)| for the rounding of the argument,
    with psi approximated by log|x| away from poles and 1/distance near them.
    """
    lg, s = lgamma_real(x)
    sens = math.log(2.0 + abs(x))
    if x < 0.5:
        sens += 1.0 / abs(x - round(x))
    return lg, s, abs(lg) + abs(x) * sens + 1.0


def _log_gamma_term(x, k):
    if _near_pole(x):
        raise PoleError(f"numerator gamma pole at argument {x!r} (term k={k})", argument=x, index=k)
    return _lg(x)


def fox_wright_terms(spec: FoxWrightSpec) -> Iterator[tuple]:
    """Yield ``(k, log|t_k|, sign_k, log_weight_k)`` for the series terms.

    ``sign_k`` is 0 for terms killed by a lower-parameter pole (1/Gamma = 0).
    ``log_weight_k`` is the sum of magnitudes of the log components, used
    for rounding-error bounds.
    """
    z = spec.z
    log_abs_z = math.log(abs(z)) if z != 0.0 else -math.inf
    k = 0
    while True:
        logmag = 0.0
        weight = 0.0
        sign = 1.0
        for a, A in spec.upper:
            lg, s, w = _log_gamma_term(a + A * k, k)
            logmag += lg
            weight += w
            sign *= s
        for g, B in spec.lower:
            x = g + B * k
            if _near_pole(x):
                sign = 0.0
                continue
            lg, s, w = _lg(x)
            logmag -= lg
            weight += w
            sign *= s
        if k > 0:
            if z == 0.0:
                sign = 0.0
            else:
                lf = math.lgamma(k + 1.0)
                logmag += k * log_abs_z - lf
                weight += abs(k * log_abs_z) + lf
                if z < 0.0 and k % 2:
                    sign = -sign
        yield k, logmag, sign, weight
        k += 1


def _term_value(logmag, sign):
    if sign == 0.0:
        return 0.0
    return sign * math.exp(logmag)


def _check_convergent(spec):
    delta = spec.delta
    if delta > 1e-12:
        return
    if abs(delta) <= 1e-12 and abs(spec.z) < spec.radius:
        return
    raise ParameterError(
        f"Fox-Wright series does not converge: delta={delta:.6g}, |z|={abs(spec.z):.6g}, "
        f"radius={spec.radius:.6g}"
    )


def fox_wright(spec: FoxWrightSpec, tol=1e-14, max_terms=1000) -> SeriesResult:
    """Partial sum of the Fox-Wright series pψq(spec.z).

    Terms are added until two consecutive terms are below ``tol`` times the
    partial sum in magnitude. ``tail_bound`` is twice the first omitted term.
    """
    _check_convergent(spec)
    total = 0.0
    abs_total = 0.0
    rounding = 0.0
    prev_small = False
    terms = fox_wright_terms(spec)
    for k, logmag, sign, weight in terms:
        if k >= max_terms:
            t_next = abs(_term_value(logmag, sign))
            return SeriesResult(total, k, 2.0 * t_next, False, rounding)
        t = _term_value(logmag, sign)
        total += t
        abs_total += abs(t)
        rounding += abs(t) * _EPS * (4.0 + weight)
        small = abs(t) <= tol * abs(total)
        if small and prev_small:
            _, lm, sg, _ = next(terms)
            t_next = abs(_term_value(lm, sg))
            rounding += _EPS * abs_total
            tail = 2.0 * t_next
            return SeriesResult(total, k + 1, tail, tail <= tol * abs(total) or tail == 0.0, rounding)
        prev_small = small
    raise AssertionError("unreachable")


def cauchy_foxwright_form(p: CauchyParams, d: int, z: float):
    """The spectral density as two ₂ψ₁ series.

    Returns ``(log_prefactor, [(log_weight_1, spec_1), (log_weight_2, spec_2)])`` so that
    the density equals ``exp(log_prefactor) * sum_i exp(log_weight_i) * 2psi1(spec_i)``.
    """
    lam, delta, gamma = p.lam, p.delta, p.gamma
    x = 0.5 * z * gamma
    logx = math.log(x)
    log_pref = (
        -d * math.log(z) - 0.5 * d * math.log(math.pi) - lgamma_real(lam)[0] + math.log(p.sigma2)
    )
    first = FoxWrightSpec(
        upper=[(lam, 1.0), (0.5 * (d - lam * delta), -0.5 * delta)],
        lower=[(0.5 * lam * delta, 0.5 * delta)],
        z=-(x**delta),
    )
    second = FoxWrightSpec(
        upper=[(d / delta, 2.0 / delta), ((lam * delta - d) / delta, -2.0 / delta)],
        lower=[(0.5 * d, 1.0)],
        z=-(x * x),
    )
    return log_pref, [(lam * delta * logx, first), (math.log(2.0 / delta) + d * logx, second)]


def find_pole_collision(lam, delta, d, n_max, guard=COLLISION_GUARD):
    """Return ``(n, m)`` with |(lam+n) delta - (d+2m)| < guard, or None.

    Such a coincidence merges a pole of Gamma(u+lam) with one of
    Gamma(d/2 + u delta/2) into a double pole.
    """
    for n in range(n_max + 1):
        v = (lam + n) * delta - d
        if v < -guard:
            continue
        m = max(0, round(0.5 * v))
        if abs(v - 2 * m) < guard:
            return n, m
        if v > 2.0 * n_max + d + 2.0 * guard:
            break
    return None


def cauchy_sdf_series(p: CauchyParams, d: int, z: float, tol=1e-12, max_terms=400) -> SeriesResult:
    """Generalized Cauchy spectral density from its two residue series.

    The first series runs over powers (z gamma/2)^((lam+n) delta), the
    second over (z gamma/2)^(2n+d); both alternate. The result carries a
    tail bound (twice the first omitted terms) and a rounding bound that
    accounts for cancellation between large terms.

    Raises
    ------
    PoleCollisionError
        When the two pole families come within ``COLLISION_GUARD`` of each
        other, so the simple-pole expansion is invalid.
    ConvergenceError
        When cancellation leaves no significant digits.
    """
    if d not in (1, 2, 3):
        raise ParameterError(f"d must be 1, 2 or 3, got {d!r}")
    z = float(z)
    if not (math.isfinite(z) and z > 0.0):
        raise ParameterError(f"z must be a finite positive number, got {z!r}")
    lam, delta = p.lam, p.delta
    hit = find_pole_collision(lam, delta, d, max_terms)
    if hit is not None:
        n, m = hit
        raise PoleCollisionError(
            f"pole collision: (lam+{n})*delta = {(lam + n) * delta!r} ~ d+2*{m}; "
            "use a quadrature route",
            n=n,
            m=m,
        )

    x = 0.5 * z * p.gamma
    logx = math.log(x)
    log_pref = (
        -d * math.log(z) - 0.5 * d * math.log(math.pi) - lgamma_real(lam)[0] + math.log(p.sigma2)
    )
    log_two_over_delta = math.log(2.0 / delta)

    def first_term(n):
        a = lam + n
        lg1, s1, w1 = _lg(a)
        lg2, s2, w2 = _lg(0.5 * d - 0.5 * a * delta)
        lg3, s3, w3 = _lg(0.5 * a * delta)
        lf = math.lgamma(n + 1.0)
        pw = a * delta * logx
        logmag = log_pref + lg1 + lg2 - lg3 - lf + pw
        weight = abs(log_pref) + w1 + w2 + w3 + lf + 2.0 * abs(pw)
        sign = s1 * s2 * s3 * (-1.0 if n % 2 else 1.0)
        return sign * math.exp(logmag), weight

    def second_term(n):
        b = (2 * n + d) / delta
        lg1, s1, w1 = _lg(b)
        lg2, s2, w2 = _lg(lam - b)
        lg3, s3, w3 = _lg(n + 0.5 * d)
        lf = math.lgamma(n + 1.0)
        pw = (2 * n + d) * logx
        logmag = log_pref + log_two_over_delta + lg1 + lg2 - lg3 - lf + pw
        weight = abs(log_pref) + w1 + w2 + w3 + lf + 2.0 * abs(pw)
        sign = s1 * s2 * s3 * (-1.0 if n % 2 else 1.0)
        return sign * math.exp(logmag), weight

    total = 0.0
    abs_total = 0.0
    rounding = 0.0
    small_run = 0
    try:
        for n in range(max_terms):
            t1, w1 = first_term(n)
            t2, w2 = second_term(n)
            total += t1 + t2
            abs_total += abs(t1) + abs(t2)
            rounding += _EPS * (abs(t1) * (8.0 + w1) + abs(t2) * (8.0 + w2))
            if abs(t1) + abs(t2) <= tol * abs(total):
                small_run += 1
            else:
                small_run = 0
            if small_run >= 2:
                n1, _ = first_term(n + 1)
                n2, _ = second_term(n + 1)
                tail = 2.0 * (abs(n1) + abs(n2))
                rounding += _EPS * abs_total
                if rounding >= abs(total):
                    raise ConvergenceError(
                        f"series cancellation leaves no significant digits at z*gamma/2={x:.6g}"
                    )
                ok = tail + rounding <= tol * abs(total)
                return SeriesResult(total, 2 * (n + 1), tail, ok, rounding)
    except OverflowError as exc:
        raise ConvergenceError(f"series terms overflow at z*gamma/2={x:.6g}") from exc
    return SeriesResult(total, 2 * max_terms, math.inf, False, rounding)
