"""Gamma, beta and Bessel functions in double precision.

``lgamma_complex``, ``bessel_k`` and ``bessel_j`` accept numpy arrays and
return arrays of the same shape (scalars for scalar input); ``lgamma_real``
and ``beta`` are scalar.
"""

import math
import sys

import numpy as np

from .errors import DomainError, PoleError, UnsupportedOrderError

__all__ = [
    "lgamma_real",
    "lgamma_complex",
    "gamma_sign",
    "log_beta",
    "beta",
    "bessel_k",
    "bessel_k_scaled",
    "bessel_j",
    "bessel_j0_j1",
    "bessel_j0_zeros",
]

_EPS = np.finfo(float).eps
_TINY = sys.float_info.min
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# Stirling series coefficients B_2k / (2k (2k-1)), k = 1..10.
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
)

# Taylor coefficients of 1/Gamma(1 + x) about 0.
_RGAMMA1P = (
    1.0,
    0.57721566490153286061,
    -0.65587807152025388108,
    -0.042002635034095235529,
    0.1665386113822914895,
    -0.042197734555544336748,
    -0.0096219715278769735621,
    0.0072189432466630995424,
    -0.0011651675918590651121,
    -0.00021524167411495097282,
    0.00012805028238811618615,
    -0.000020134854780788238656,
    -1.2504934821426706573e-6,
    1.1330272319816958824e-6,
    -2.0563384169776071035e-7,
    6.1160951044814158179e-9,
    5.0020076444692229301e-9,
    -1.1812745704870201446e-9,
    1.0434267116911005105e-10,
    7.782263439905071254e-12,
    -3.6968056186422057082e-12,
    5.100370287454475979e-13,
    -2.0583260535665067832e-14,
    -5.3481225394230179824e-15,
    1.2267786282382607902e-15,
    -1.1812593016974587695e-16,
    1.1866922547516003326e-18,
    1.4123806553180317816e-18,
    -2.2987456844353702066e-19,
    1.7144063219273374334e-20,
)


def _is_pole(x):
    return x <= 0.0 and x == math.floor(x)


def _check_finite_real(name, x):
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")
    return x


def gamma_sign(x):
    """Sign of Gamma(x) for real, non-pole ``x``."""
    if x > 0.0:
        return 1.0
    return -1.0 if math.ceil(-x) % 2 else 1.0


def lgamma_real(x):
    """Return ``(log|Gamma(x)|, sign(Gamma(x)))``.

    Raises PoleError at non-positive integers.
    """
    x = _check_finite_real("x", x)
    if _is_pole(x):
        raise PoleError(f"Gamma has a pole at x={x!r}", argument=x)
    sign = gamma_sign(x)
    if 20.0 < x < 172.0:
        # libm's lgamma loses ~1 ulp of the log here, which is 1e-13 after
        # exponentiation; an exactly-rounded sum of logs of the recurrence
        # factors keeps exp(result) within a few 1e-14.
        n = int(x) - 2
        base = x - n
        terms = [math.log(base + k) for k in range(n)]
        terms.append(math.lgamma(base))
        return math.fsum(terms), sign
    return math.lgamma(x), sign


def lgamma_complex(z):
    """Principal branch of log Gamma(z) for complex ``z``.

    Arguments with real part below 10 are shifted up with the recurrence
    Gamma(z+1) = z Gamma(z); the Stirling series is summed at the shifted
    point. Array input is evaluated elementwise.
    """
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise DomainError("lgamma_complex: non-finite argument")
    on_pole = (z.imag == 0.0) & (z.real <= 0.0) & (z.real == np.floor(z.real))
    if np.any(on_pole):
        bad = z[on_pole].ravel()[0]
        raise PoleError(f"Gamma has a pole at z={bad!r}", argument=bad)

    shift = np.maximum(0.0, np.ceil(10.0 - z.real)).astype(np.int64)
    correction = np.zeros_like(z)
    for k in range(int(shift.max()) if shift.size else 0):
        active = shift > k
        correction[active] += np.log(z[active] + k)
    w = z + shift

    winv = 1.0 / w
    winv2 = winv * winv
    series = np.zeros_like(w)
    for coef in reversed(_STIRLING):
        series = series * winv2 + coef
    series *= winv
    result = (w - 0.5) * np.log(w) - w + _HALF_LOG_2PI + series - correction
    return complex(result) if scalar else result


def log_beta(a, b):
    a = _check_finite_real("a", a)
    b = _check_finite_real("b", b)
    if a <= 0.0 or b <= 0.0:
        raise DomainError(f"beta requires a > 0 and b > 0, got a={a!r}, b={b!r}")
    return lgamma_real(a)[0] + lgamma_real(b)[0] - lgamma_real(a + b)[0]


def beta(a, b):
    """Euler beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b)."""
    return math.exp(log_beta(a, b))


# ---------------------------------------------------------------------------
# Modified Bessel function of the second kind
# ---------------------------------------------------------------------------


def _temme_gammas(mu):
    """gam1, gam2 of Temme's method plus 1/Gamma(1+mu), 1/Gamma(1-mu)."""
    mu2 = mu * mu
    even = sum(c * mu2 ** (k // 2) for k, c in enumerate(_RGAMMA1P) if k % 2 == 0)
    odd = sum(c * mu2 ** (k // 2) for k, c in enumerate(_RGAMMA1P) if k % 2)
    gampl = even + mu * odd
    gammi = even - mu * odd
    return -odd, even, gampl, gammi


def _k_small_x(mu, x):
    """Temme's series for (K_mu, K_{mu+1}) at 0 < x <= 2, |mu| <= 1/2."""
    x2 = 0.5 * x
    pimu = math.pi * mu
    fact = 1.0 if abs(pimu) < _EPS else pimu / math.sin(pimu)
    d = -np.log(x2)
    e = mu * d
    with np.errstate(invalid="ignore", divide="ignore"):
        fact2 = np.where(np.abs(e) < _EPS, 1.0, np.sinh(e) / e)
    gam1, gam2, gampl, gammi = _temme_gammas(mu)
    ff = fact * (gam1 * np.cosh(e) + gam2 * fact2 * d)
    total = ff.copy()
    ee = np.exp(e)
    p = 0.5 * ee / gampl
    q = 0.5 / (ee * gammi)
    c = np.ones_like(x)
    dd = x2 * x2
    total1 = p.copy()
    mu2 = mu * mu
    for i in range(1, 200):
        ff = (i * ff + p + q) / (i * i - mu2)
        c = c * dd / i
        p = p / (i - mu)
        q = q / (i + mu)
        delta = c * ff
        delta1 = c * (p - i * ff)
        total += delta
        total1 += delta1
        if np.all(np.abs(delta) <= np.abs(total) * _EPS) and np.all(
            np.abs(delta1) <= np.abs(total1) * _EPS
        ):
            break
    return total, total1 * (2.0 / x)


def _k_large_x_scaled(mu, x):
    """Steed's continued fraction for exp(x) (K_mu, K_{mu+1}) at x > 2."""
    mu2 = mu * mu
    a1 = 0.25 - mu2
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d.copy()
    delh = d.copy()
    q1 = np.zeros_like(x)
    q2 = np.ones_like(x)
    q = np.full_like(x, a1)
    c = np.full_like(x, a1)
    a = -a1
    s = 1.0 + q * delh
    active = np.ones(x.shape, dtype=bool)
    with np.errstate(all="ignore"):
        for i in range(2, 10000):
            if not active.any() or a1 == 0.0:
                break
            a -= 2 * (i - 1)
            c_new = -a * c / i
            qnew = (q1 - b * q2) / a
            q1_new = q2
            q_new = q + c_new * qnew
            b_new = b + 2.0
            d_new = 1.0 / (b_new + a * d)
            delh_new = (b_new * d_new - 1.0) * delh
            dels = q_new * delh_new
            s_new = s + dels
            h_new = h + delh_new
            c = np.where(active, c_new, c)
            q1 = np.where(active, q1_new, q1)
            q2 = np.where(active, qnew, q2)
            q = np.where(active, q_new, q)
            b = np.where(active, b_new, b)
            d = np.where(active, d_new, d)
            delh = np.where(active, delh_new, delh)
            h = np.where(active, h_new, h)
            s = np.where(active, s_new, s)
            active &= ~(np.abs(dels) < np.abs(s) * _EPS)
    h = a1 * h
    kmu = np.sqrt(np.pi / (2.0 * x)) / s
    k1 = kmu * (mu + x + 0.5 - h) / x
    return kmu, k1


def bessel_k_scaled(nu, x):
    """exp(x) K_nu(x) for real ``nu >= 0`` and ``x > 0``."""
    nu = _check_finite_real("nu", nu)
    if nu < 0.0:
        raise DomainError(f"bessel_k requires nu >= 0, got {nu!r}")
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(x <= 0.0):
        raise DomainError("bessel_k requires finite x > 0")
    nl = int(nu + 0.5)
    mu = nu - nl
    kmu = np.empty_like(x)
    k1 = np.empty_like(x)
    small = x <= 2.0
    if small.any():
        xs = x[small]
        a, b = _k_small_x(mu, xs)
        ex = np.exp(xs)
        kmu[small] = a * ex
        k1[small] = b * ex
    if (~small).any():
        a, b = _k_large_x_scaled(mu, x[~small])
        kmu[~small] = a
        k1[~small] = b
    two_over_x = 2.0 / x
    for i in range(1, nl + 1):
        kmu, k1 = k1, (mu + i) * two_over_x * k1 + kmu
    return float(kmu) if scalar else kmu


def bessel_k(nu, x, full_output=False):
    """Modified Bessel function of the second kind K_nu(x).

    Parameters
    ----------
    nu : float
        Order, ``nu >= 0``.
    x : float or array_like
        Argument, ``x > 0``.
    full_output : bool
        If true, also return a boolean (array) flagging values that
        underflowed to zero or into the subnormal range.
    """
    scaled = bessel_k_scaled(nu, x)
    with np.errstate(under="ignore", divide="ignore"):
        value = np.exp(np.log(scaled) - np.asarray(x, dtype=float))
    underflow = value < _TINY
    if np.ndim(value) == 0:
        value = float(value)
        underflow = bool(underflow)
    if full_output:
        return value, underflow
    return value


# ---------------------------------------------------------------------------
# Bessel functions of the first kind
# ---------------------------------------------------------------------------

_SERIES_MAX = 5.0
_ASYMPTOTIC_MIN = 25.0


def _j01_series(x):
    y = -0.25 * x * x
    j0 = np.ones_like(x)
    j1 = 0.5 * x
    t0 = np.ones_like(x)
    t1 = 0.5 * x
    for k in range(1, 40):
        t0 = t0 * y / (k * k)
        t1 = t1 * y / (k * (k + 1))
        j0 += t0
        j1 += t1
    return j0, j1


def _j01_miller(x):
    # Backward recurrence from an order well above x, normalised with
    # 1 = J0 + 2 (J2 + J4 + ...).
    top = 2 * ((int(np.max(x)) + 60) // 2)
    jp1 = np.zeros_like(x)
    jk = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    j1 = None
    for k in range(top, 0, -1):
        jm1 = (2.0 * k / x) * jk - jp1
        jp1, jk = jk, jm1
        # jk now holds J_{k-1}
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * jk
        if k - 1 == 1:
            j1 = jk.copy()
    norm += jk
    return jk / norm, j1 / norm


def _j01_asymptotic(x):
    out = []
    for order in (0, 1):
        mu4 = 4.0 * order * order
        a = 1.0
        p = np.ones_like(x)
        q = np.zeros_like(x)
        xinv = 1.0 / x
        power = np.ones_like(x)
        for k in range(1, 40):
            a *= (mu4 - (2 * k - 1) ** 2) / (8.0 * k)
            power = power * xinv
            term = a * power
            # signs: P gets (-1)^(k/2) for even k, Q gets (-1)^((k-1)/2) for odd k
            if k % 2 == 0:
                p += term if (k // 2) % 2 == 0 else -term
            else:
                q += term if ((k - 1) // 2) % 2 == 0 else -term
        c, s = np.cos(x), np.sin(x)
        r2 = math.sqrt(0.5)
        if order == 0:
            cw, sw = r2 * (c + s), r2 * (s - c)
        else:
            cw, sw = r2 * (s - c), -r2 * (s + c)
        out.append(np.sqrt(2.0 / (np.pi * x)) * (p * cw - q * sw))
    return out[0], out[1]


def bessel_j0_j1(x):
    """J0(x) and J1(x) for real ``x >= 0`` (arrays accepted)."""
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(x < 0.0):
        raise DomainError("bessel_j0_j1 requires finite x >= 0")
    j0 = np.empty_like(x)
    j1 = np.empty_like(x)
    for mask, fn in (
        (x < _SERIES_MAX, _j01_series),
        ((x >= _SERIES_MAX) & (x < _ASYMPTOTIC_MIN), _j01_miller),
        (x >= _ASYMPTOTIC_MIN, _j01_asymptotic),
    ):
        if mask.any():
            a, b = fn(x[mask])
            j0[mask] = a
            j1[mask] = b
    if scalar:
        return float(j0), float(j1)
    return j0, j1


def bessel_j(nu, x):
    """Bessel function of the first kind for orders -1/2, 0 and 1/2.

    Half-integer orders use their trigonometric closed forms.
    """
    if nu not in (-0.5, 0.0, 0.5):
        raise UnsupportedOrderError(f"bessel_j supports nu in {{-1/2, 0, 1/2}}, got {nu!r}")
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(x < 0.0):
        raise DomainError("bessel_j requires finite x >= 0")
    if nu == 0.0:
        out = bessel_j0_j1(x)[0]
    elif nu == 0.5:
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(x > 0.0, np.sqrt(2.0 / (np.pi * x)) * np.sin(x), 0.0)
    else:
        if np.any(x == 0.0):
            raise DomainError("J_{-1/2} is singular at x = 0")
        out = np.sqrt(2.0 / (np.pi * x)) * np.cos(x)
    return float(out) if scalar else out


def bessel_j0_zeros(n):
    """First ``n`` positive zeros of J0."""
    k = np.arange(1, n + 1, dtype=float)
    b = (k - 0.25) * np.pi
    eb = 8.0 * b
    x = b + 1.0 / eb - 124.0 / (3.0 * eb**3) + 120928.0 / (15.0 * eb**5)
    for _ in range(4):
        j0, j1 = bessel_j0_j1(x)
        x = x + j0 / j1
    return x
