"""Complex gamma, Kummer M and Whittaker M/W in double precision.

All functions are scalar and pure.  Arguments may be real or complex; results
are Python ``complex``.  Regimes:

* ``kummer_m`` sums the power series with exactly-rounded accumulation of the
  real and imaginary parts for ``|x| < threshold`` and uses the large-argument
  expansion (two Tricomi ``U`` asymptotic series) above it.  When the series
  cancels badly, the Kummer-transformed series, the expansion and two Laplace
  integrals for ``U`` compete on their error estimates.
* ``whittaker_w`` uses the Kummer connection formula below ``switchover`` and
  the asymptotic series ``e^{-x/2} x^k (1 + sum c_j x^{-j})`` above it.  When
  the connection formula cancels badly (large ``Re x``) or the asymptotic
  series stalls, the Laplace integral for ``U`` with a downward recurrence in
  ``a`` is tried as well and the better error estimate wins.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import loggamma as _sp_loggamma
from scipy.special import rgamma as _sp_rgamma
from scipy.special import roots_genlaguerre

from .errors import ConvergenceError, DegenerateIndexError, DomainError, PoleError

POLE_TOL = 1e-10
DEGENERACY_TOL = 1e-6
SWITCHOVER = 30.0
KUMMER_THRESHOLD = 30.0
KUMMER_MAX_TERMS = 10_000

_EPS = np.finfo(float).eps
_LAGUERRE_NODES = 80


@dataclass(frozen=True)
class PolarGamma:
    """Gamma value in the form ``modulus * exp(-1j * phase)``."""

    modulus: float
    phase: float

    @property
    def value(self) -> complex:
        return self.modulus * cmath.exp(-1j * self.phase)

    def conjugate(self) -> "PolarGamma":
        return PolarGamma(self.modulus, _principal(-self.phase))


def _principal(angle: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    r = math.remainder(angle, 2.0 * math.pi)
    return math.pi if r == -math.pi else r


def near_gamma_pole(w, tol: float = POLE_TOL) -> bool:
    w = complex(w)
    n = round(w.real)
    return n <= 0 and abs(w - n) < tol


def is_degenerate_index(mu: float, tol: float = DEGENERACY_TOL) -> bool:
    """True when ``2*mu`` is within ``tol`` of an integer."""
    two_mu = 2.0 * float(mu)
    return abs(two_mu - round(two_mu)) < tol


def _check_degenerate(mu: float) -> None:
    if is_degenerate_index(mu):
        raise DegenerateIndexError(
            f"2*mu = {2.0 * mu!r} is within {DEGENERACY_TOL} of an integer; "
            "the logarithmic Whittaker case is not evaluated"
        )


def log_gamma(w) -> complex:
    """Principal branch of log Gamma(w)."""
    w = complex(w)
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        raise DomainError(f"non-finite argument {w!r}")
    if near_gamma_pole(w):
        raise PoleError(f"Gamma has a pole at {w!r}", tag="gamma", argument=w)
    return complex(_sp_loggamma(w))


def gamma(w) -> complex:
    return cmath.exp(log_gamma(w))


def rgamma(w) -> complex:
    """1/Gamma(w); entire, exactly zero at the poles of Gamma."""
    w = complex(w)
    return complex(_sp_rgamma(w))


def gamma_polar(w) -> PolarGamma:
    """Return (chi, theta) with Gamma(w) = chi * exp(-1j*theta), theta principal."""
    lg = log_gamma(w)
    return PolarGamma(math.exp(lg.real), _principal(-lg.imag))


def _cpow(x: complex, p) -> complex:
    """Principal-branch power x**p (cut on the negative real axis)."""
    if x == 0:
        return 0j
    return cmath.exp(p * cmath.log(x))


# ---------------------------------------------------------------- Kummer M


def _kummer_series(a: complex, b: complex, x: complex, max_terms: int = KUMMER_MAX_TERMS):
    """Sum M(a, b, x) term by term.

    Returns ``(value, condition)`` where ``condition = sum|t_j| / |value|``
    measures cancellation.
    """
    re_terms = [1.0]
    im_terms = [0.0]
    t = 1.0 + 0j
    abs_sum = 1.0
    running = 1.0 + 0j
    small = 0
    for j in range(max_terms):
        t = t * (a + j) / ((b + j) * (j + 1)) * x
        re_terms.append(t.real)
        im_terms.append(t.imag)
        at = abs(t)
        abs_sum += at
        running += t
        if t == 0:
            break
        if at <= _EPS * 1e-2 * abs(running) and abs(a + j + 1) * abs(x) < abs(b + j + 1) * (j + 2):
            small += 1
            if small >= 3:
                break
        else:
            small = 0
    else:
        raise ConvergenceError(
            f"Kummer series for a={a!r}, b={b!r}, x={x!r} did not converge "
            f"in {max_terms} terms"
        )
    value = complex(math.fsum(re_terms), math.fsum(im_terms))
    scale = abs(value) if value != 0 else 1e-300
    return value, abs_sum / scale


def _u_asymptotic(a: complex, b: complex, log_z: complex, tol: float = 1e-16, max_terms: int = 400):
    """Large-|z| expansion of Tricomi U(a, b, z), z given through its log.

    Returns ``(value, relative_error_estimate)``; the series is cut at the
    smallest term when it starts to diverge.
    """
    inv_z = cmath.exp(-log_z)
    t = 1.0 + 0j
    re_terms = [1.0]
    im_terms = [0.0]
    running = 1.0 + 0j
    err = 0.0
    prev = 1.0
    c = a - b + 1
    for n in range(max_terms):
        t_next = t * (a + n) * (c + n) / (n + 1) * (-inv_z)
        at = abs(t_next)
        if t_next == 0:
            err = 0.0
            break
        if at > prev and n > 0:
            # asymptotic divergence: stop before the smallest term
            err = prev / max(abs(running), 1e-300)
            break
        t = t_next
        re_terms.append(t.real)
        im_terms.append(t.imag)
        running += t
        prev = at
        if at <= tol * abs(running):
            err = at / abs(running)
            break
    else:
        err = prev / max(abs(running), 1e-300)
    series = complex(math.fsum(re_terms), math.fsum(im_terms))
    return cmath.exp(-a * log_z) * series, err


def _kummer_asymptotic(a: complex, b: complex, x: complex):
    # M via two U functions; the sign of the rotation keeps e^{+-i pi} x principal
    # on the negative real axis ph x = +pi, so rotate down to ph 0
    s = 1.0 if x.imag < 0.0 or (x.imag == 0.0 and x.real > 0.0) else -1.0
    log_x = cmath.log(x) if x.imag != 0.0 or x.real > 0 else complex(math.log(abs(x)), math.pi)
    log_rot = log_x + 1j * s * math.pi
    u1, e1 = _u_asymptotic(a, b, log_x)
    u2, e2 = _u_asymptotic(b - a, b, log_rot)
    g_b = cmath.exp(log_gamma(b))
    term1 = cmath.exp(-1j * s * math.pi * a) * u1 * rgamma(b - a)
    term2 = cmath.exp(1j * s * math.pi * (b - a) + x) * u2 * rgamma(a)
    value = g_b * (term1 + term2)
    err = (abs(term1) * e1 + abs(term2) * e2) / max(abs(term1 + term2), 1e-300)
    return value, err


def _kummer_laplace(a: complex, b: float, x: complex):
    """M from two Tricomi U values computed by the Laplace integral; (value, error)."""
    s = 1.0 if x.imag < 0.0 or (x.imag == 0.0 and x.real > 0.0) else -1.0
    x_rot = -x  # e^{s i pi} x, kept on the principal branch
    g_b = cmath.exp(log_gamma(b))
    vals = []
    for nodes in (_LAGUERRE_NODES, 3 * _LAGUERRE_NODES // 2):
        u1 = _tricomi_u_laplace(a, b, x, nodes)
        u2 = _tricomi_u_laplace(b - a, b, x_rot, nodes)
        term1 = cmath.exp(-1j * s * math.pi * a) * u1 * rgamma(b - a)
        term2 = cmath.exp(1j * s * math.pi * (b - a) + x) * u2 * rgamma(a)
        vals.append((g_b * (term1 + term2), abs(term1) + abs(term2)))
    (coarse, _), (fine, size) = vals
    scale = max(abs(fine), 1e-300)
    # quadrature change plus rounding from cancellation between the two terms
    return fine, abs(fine - coarse) / scale + _EPS * size * abs(g_b) / scale


def kummer_m(
    a, b, x, *, threshold: float = KUMMER_THRESHOLD, tol: float = 1e-13, max_error: float = 1e-9
) -> complex:
    """Kummer's confluent hypergeometric function M(a, b, x).

    Each available evaluation carries an error estimate; the first one within
    ``tol`` wins, otherwise the best one is returned if it is within
    ``max_error`` and ConvergenceError is raised if not.
    """
    a, b, x = complex(a), complex(b), complex(x)
    if near_gamma_pole(b):
        raise PoleError(f"M(a, b, x) undefined for b={b!r}", tag="kummer_b", argument=b)
    if x == 0:
        return 1.0 + 0j
    candidates = []
    large = abs(x) >= threshold
    if large:
        value, err = _kummer_asymptotic(a, b, x)
        if err <= tol:
            return value
        candidates.append((err, value))
    value, cond = _kummer_series(a, b, x)
    if cond * _EPS <= tol:
        return value
    candidates.append((cond * _EPS, value))
    if x.real < 0:
        # Kummer transformation removes the alternating-sign cancellation
        v2, c2 = _kummer_series(b - a, b, -x)
        candidates.append((c2 * _EPS, cmath.exp(x) * v2))
    if not large and abs(x) > 2.0:
        candidates.append(_kummer_asymptotic(a, b, x)[::-1])
        if b.imag == 0.0 and min(candidates)[0] > tol:
            candidates.append(_kummer_laplace(a, b.real, x)[::-1])
    err, value = min(candidates, key=lambda c: c[0])
    if err <= max_error:
        return value
    raise ConvergenceError(
        f"M({a!r}, {b!r}, {x!r}): best available error estimate {err:.2e}"
    )


# ------------------------------------------------------------- Whittaker M


def whittaker_m(k, mu, x) -> complex:
    """M_{k,mu}(x) = e^{-x/2} x^{1/2+mu} M(1/2+mu-k, 1+2mu, x)."""
    k, x = complex(k), complex(x)
    mu = float(mu)
    if x == 0:
        if 0.5 + mu > 0:
            return 0j
        raise DomainError("M_{k,mu}(0) diverges for mu <= -1/2")
    m_val = kummer_m(0.5 + mu - k, 1.0 + 2.0 * mu, x)
    return cmath.exp(-0.5 * x) * _cpow(x, 0.5 + mu) * m_val


# ------------------------------------------------------------- Whittaker W


def connection_terms(k, mu, x):
    """The two bracketed terms of the Kummer connection formula for W.

    Returns ``(t_plus, t_minus, condition)`` with
    ``W_{k,mu}(x) = t_plus - t_minus``.  Reciprocal gammas make the terms
    vanish (rather than blow up) when k hits a terminating value.
    """
    k, x = complex(k), complex(x)
    mu = float(mu)
    _check_degenerate(mu)
    pref = cmath.exp(-0.5 * x) * _cpow(x, 0.5 + mu) * math.pi / math.sin(math.pi * (1.0 + 2.0 * mu))
    m1, c1 = _kummer_series(0.5 + mu - k, 1.0 + 2.0 * mu, x)
    m2, c2 = _kummer_series(0.5 - mu - k, 1.0 - 2.0 * mu, x)
    t_plus = pref * m1 * rgamma(0.5 - k - mu) * rgamma(1.0 + 2.0 * mu)
    t_minus = pref * _cpow(x, -2.0 * mu) * m2 * rgamma(0.5 + mu - k) * rgamma(1.0 - 2.0 * mu)
    w = t_plus - t_minus
    scale = abs(w) if w != 0 else 1e-300
    cond = (abs(t_plus) * c1 + abs(t_minus) * c2) / scale
    return t_plus, t_minus, cond


@lru_cache(maxsize=512)
def _laguerre_rule(alpha: float, n: int = _LAGUERRE_NODES):
    return roots_genlaguerre(n, alpha)


def _tricomi_u_laplace(a: complex, b: float, x: complex, nodes: int = _LAGUERRE_NODES) -> complex:
    """U(a, b, x) for |arg x| < pi from the Laplace integral.

    The integral is evaluated at a shifted parameter with Re a0 >= 1 (>= 8
    for complex a) by generalized Gauss-Laguerre quadrature along the ray
    rotated onto the positive axis, then brought back to ``a`` by the
    three-term recurrence in ``a`` run downward, the stable direction.
    """
    floor = 1.0 if a.imag == 0.0 else 8.0
    shift = max(0, math.ceil(floor - a.real))
    a0 = a + shift
    theta = cmath.phase(x)
    r = abs(x)
    rot = cmath.exp(-1j * theta)

    def integral(aa: complex) -> complex:
        u, weights = _laguerre_rule(aa.real - 1.0, nodes)
        c = b - aa - 1.0
        g = np.exp(c * np.log1p(u * rot / r))
        if aa.imag != 0.0:
            g = g * np.exp(1j * aa.imag * np.log(u))
        s = complex(np.sum(weights * g))
        return s * cmath.exp(-aa * (math.log(r) + 1j * theta)) * rgamma(aa)

    u_hi = integral(a0 + 1.0)
    u_cur = integral(a0)
    aa = a0
    for _ in range(shift):
        u_lo = -(b - 2.0 * aa - x) * u_cur - aa * (aa - b + 1.0) * u_hi
        u_hi, u_cur = u_cur, u_lo
        aa -= 1.0
    return u_cur


def whittaker_w_laplace(k, mu, x):
    """W_{k,mu}(x) through the Laplace integral; returns (value, error estimate).

    The estimate is the change between two quadrature orders.
    """
    k, x = complex(k), complex(x)
    mu = float(mu)
    a, b = 0.5 + mu - k, 1.0 + 2.0 * mu
    u = _tricomi_u_laplace(a, b, x)
    u_fine = _tricomi_u_laplace(a, b, x, nodes=3 * _LAGUERRE_NODES // 2)
    err = abs(u - u_fine) / max(abs(u_fine), 1e-300)
    return cmath.exp(-0.5 * x) * _cpow(x, 0.5 + mu) * u_fine, err


def whittaker_w_asymptotic(k, mu, x, tol: float = 1e-15):
    """Large-|x| expansion of W_{k,mu}(x); returns (value, error estimate)."""
    k, x = complex(k), complex(x)
    mu = float(mu)
    log_x = cmath.log(x)
    u, err = _u_asymptotic(0.5 + mu - k, 1.0 + 2.0 * mu, log_x, tol=tol)
    return cmath.exp(-0.5 * x + (0.5 + mu) * log_x) * u, err


def whittaker_w(
    k, mu, x, *, switchover: float = SWITCHOVER, tol: float = 1e-12, max_error: float = 1e-8
) -> complex:
    """Whittaker's W_{k,mu}(x), principal branch, |arg x| < pi.

    Below ``switchover`` the connection formula is used unless its
    cancellation estimate exceeds ``tol``; above it the asymptotic series is
    used unless its smallest term exceeds ``tol``.  In either fallback the
    Laplace-integral value competes and the smaller error estimate wins.
    """
    k, x = complex(k), complex(x)
    mu = float(mu)
    _check_degenerate(mu)
    if x == 0:
        raise DomainError("W_{k,mu}(x) is singular at x = 0")
    if x.real < 0 and x.imag == 0:
        raise DomainError("x on the branch cut (negative real axis)")
    if abs(x) >= switchover:
        value, err = whittaker_w_asymptotic(k, mu, x)
    else:
        t_plus, t_minus, cond = connection_terms(k, mu, x)
        value, err = t_plus - t_minus, cond * _EPS
    if err <= tol:
        return value
    lap_value, lap_err = whittaker_w_laplace(k, mu, x)
    if lap_err < err:
        value, err = lap_value, lap_err
    if err <= max_error:
        return value
    raise ConvergenceError(
        f"W_{{{k},{mu}}}({x}): best available error estimate {err:.2e}"
    )
