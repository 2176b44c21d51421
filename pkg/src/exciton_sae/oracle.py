"""Independent verification machinery.

Nothing here touches the gamma, Kummer or Whittaker code in ``specfun``:
bound states are recomputed by shooting with a Frobenius power series at the
inner boundary and an asymptotic ODE series at the outer one, and the
extended-precision evaluators use their own series in mpmath arithmetic.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from scipy import optimize
from scipy.integrate import solve_ivp

from .errors import (
    AsymptoticsError,
    ConditioningError,
    ConvergenceError,
    DegenerateIndexError,
    DomainError,
    StepSizeError,
)
from .model import PhysicalParams

ODE_RTOL = 1e-10
ODE_ATOL = 1e-14
SCAN_RTOL = 1e-6
Z_MAX_DEFAULT = 40.0
MAX_DIGITS = 60
# growth allowed per integration chunk before the state is rescaled
_CHUNK_LOG_GROWTH = 40.0


# --------------------------------------------------------------------------
# Frobenius series about w = 0
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FrobeniusSeries:
    """w^exponent * sum_j coefficients[j] w^j, a solution of the radial equation."""

    exponent: float
    coefficients: Tuple[complex, ...]
    radius_hint: float

    def __call__(self, w: float):
        return self.evaluate(w)[0]

    def evaluate(self, w: float):
        """(value, derivative) at w > 0."""
        c = np.asarray(self.coefficients)
        j = np.arange(len(c))
        powers = w ** j.astype(float)
        s = self.exponent
        series = np.sum(c * powers)
        dseries = np.sum(c[1:] * j[1:] * powers[:-1]) if len(c) > 1 else 0.0
        ws = w ** s
        return ws * series, ws * (s * series / w + dseries)


def _frobenius_coefficients(s: float, kappa: float, energy, order: int):
    c = [1.0 + 0j, 0j]
    c[1] = -(1.0 / kappa) / (2.0 * s)
    for j in range(2, order + 1):
        c.append(-(c[j - 1] / kappa + energy * c[j - 2]) / (j * (2.0 * s + j - 1.0)))
    return c[: order + 1]


def frobenius_basis(params: PhysicalParams, energy, order: int = 80):
    """The two power-series solutions with exponents 1/2 +- m.

    Coefficients obey c_j = -(c_{j-1}/kappa + E c_{j-2}) / (j (2s + j - 1)).
    """
    if order < 2:
        raise DomainError("order must be >= 2")
    m = params.m
    if abs(2 * m - round(2 * m)) < 1e-6:
        raise DegenerateIndexError(f"2m = {2 * m!r} is (nearly) an integer")
    out = []
    for s in (0.5 + m, 0.5 - m):
        c = _frobenius_coefficients(s, params.kappa, complex(energy), order)
        tail = max(abs(c[-1]), abs(c[-2]), 1e-300)
        radius = (1e-16 / tail) ** (1.0 / order)
        if all(abs(x.imag) == 0 for x in c):
            c = [x.real for x in c]
        out.append(FrobeniusSeries(s, tuple(c), radius))
    return out[0], out[1]


def frobenius_residual(series: FrobeniusSeries, params: PhysicalParams, energy) -> float:
    """Largest relative defect of the recurrence over the stored coefficients."""
    s, c = series.exponent, series.coefficients
    worst = 0.0
    for j in range(1, len(c)):
        lhs = j * (2 * s + j - 1) * c[j]
        rhs = -(c[j - 1] / params.kappa + (energy * c[j - 2] if j >= 2 else 0.0))
        scale = max(abs(lhs), abs(rhs), 1e-300)
        worst = max(worst, abs(lhs - rhs) / scale)
    return worst


# --------------------------------------------------------------------------
# ODE integration
# --------------------------------------------------------------------------

@dataclass
class OdeSamples:
    z: np.ndarray
    y: np.ndarray
    dy: np.ndarray
    sol: object

    def __call__(self, z):
        out = self.sol(z)
        return out[0], out[1]


def _rhs(params: PhysicalParams, energy):
    c = params.bigA * params.a / params.kappa

    def f(z, y):
        w = params.a + z
        q = 1.0 / (params.kappa * w) - c / (w * w) + energy
        return [y[1], -q * y[0]]

    return f


def integrate_ode(
    params: PhysicalParams,
    energy,
    z_span: Tuple[float, float],
    direction: str,
    init: Tuple[complex, complex],
    rtol: float = ODE_RTOL,
    atol: float = ODE_ATOL,
    t_eval: Optional[Sequence[float]] = None,
) -> OdeSamples:
    """Adaptive DOP853 integration of chi'' = (V - E) chi along z_span."""
    z0, z1 = map(float, z_span)
    if direction == "inward" and not z0 > z1:
        raise DomainError("inward integration needs z_span = (z_far, z_near)")
    if direction == "outward" and not z0 < z1:
        raise DomainError("outward integration needs z_span = (z_near, z_far)")
    if direction not in ("inward", "outward"):
        raise DomainError(f"direction must be inward or outward, got {direction!r}")
    if min(z0, z1) < 0:
        raise DomainError("z must stay >= 0")
    dtype = complex if isinstance(energy, complex) or any(isinstance(v, complex) for v in init) else float
    y0 = np.array(init, dtype=dtype)
    res = solve_ivp(
        _rhs(params, energy), (z0, z1), y0, method="DOP853",
        rtol=rtol, atol=atol, dense_output=True, t_eval=t_eval,
    )
    if res.status != 0:
        raise StepSizeError(f"ODE integration failed at E={energy}: {res.message}")
    return OdeSamples(res.t, res.y[0], res.y[1], res.sol)


def _integrate_inward_scaled(params, energy, z_far, init, rtol=ODE_RTOL):
    """Inward integration to z = 0 with rescaling so a growing solution cannot overflow.

    Returns the state at z = 0 up to a positive factor.
    """
    rate = abs(cmath.sqrt(-complex(energy)).real) + 1e-3
    chunk = max(_CHUNK_LOG_GROWTH / rate, 1.0)
    y = np.array(init, dtype=complex if isinstance(energy, complex) else float)
    z = z_far
    while z > 0:
        z_next = max(z - chunk, 0.0)
        out = integrate_ode(params, energy, (z, z_next), "inward", tuple(y), rtol=rtol, atol=1e-300)
        y = np.array([out.y[-1], out.dy[-1]])
        y = y / max(abs(y[0]), abs(y[1]), 1e-300)
        z = z_next
    return y


# --------------------------------------------------------------------------
# Asymptotic series at large w
# --------------------------------------------------------------------------

def _asymptotic_sum(params: PhysicalParams, energy, w: float, lam: complex, max_terms: int = 200):
    lam = complex(lam)
    if abs(lam * lam + energy) > 1e-12 * max(1.0, abs(energy)):
        raise DomainError("lam^2 must equal -E")
    sig = -1.0 / (2.0 * lam * params.kappa)
    c = params.m ** 2 - 0.25
    d = 1.0 + 0j
    g, dg = d, 0j
    last = math.inf
    err = 0.0
    for j in range(1, max_terms):
        d = ((sig - j + 1) * (sig - j) - c) * d / (2.0 * lam * j)
        term = d * w ** (-j)
        if abs(term) >= last:
            break
        g += term
        dg += -j * d * w ** (-j - 1)
        last = abs(term)
        err = last
        if last < 1e-17 * abs(g):
            break
    else:
        raise AsymptoticsError(f"asymptotic series at w={w} not converged")
    return g, dg, sig, err / max(abs(g), 1e-300)


def asymptotic_solution(params: PhysicalParams, energy, w: float, lam: complex, max_terms: int = 200):
    """exp(lam w) w^sigma sum_j d_j w^-j with lam^2 = -E, sigma = -1/(2 lam kappa).

    Returns (value, derivative, error estimate); the series is truncated at
    its smallest term.
    """
    g, dg, sig, err = _asymptotic_sum(params, energy, w, lam, max_terms)
    pref = cmath.exp(lam * w + sig * cmath.log(w))
    return pref * g, pref * ((lam + sig / w) * g + dg), err


def asymptotic_log_derivative(params: PhysicalParams, energy, w: float, lam: complex):
    """chi'/chi of the asymptotic solution, free of the exponential prefactor."""
    g, dg, sig, err = _asymptotic_sum(params, energy, w, lam)
    return complex(lam) + sig / w + dg / g, err


# --------------------------------------------------------------------------
# Decomposition and the Sigma-domain ratio
# --------------------------------------------------------------------------

def decompose(params: PhysicalParams, energy, state, z: float = 0.0, order: int = 80):
    """Coefficients (d_+, d_-) of a solution in the Frobenius basis from its (value, derivative) at z."""
    up, um = frobenius_basis(params, energy, order)
    w = params.a + z
    if w > 0.8 * min(up.radius_hint, um.radius_hint) and order < 400:
        return decompose(params, energy, state, z, order * 2)
    vp, dvp = up.evaluate(w)
    vm, dvm = um.evaluate(w)
    # the Wronskian is exactly -2m; the numerical one only measures rounding
    wr = -2.0 * params.m
    spread = abs(vp * dvm) + abs(dvp * vm)
    defect = abs(vp * dvm - dvp * vm - wr)
    if defect > 1e-8 * max(spread, 2.0 * params.m):
        raise ConditioningError(f"Frobenius Wronskian off by {defect:.3g}", condition=defect / (2 * params.m))
    y, dy = state
    d_plus = (y * dvm - dy * vm) / wr
    d_minus = (vp * dy - dvp * y) / wr
    return d_plus, d_minus


def _scale_power(kappa_alpha: complex, p: float) -> complex:
    return cmath.exp(p * cmath.log(kappa_alpha))


def deficiency_coefficients(params: PhysicalParams, mode: str = "paper", z_max: float = Z_MAX_DEFAULT):
    """(A_+, -B_+) of phi_+ = W_{alpha_+,m}((a+z)/(kappa alpha_+)) from the ODE.

    phi_+ solves the equation at E = +i; its decaying normalization is
    fixed by the large-w behaviour x^{alpha_+} e^{-x/2}.
    """
    kappa = params.kappa
    alpha_p = cmath.exp(0.25j * math.pi) / (2.0 * kappa)
    energy = 1j
    lam = -cmath.sqrt(-energy)
    w_far = params.a + z_max
    val, der, err = asymptotic_solution(params, energy, w_far, lam)
    if err > 1e-13:
        raise AsymptoticsError(f"asymptotic start at w={w_far} only good to {err:.2e}")
    norm = cmath.exp(-alpha_p * cmath.log(kappa * alpha_p))
    out = integrate_ode(params, energy, (z_max, 0.0), "inward", (val * norm, der * norm), rtol=1e-12, atol=1e-300)
    d_plus, d_minus = decompose(params, energy, (out.y[-1], out.dy[-1]))
    if mode == "paper":
        d_plus *= _scale_power(kappa * alpha_p, 0.5 + params.m)
        d_minus *= _scale_power(kappa * alpha_p, 0.5 - params.m)
    elif mode != "rigorous":
        raise DomainError(f"unknown mode {mode!r}")
    return d_plus, d_minus


def domain_ratio_pair(params: PhysicalParams, sigma: float, mode: str = "paper", coeffs=None):
    """Real (numerator, denominator) of the u_+/u_- ratio fixed by phi_+ + e^{i Sigma} phi_-."""
    a_plus, mb_plus = coeffs if coeffs is not None else deficiency_coefficients(params, mode)
    half = cmath.exp(-0.5j * sigma)
    # phi_- = conj(phi_+): rotating by e^{-i Sigma/2} leaves 2 Re(c e^{-i Sigma/2})
    return 2.0 * (a_plus * half).real, 2.0 * (mb_plus * half).real


# --------------------------------------------------------------------------
# Shooting for bound states
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ShootingResult:
    energy: float
    boundary_ratio: float
    decay_defect: float
    bracket: Tuple[float, float] = (math.nan, math.nan)
    branch: int = 0
    z_max: float = Z_MAX_DEFAULT


def _z_max_for(params: PhysicalParams, alpha: float, z_max: Optional[float]) -> float:
    if z_max is not None:
        return z_max
    return max(Z_MAX_DEFAULT, 40.0 * params.kappa * alpha)


class _Shooter:
    def __init__(self, params: PhysicalParams, sigma: float, mode: str, z_max: Optional[float] = None):
        self.params = params
        self.sigma = float(sigma)
        self.mode = mode
        self.z_max = z_max
        self.num, self.den = domain_ratio_pair(params, self.sigma, mode)
        self.calls = 0

    def coefficients(self, energy: float, z_max: Optional[float] = None, rtol: float = ODE_RTOL):
        p = self.params
        alpha = 0.5 / (p.kappa * math.sqrt(-energy))
        zf = z_max if z_max is not None else _z_max_for(p, alpha, self.z_max)
        lam = -math.sqrt(-energy)
        logder, err = asymptotic_log_derivative(p, energy, p.a + zf, lam)
        if err > 1e-10:
            raise AsymptoticsError(f"asymptotic start at z={zf} only good to {err:.2e}")
        init = (1.0, logder.real)
        y = _integrate_inward_scaled(p, energy, zf, init, rtol=rtol)
        self.calls += 1
        d_plus, d_minus = decompose(p, energy, (y[0], y[1]))
        d_plus, d_minus = float(np.real(d_plus)), float(np.real(d_minus))
        if self.mode == "paper":
            d_plus *= (p.kappa * alpha) ** (0.5 + p.m)
            d_minus *= (p.kappa * alpha) ** (0.5 - p.m)
        return d_plus, d_minus

    def mismatch(self, energy: float, z_max: Optional[float] = None, rtol: float = ODE_RTOL) -> float:
        d_plus, d_minus = self.coefficients(energy, z_max, rtol)
        scale = math.hypot(d_plus, d_minus) * math.hypot(self.num, self.den)
        return (d_plus * self.den - d_minus * self.num) / scale


def _energy(alpha: float, kappa: float) -> float:
    return -1.0 / (4.0 * kappa * kappa * alpha * alpha)


def _alpha_bracket(m: float, branch: int, alpha_floor: float) -> Tuple[float, float]:
    p0 = 0.5 + m
    if branch == 0:
        return alpha_floor, p0
    return p0 + branch - 1, p0 + branch


def _sign_brackets(grid, values):
    out = []
    for i in range(len(grid) - 1):
        if values[i] == 0.0:
            out.append((grid[i], grid[i]))
        elif values[i] * values[i + 1] < 0:
            out.append((grid[i], grid[i + 1]))
    return out


def _find_roots(shooter: _Shooter, branch: int, tol: float, samples: int, alpha_floor: float):
    p = shooter.params
    lo, hi = _alpha_bracket(p.m, branch, alpha_floor)
    guard = 1e-6
    grid = np.linspace(lo + guard, hi - guard, samples)
    if branch == 0:
        grid = np.unique(np.concatenate([np.geomspace(lo, hi / 2, samples // 2), grid]))
    energies = [_energy(a, p.kappa) for a in grid]
    # only signs are needed here, so the scan runs at a looser tolerance; the
    # bracket ends are re-checked at full accuracy before refinement
    coarse = [shooter.mismatch(e, rtol=SCAN_RTOL) for e in energies]
    brackets = _sign_brackets(grid, coarse)
    confirmed = []
    for a_lo, a_hi in brackets:
        e_lo, e_hi = _energy(a_lo, p.kappa), _energy(a_hi, p.kappa)
        g_lo, g_hi = shooter.mismatch(e_lo), shooter.mismatch(e_hi)
        if e_lo != e_hi and g_lo * g_hi > 0:
            confirmed = None
            break
        confirmed.append((a_lo, a_hi))
    if confirmed is None:
        confirmed = _sign_brackets(grid, [shooter.mismatch(e) for e in energies])
    out = []
    for a_lo, a_hi in confirmed:
        e_lo, e_hi = _energy(a_lo, p.kappa), _energy(a_hi, p.kappa)
        if e_lo == e_hi:
            out.append((e_lo, e_lo, e_lo))
            continue
        e, info = optimize.brentq(
            shooter.mismatch, e_lo, e_hi, xtol=tol / 4, rtol=4 * np.finfo(float).eps,
            maxiter=200, full_output=True,
        )
        if not info.converged:
            raise ConvergenceError(f"shooting on branch {branch} did not converge")
        out.append((e, e - tol / 4, e + tol / 4))
    return out


def shoot_eigenvalue(
    params: PhysicalParams,
    sigma: float,
    branch: int,
    tol: float = 1e-10,
    mode: str = "paper",
    which: int = 0,
    z_max: Optional[float] = None,
    samples: int = 24,
    alpha_floor: float = 0.02,
) -> ShootingResult:
    """Energy of the ``which``-th root inside the given branch interval.

    The root is refined by a bracketing (Brent) iteration and re-checked with
    the outer cutoff doubled until the energy moves by less than tol/10.
    """
    shooter = _Shooter(params, sigma, mode, z_max)
    roots = _find_roots(shooter, branch, tol, samples, alpha_floor)
    if which >= len(roots):
        raise ConvergenceError(f"branch {branch} holds {len(roots)} roots, asked for #{which}")
    return _refine_cutoff(shooter, roots[which], tol, branch)


def _refine_cutoff(shooter: _Shooter, root, tol: float, branch: int) -> ShootingResult:
    p = shooter.params
    e, e_lo, e_hi = root
    alpha = 0.5 / (p.kappa * math.sqrt(-e))
    zf = _z_max_for(p, alpha, shooter.z_max)
    for _ in range(6):
        zf2 = 2.0 * zf
        width = max(1e3 * tol, 1e-9 * abs(e))
        a, b = e - width, e + width

        def g(x):
            return shooter.mismatch(x, zf2)

        ga, gb = g(a), g(b)
        while ga * gb > 0:
            width *= 4
            a, b = e - width, min(e + width, -1e-300)
            ga, gb = g(a), g(b)
        e2 = optimize.brentq(g, a, b, xtol=tol / 4, rtol=4 * np.finfo(float).eps, maxiter=200)
        shift = abs(e2 - e)
        e, zf = e2, zf2
        if shift < tol / 10:
            break
    else:
        raise ConvergenceError(f"branch {branch}: energy still moving by {shift:.3g} after cutoff doubling")
    d_plus, d_minus = shooter.coefficients(e, zf)
    ratio = d_plus / d_minus if d_minus != 0 else math.inf
    defect = abs(shooter.mismatch(e, zf))
    return ShootingResult(e, ratio, defect, (e - tol / 4, e + tol / 4), branch, zf)


def shoot_spectrum(
    params: PhysicalParams,
    sigma: float,
    count: int,
    tol: float = 1e-10,
    mode: str = "paper",
    samples: int = 24,
    alpha_floor: float = 0.02,
) -> List[ShootingResult]:
    """The lowest ``count`` shooting eigenvalues, scanning branch intervals upward."""
    shooter = _Shooter(params, sigma, mode)
    out: List[ShootingResult] = []
    branch = 0
    while len(out) < count:
        for root in _find_roots(shooter, branch, tol, samples, alpha_floor):
            out.append(_refine_cutoff(shooter, root, tol, branch))
        branch += 1
        if branch > count + 4 * params.m + 10:
            raise ConvergenceError("ran out of branch intervals while shooting")
    return out[:count]


# --------------------------------------------------------------------------
# Scattering by outward integration and wave splitting
# --------------------------------------------------------------------------

def scattering_s_matrix(
    params: PhysicalParams,
    sigma: float,
    energy: float,
    mode: str = "paper",
    z_far: float = 400.0,
    coeffs=None,
) -> complex:
    """S = (outgoing)/(incoming) referenced to e^{+-i(kz + alpha~ ln 2kz)}.

    The matched solution is built from Frobenius data at z = 0, integrated
    outward and split at z_far with the asymptotic series of the two waves.
    """
    if not energy > 0:
        raise DomainError("scattering energy must be positive")
    p = params
    k = math.sqrt(energy)
    at = 0.5 / (p.kappa * k)
    num, den = domain_ratio_pair(p, sigma, mode, coeffs)
    if mode == "paper":
        num *= (p.kappa * at) ** (-2.0 * p.m)
    up, um = frobenius_basis(p, energy)
    vp, dvp = up.evaluate(p.a)
    vm, dvm = um.evaluate(p.a)
    y0 = (num * vp + den * vm, num * dvp + den * dvm)
    scale = max(abs(y0[0]), abs(y0[1]))
    y0 = (y0[0] / scale, y0[1] / scale)
    out = integrate_ode(p, energy, (0.0, z_far), "outward", y0, rtol=1e-12, atol=1e-14)
    y, dy = out.y[-1], out.dy[-1]
    w = p.a + z_far
    o, do, err_o = asymptotic_solution(p, energy, w, 1j * k)
    i_, di, err_i = asymptotic_solution(p, energy, w, -1j * k)
    if max(err_o, err_i) > 1e-10:
        raise AsymptoticsError(f"wave splitting at z={z_far} only good to {max(err_o, err_i):.2e}")
    # the series carry w^{+-i alpha~}; reference waves use (2kw)^{+-i alpha~}
    ref = cmath.exp(1j * at * math.log(2.0 * k))
    o, do = o * ref, do * ref
    i_, di = i_ / ref, di / ref
    wr = o * di - do * i_
    c_out = (y * di - dy * i_) / wr
    c_in = (o * dy - do * y) / wr
    s_w = c_out / c_in
    return s_w * cmath.exp(2j * k * p.a)


# --------------------------------------------------------------------------
# Extended-precision series
# --------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _bernoulli_even(count: int) -> Tuple[Fraction, ...]:
    """B_2, B_4, ..., B_{2 count} from the Akiyama-Tanigawa recurrence."""
    n_max = 2 * count
    out = []
    a = [Fraction(0)] * (n_max + 1)
    for n in range(n_max + 1):
        a[n] = Fraction(1, n + 1)
        for j in range(n, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        if n >= 2 and n % 2 == 0:
            out.append(a[0])
    return tuple(out)


def _hp_log_gamma(w, digits: int):
    """log Gamma by upward shift and the Stirling series (Re w >= 1/2)."""
    mp = mpmath.mp
    eps = mpmath.mpf(10) ** (-digits - 5)
    r = mpmath.mpf(digits + 10)
    shift = 0
    log_prod = mpmath.mpc(0)
    while abs(w + shift) < r or (w + shift).real < r / 2:
        # summing principal logs keeps the principal branch of log Gamma
        log_prod += mpmath.log(w + shift)
        shift += 1
    z = w + shift
    total = (z - mpmath.mpf(1) / 2) * mpmath.log(z) - z + mpmath.log(2 * mp.pi) / 2
    bern = _bernoulli_even(4 * digits)
    for j, b in enumerate(bern, start=1):
        term = mpmath.mpf(b.numerator) / b.denominator / (2 * j * (2 * j - 1) * z ** (2 * j - 1))
        total += term
        if abs(term) < eps:
            break
    else:
        raise ConvergenceError("Stirling series did not converge")
    return total - log_prod


def _hp_gamma(w, digits: int):
    mp = mpmath.mp
    if w.imag == 0 and w.real <= 0 and w.real == int(w.real):
        raise DomainError("gamma pole")
    if w.real < 0.5:
        return mp.pi / (mpmath.sin(mp.pi * w) * mpmath.exp(_hp_log_gamma(1 - w, digits)))
    return mpmath.exp(_hp_log_gamma(w, digits))


def _hp_rgamma(w, digits: int):
    if w.imag == 0 and w.real <= 0 and w.real == int(w.real):
        return mpmath.mpf(0)
    return 1 / _hp_gamma(w, digits)


def _hp_whittaker_m(k, mu, x, digits: int):
    half = mpmath.mpf(1) / 2
    return mpmath.exp(-x / 2) * mpmath.power(x, half + mu) * _hp_kummer(half + mu - k, 1 + 2 * mu, x, digits)


def _hp_kummer(a, b, x, digits: int, max_terms: int = 200000):
    eps = mpmath.mpf(10) ** (-digits - 5)
    term = mpmath.mpc(1)
    total = mpmath.mpc(1)
    k = 0
    while True:
        term *= (a + k) / ((b + k) * (k + 1)) * x
        total += term
        k += 1
        if abs(term) < eps * abs(total) and k > abs(x):
            return total
        if k > max_terms:
            raise ConvergenceError("Kummer series budget exceeded")


def highprec_eval(function_id: str, args: Sequence, digits: int = 30):
    """Evaluate gamma-type or Kummer functions to ``digits`` significant digits.

    function_id: 'gamma', 'loggamma', 'gamma_polar', 'kummer_m', 'whittaker_m'
    or 'whittaker_w' (the last through the M-connection formula, 2 mu not an
    integer).
    Returns mpmath numbers (a tuple for gamma_polar).
    """
    if not 1 <= digits <= MAX_DIGITS:
        raise DomainError(f"digits must lie in [1, {MAX_DIGITS}]")
    args = [mpmath.mpmathify(v) for v in args]
    # guard digits for cancellation in the alternating Kummer series
    extra = 15
    if function_id in ("kummer_m", "whittaker_m", "whittaker_w"):
        extra += int(2 * abs(args[-1]) / math.log(10)) + 5
    with mpmath.workdps(digits + extra):
        args = [mpmath.mpc(v) for v in args]
        if function_id == "gamma":
            res = _hp_gamma(args[0], digits + 5)
        elif function_id == "loggamma":
            w = args[0]
            if w.real < 0.5:
                res = mpmath.log(_hp_gamma(w, digits + 5))
            else:
                res = _hp_log_gamma(w, digits + 5)
        elif function_id == "gamma_polar":
            g = _hp_gamma(args[0], digits + 5)
            res = (abs(g), -mpmath.arg(g))
        elif function_id == "kummer_m":
            res = _hp_kummer(*args, digits + 5)
        elif function_id == "whittaker_m":
            res = _hp_whittaker_m(*args, digits + 5)
        elif function_id == "whittaker_w":
            k, mu, x = args
            if abs(2 * mu.real - round(2 * mu.real)) < 1e-6:
                raise DegenerateIndexError("2 mu is an integer")
            half = mpmath.mpf(1) / 2
            d = digits + 5
            res = (_hp_gamma(-2 * mu, d) * _hp_rgamma(half - mu - k, d) * _hp_whittaker_m(k, mu, x, d)
                   + _hp_gamma(2 * mu, d) * _hp_rgamma(half + mu - k, d) * _hp_whittaker_m(k, -mu, x, d))
        else:
            raise DomainError(f"unknown function id {function_id!r}")
    # values keep the working precision they were computed at
    return res
