"""Self-adjoint-extension data for the effective exciton Hamiltonian.

The deficiency solutions phi_+- = W_{alpha_+-, m}((a+z)/(kappa alpha_+-)) are
expanded in the two Frobenius solutions

    u_+-(x) = e^{-x/2} x^{1/2 +- m} M(1/2 +- m - alpha, 1 +- 2m, x)

and a self-adjoint extension with angle Sigma fixes the ratio of the u_+ and
u_- coefficients of every domain element.  Two coefficient conventions exist:

``paper``
    coefficients of u_+- in the Whittaker argument x (the connection formula
    taken verbatim), so the eigenvalue condition reads f(alpha) = RHS(Sigma).
``rigorous``
    coefficients of (a+z)^{1/2 +- m}, i.e. each x-coefficient times
    (kappa alpha)^{-(1/2 +- m)}; the eigenvalue condition picks up a factor
    (kappa alpha)^{-2m} on the left and rescaled polar data on the right.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.special import gammaln, gammasgn

from . import specfun
from .errors import DegenerateIndexError, DomainError, PoleError
from .model import PhysicalParams

MODES = ("paper", "rigorous")
# |cos| below this is treated as an exact zero of the boundary ratio
RHS_TOL = 1e-12


def _check_mode(mode: str) -> str:
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


@dataclass(frozen=True)
class ExtensionAngle:
    """Self-adjoint extension parameter Sigma, stored reduced to [0, 2 pi)."""

    sigma: float

    def __post_init__(self):
        s = float(self.sigma)
        if not math.isfinite(s):
            raise DomainError(f"Sigma must be finite, got {self.sigma!r}")
        s = math.fmod(s, 2.0 * math.pi)
        if s < 0:
            s += 2.0 * math.pi
        if s >= 2.0 * math.pi:
            s = 0.0
        object.__setattr__(self, "sigma", s)

    def __float__(self):
        return self.sigma


@dataclass(frozen=True)
class ConnectionPair:
    """Coefficients of u_+ and u_- in W_{alpha,m} (the pair (A, -B))."""

    coeff_plus_power: complex
    coeff_minus_power: complex


@dataclass(frozen=True)
class DeficiencyData:
    kappa: float
    m: float
    mode: str
    alpha_plus: complex
    alpha_minus: complex
    chi1: float
    theta1: float
    chi2: float
    theta2: float
    # None when 2m is an integer: the connection formula is singular there
    # although the polar data (and hence the eigenvalue condition) are not.
    coeff_A_plus: Optional[complex] = None
    coeff_B_plus: Optional[complex] = None
    coeff_A_minus: Optional[complex] = None
    coeff_B_minus: Optional[complex] = None


def deficiency_alpha(kappa: float, sign: int = +1) -> complex:
    """alpha_+- = +-(1/(2 kappa)) i e^{-+ i pi/4} = (1/(2 kappa)) e^{+- i pi/4}."""
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    return cmath.exp(sign * 0.25j * math.pi) / (2.0 * kappa)


def connection_coefficients(alpha, m: float) -> ConnectionPair:
    """Coefficients (A, -B) of u_+ and u_- in W_{alpha,m}(x).

    A = pi / [sin pi(1+2m) Gamma(1/2-alpha-m) Gamma(1+2m)]
    B = pi / [sin pi(1+2m) Gamma(1/2-alpha+m) Gamma(1-2m)]
    """
    alpha = complex(alpha)
    m = float(m)
    if specfun.is_degenerate_index(m):
        raise DegenerateIndexError(f"2m = {2 * m!r} is (nearly) an integer")
    arg_a = 0.5 - alpha - m
    arg_b = 0.5 - alpha + m
    if specfun.near_gamma_pole(arg_a):
        raise PoleError(
            f"A-coefficient: Gamma(1/2-alpha-m) has a pole at alpha={alpha!r} "
            "(a zero of f, closed-form RHS=0 spectrum)",
            tag="A", argument=arg_a,
        )
    if specfun.near_gamma_pole(arg_b):
        raise PoleError(
            f"B-coefficient: Gamma(1/2-alpha+m) has a pole at alpha={alpha!r} "
            "(a pole of f, closed-form RHS=infinity spectrum)",
            tag="B", argument=arg_b,
        )
    s = math.sin(math.pi * (1.0 + 2.0 * m))
    big_a = math.pi / s * cmath.exp(-specfun.log_gamma(arg_a) - specfun.log_gamma(1.0 + 2.0 * m))
    big_b = math.pi / s * cmath.exp(-specfun.log_gamma(arg_b) - specfun.log_gamma(1.0 - 2.0 * m))
    return ConnectionPair(big_a, -big_b)


def _polar(log_value: complex):
    return math.exp(log_value.real), specfun._principal(-log_value.imag)


def deficiency_data(params: PhysicalParams, mode: str = "paper", strict: bool = True) -> DeficiencyData:
    """Build alpha_+-, the connection coefficients and the polar data.

    With ``strict=False`` a degenerate index (integer 2m) leaves the
    connection coefficients as None instead of raising.
    """
    _check_mode(mode)
    m = params.m
    kappa = params.kappa
    ap = deficiency_alpha(kappa, +1)
    am = ap.conjugate()
    log_g1 = specfun.log_gamma(0.5 - m - ap)
    log_g2 = specfun.log_gamma(0.5 + m - ap)
    if mode == "rigorous":
        log_scale = cmath.log(kappa * ap)
        log_g1 += (0.5 + m) * log_scale
        log_g2 += (0.5 - m) * log_scale
    chi1, theta1 = _polar(log_g1)
    chi2, theta2 = _polar(log_g2)
    coeffs = {}
    if not specfun.is_degenerate_index(m):
        plus = connection_coefficients(ap, m)
        a_plus, b_plus = plus.coeff_plus_power, -plus.coeff_minus_power
        if mode == "rigorous":
            a_plus *= specfun._cpow(kappa * ap, -(0.5 + m))
            b_plus *= specfun._cpow(kappa * ap, -(0.5 - m))
        coeffs = dict(
            coeff_A_plus=a_plus,
            coeff_B_plus=b_plus,
            coeff_A_minus=a_plus.conjugate(),
            coeff_B_minus=b_plus.conjugate(),
        )
    elif strict:
        raise DegenerateIndexError(f"2m = {2 * m!r} is (nearly) an integer")
    return DeficiencyData(
        kappa=kappa, m=m, mode=mode, alpha_plus=ap, alpha_minus=am,
        chi1=chi1, theta1=theta1, chi2=chi2, theta2=theta2, **coeffs,
    )


def deficiency_solution(params: PhysicalParams, sign: int, z: float, mode: str = "paper") -> complex:
    """phi_+-(z) = W_{alpha_+-, m}((a+z)/(kappa alpha_+-))."""
    del mode  # the function itself does not depend on the coefficient convention
    if z < 0:
        raise DomainError(f"z must be >= 0, got {z}")
    alpha = deficiency_alpha(params.kappa, sign)
    x = (params.a + z) / (params.kappa * alpha)
    return specfun.whittaker_w(alpha, params.m, x)


def _sigma_value(sigma: Union[ExtensionAngle, float]) -> float:
    return sigma.sigma if isinstance(sigma, ExtensionAngle) else float(sigma)


def boundary_pair(data: DeficiencyData, sigma: Union[ExtensionAngle, float]):
    """Numerator and denominator of RHS(Sigma) as finite reals."""
    s = _sigma_value(sigma)
    return (
        data.chi2 * math.cos(data.theta1 - 0.5 * s),
        data.chi1 * math.cos(data.theta2 - 0.5 * s),
    )


def boundary_rhs(data: DeficiencyData, sigma: Union[ExtensionAngle, float]) -> float:
    """Right-hand side of the eigenvalue condition.

    RHS = chi2 cos(theta1 - Sigma/2) / (chi1 cos(theta2 - Sigma/2)), which is
    what matching the u_+ / u_- coefficients of W_{alpha,m} against those of
    phi_+ + e^{i Sigma} phi_- gives.  Returns 0.0 or a signed infinity when the
    corresponding cosine is within RHS_TOL of zero.
    """
    s = _sigma_value(sigma)
    c1 = math.cos(data.theta1 - 0.5 * s)
    c2 = math.cos(data.theta2 - 0.5 * s)
    if abs(c2) < RHS_TOL:
        return math.copysign(math.inf, c1 * c2) if c2 != 0 else math.inf
    if abs(c1) < RHS_TOL:
        return 0.0
    return data.chi2 * c1 / (data.chi1 * c2)


def sigma_rhs_zero(data: DeficiencyData) -> ExtensionAngle:
    """The extension whose RHS vanishes (closed-form spectrum at the zeros of f)."""
    return ExtensionAngle(2.0 * data.theta1 + math.pi)


def sigma_rhs_infinity(data: DeficiencyData) -> ExtensionAngle:
    """The extension whose RHS diverges (closed-form spectrum at the poles of f)."""
    return ExtensionAngle(2.0 * data.theta2 + math.pi)


def domain_coefficients(data: DeficiencyData, sigma: Union[ExtensionAngle, float]):
    """u_+ and u_- coefficients of phi_+ + e^{i Sigma} phi_-.

    Both share the phase e^{i Sigma/2}; their ratio is real.
    """
    if data.coeff_A_plus is None:
        raise DegenerateIndexError("connection coefficients unavailable for integer 2m")
    phase = cmath.exp(1j * _sigma_value(sigma))
    return (
        data.coeff_A_plus + phase * data.coeff_A_minus,
        -(data.coeff_B_plus + phase * data.coeff_B_minus),
    )


def f_of_alpha(alpha: float, m: float) -> float:
    """f = Gamma(1/2+m-alpha) / Gamma(1/2-m-alpha) for real alpha > 0.

    Zeros at alpha = 1/2-m+n return 0.0, poles at alpha = 1/2+m+n return inf.
    """
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    p = 0.5 + m - alpha
    q = 0.5 - m - alpha
    if specfun.near_gamma_pole(p):
        return math.inf
    if specfun.near_gamma_pole(q):
        return 0.0
    return float(gammasgn(p) * gammasgn(q) * math.exp(gammaln(p) - gammaln(q)))


def f_values(alpha: np.ndarray, m: float) -> np.ndarray:
    """Vectorised f_of_alpha without the pole/zero snapping."""
    alpha = np.asarray(alpha, dtype=float)
    p = 0.5 + m - alpha
    q = 0.5 - m - alpha
    return gammasgn(p) * gammasgn(q) * np.exp(gammaln(p) - gammaln(q))


def spectral_scale(alpha, kappa: float, m: float, mode: str):
    """Factor multiplying f on the left of the eigenvalue condition."""
    if _check_mode(mode) == "paper":
        return np.ones_like(np.asarray(alpha, dtype=float)) if np.ndim(alpha) else 1.0
    return (kappa * np.asarray(alpha, dtype=float)) ** (-2.0 * m)


def spectral_lhs(alpha: float, params: PhysicalParams, mode: str = "paper") -> float:
    """Left side of the eigenvalue condition in the chosen convention."""
    f = f_of_alpha(alpha, params.m)
    if mode == "rigorous" and math.isfinite(f):
        f *= (params.kappa * alpha) ** (-2.0 * params.m)
    return f
