"""Positive-energy solutions of a self-adjoint extension.

psi = C M_{K,m}(x) + D W_{K,m}(x),  K = i alpha~,  x = (a+z)/(i kappa alpha~) = -2ikw.

M_{K,m} is the u_+ Frobenius solution itself and W_{K,m} = A u_+ - B u_-,
so the u_+ : u_- coefficients of psi are (C + D A) : (-D B).  These are set
to the ratio fixed by the extension, carried over to the scattering argument
so that psi is real up to an overall constant (which makes |S| = 1).

Waves are referenced to exp(+-i(kz + alpha~ ln 2kz)), i.e. the Coulomb phase
kz - eta ln 2kz with eta = -1/(2 kappa k); S = outgoing/incoming and
delta = arg(S)/2.  Another reference phase shifts delta by an E-dependent
amount.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

from . import sae, specfun
from .errors import AsymptoticsError, ConditioningError, DegenerateIndexError, DomainError
from .model import PhysicalParams, alpha_tilde_from_energy

# fix C = 1 instead of D = 1 when the D channel falls below this fraction
CHANNEL_TOL = 1e-10
MAX_CONDITION = 1e10


@dataclass(frozen=True)
class ScatteringSolution:
    energy: float
    alpha_tilde: float
    ratio_c_over_d: complex
    phase_shift: float
    coeff_c: complex = 1.0
    coeff_d: complex = 1.0
    s_matrix: complex = 1.0
    condition: float = 1.0
    sigma: float = 0.0
    mode: str = "paper"

    @property
    def unitarity_defect(self) -> float:
        return abs(abs(self.s_matrix) - 1.0)


def _x_ratio_phase(params: PhysicalParams, alpha_tilde: float, mode: str) -> complex:
    """Factor turning the extension's ratio into a u_+/u_- ratio at argument -2ikw.

    u_+- = (i kappa alpha~)^{-(1/2 +- m)} w^{1/2 +- m} (...), so a real w-basis
    ratio r corresponds to the x-basis ratio r (i kappa alpha~)^{2m}.  The
    ``paper`` mode drops the real scale (kappa alpha~)^{2m} exactly as it
    drops (kappa alpha)^{2m} for bound states, keeping the phase e^{i pi m}.
    """
    m = params.m
    if mode == "paper":
        return cmath.exp(1j * math.pi * m)
    return specfun._cpow(1j * params.kappa * alpha_tilde, 2.0 * m)


def matching_coefficients(params: PhysicalParams, sigma, energy: float, mode: str = "paper"):
    """(C, D, condition) for psi = C M + D W matched to the extension Sigma."""
    at = alpha_tilde_from_energy(energy, params.kappa)
    data = sae.deficiency_data(params, mode)
    c_plus, c_minus = sae.domain_coefficients(data, sigma)
    half = cmath.exp(-0.5j * sae._sigma_value(sigma))
    num, den = (c_plus * half).real, (c_minus * half).real
    lam = _x_ratio_phase(params, at, mode)
    pair = sae.connection_coefficients(1j * at, params.m)
    big_a, big_b = pair.coeff_plus_power, -pair.coeff_minus_power
    # (C + D A) den = -D B lam num  ->  C = -(den A + lam num B) t,  D = den t
    c_val = -(den * big_a + lam * num * big_b)
    d_val = complex(den)
    condition = (abs(den * big_a) + abs(num * big_b)) / max(abs(c_val), 1e-300)
    if abs(d_val) * max(abs(big_a), abs(big_b), 1.0) < CHANNEL_TOL * abs(c_val):
        return 1.0 + 0j, d_val / c_val, condition
    return c_val / d_val, 1.0 + 0j, condition


def s_matrix(params: PhysicalParams, energy: float, coeff_c: complex, coeff_d: complex):
    """Outgoing/incoming amplitude ratio of C M_{K,m} + D W_{K,m}, referenced at z.

    Uses M_{K,m}(x) = Gamma(1+2m)[e^{i pi K} W_{-K,m}(-x)/Gamma(1/2+m-K)
    + e^{-i pi (1/2+m-K)} W_{K,m}(x)/Gamma(1/2+m+K)]  (-pi < ph x <= 0),
    with outgoing e^{-pi alpha~/2} W_{K,m}(x) and incoming e^{-pi alpha~/2} W_{-K,m}(-x).
    """
    at = alpha_tilde_from_energy(energy, params.kappa)
    k = math.sqrt(energy)
    m = params.m
    big_k = 1j * at
    lg = specfun.log_gamma(1.0 + 2.0 * m)
    m_out = cmath.exp(lg - 1j * math.pi * (0.5 + m - big_k) - specfun.log_gamma(0.5 + m + big_k))
    m_in = cmath.exp(lg + 1j * math.pi * big_k - specfun.log_gamma(0.5 + m - big_k))
    c_out = coeff_c * m_out + coeff_d
    c_in = coeff_c * m_in
    if c_in == 0 or not (cmath.isfinite(c_out) and cmath.isfinite(c_in)):
        raise AsymptoticsError(f"incoming amplitude vanished or overflowed at E={energy}")
    return c_out / c_in * cmath.exp(2j * k * params.a)


def phase_shift(solution: ScatteringSolution, params: PhysicalParams) -> float:
    """delta = arg(S)/2 in (-pi/2, pi/2]."""
    s = s_matrix(params, solution.energy, solution.coeff_c, solution.coeff_d)
    return 0.5 * cmath.phase(s)


def scattering_coefficients(
    params: PhysicalParams,
    sigma: Union[sae.ExtensionAngle, float],
    energy: float,
    mode: str = "paper",
) -> ScatteringSolution:
    if not energy > 0 or not math.isfinite(energy):
        raise DomainError(f"scattering energy must be positive and finite, got {energy}")
    if specfun.is_degenerate_index(params.m):
        raise DegenerateIndexError(f"2m = {2 * params.m!r} is (nearly) an integer")
    if not isinstance(sigma, sae.ExtensionAngle):
        sigma = sae.ExtensionAngle(sigma)
    c, d, condition = matching_coefficients(params, sigma, energy, mode)
    if condition > MAX_CONDITION:
        raise ConditioningError(f"matching at E={energy} has condition {condition:.3g}", condition=condition)
    s = s_matrix(params, energy, c, d)
    ratio = c / d if d != 0 else complex(math.inf, 0.0)
    return ScatteringSolution(
        energy=float(energy),
        alpha_tilde=alpha_tilde_from_energy(energy, params.kappa),
        ratio_c_over_d=ratio,
        phase_shift=0.5 * cmath.phase(s),
        coeff_c=c,
        coeff_d=d,
        s_matrix=s,
        condition=condition,
        sigma=sigma.sigma,
        mode=mode,
    )


def combined_x_coefficients(params: PhysicalParams, solution: ScatteringSolution):
    """u_+ and u_- coefficients (C + D A, -D B) of the matched solution."""
    pair = sae.connection_coefficients(1j * solution.alpha_tilde, params.m)
    return (
        solution.coeff_c + solution.coeff_d * pair.coeff_plus_power,
        solution.coeff_d * pair.coeff_minus_power,
    )
