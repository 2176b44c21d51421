"""Physical parameters of the effective 1D exciton Hamiltonian.

Units: hbar^2 = 2*mu_reduced = e^2 = 1.  With w = a + |z| the equation is

    -chi'' - [1/(kappa w) - A a/(kappa w^2)] chi = E chi
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class PhysicalParams:
    kappa: float
    a: float
    bigA: float = 0.0

    def __post_init__(self):
        for name in ("kappa", "a", "bigA"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise DomainError(f"{name} must be a finite real number, got {value!r}")
        if self.kappa <= 0:
            raise DomainError(f"kappa must be > 0, got {self.kappa}")
        if self.a <= 0:
            raise DomainError(f"a must be > 0, got {self.a}")
        if self.bigA < 0:
            raise DomainError(f"A must be >= 0, got {self.bigA}")
        object.__setattr__(self, "kappa", float(self.kappa))
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "bigA", float(self.bigA))

    @property
    def coupling(self) -> float:
        """The inverse-square strength A*a/kappa (= m^2 - 1/4)."""
        return self.bigA * self.a / self.kappa

    @property
    def m(self) -> float:
        return whittaker_index(self)

    @classmethod
    def from_index(cls, m: float, kappa: float = 1.0, a: float = 1.0) -> "PhysicalParams":
        """Parameters with a prescribed Whittaker index m >= 1/2."""
        if m < 0.5:
            raise DomainError(f"m must be >= 1/2, got {m}")
        return cls(kappa=kappa, a=a, bigA=(m * m - 0.25) * kappa / a)


def whittaker_index(params: PhysicalParams) -> float:
    """m = sqrt(1/4 + A a / kappa)."""
    return math.sqrt(0.25 + params.coupling)


def potential(params: PhysicalParams, z: float) -> float:
    """V(z) = -1/(kappa (a+z)) + A a/(kappa (a+z)^2) for z >= 0."""
    if z < 0:
        raise DomainError(f"potential is defined for z >= 0, got {z}")
    w = params.a + z
    return (-1.0 + params.bigA * params.a / w) / (params.kappa * w)


def alpha_from_energy(energy: float, kappa: float) -> float:
    """alpha = (1/(2 kappa)) sqrt(-1/E) for a bound-state energy E < 0."""
    if not energy < 0:
        raise DomainError(f"bound-state energy must be negative, got {energy}")
    return 0.5 / (kappa * math.sqrt(-energy))


def energy_from_alpha(alpha: float, kappa: float) -> float:
    """Inverse of alpha_from_energy: E = -1/(4 kappa^2 alpha^2)."""
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    return -1.0 / (4.0 * kappa * kappa * alpha * alpha)


def alpha_tilde_from_energy(energy: float, kappa: float) -> float:
    """Scattering label (1/(2 kappa)) sqrt(1/E) for E > 0."""
    if not energy > 0:
        raise DomainError(f"scattering energy must be positive, got {energy}")
    return 0.5 / (kappa * math.sqrt(energy))
