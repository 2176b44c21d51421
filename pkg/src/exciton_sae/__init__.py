"""Self-adjoint extensions of the effective 1D exciton Hamiltonian in a strong magnetic field.

Modules: ``specfun`` (gamma, Kummer, Whittaker), ``model`` (parameters and
potential), ``sae`` (deficiency data and the eigenvalue condition),
``spectrum`` (bound states), ``scattering`` (phase shifts), ``oracle``
(independent ODE and series checks) and ``cli``.
"""

from .errors import (
    AsymptoticsError,
    ConditioningError,
    ConvergenceError,
    DegenerateIndexError,
    DomainError,
    ExcitonSAEError,
    PoleError,
    QuadratureError,
    StepSizeError,
)
from .model import PhysicalParams, alpha_from_energy, energy_from_alpha, potential, whittaker_index
from .sae import DeficiencyData, ExtensionAngle, boundary_rhs, deficiency_data, f_of_alpha
from .scattering import ScatteringSolution, scattering_coefficients
from .spectrum import BoundState, BranchInterval, branch_intervals, normalize, solve_spectrum

__version__ = "0.1.0"

__all__ = [
    "AsymptoticsError", "ConditioningError", "ConvergenceError", "DegenerateIndexError",
    "DomainError", "ExcitonSAEError", "PoleError", "QuadratureError", "StepSizeError",
    "PhysicalParams", "alpha_from_energy", "energy_from_alpha", "potential", "whittaker_index",
    "DeficiencyData", "ExtensionAngle", "boundary_rhs", "deficiency_data", "f_of_alpha",
    "ScatteringSolution", "scattering_coefficients",
    "BoundState", "BranchInterval", "branch_intervals", "normalize", "solve_spectrum",
]
