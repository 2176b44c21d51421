import math

import pytest

from exciton_sae.model import PhysicalParams

M_REF = 0.8660254


@pytest.fixture
def params_ref():
    """kappa = 1, a = 1, A such that m = 0.8660254."""
    return PhysicalParams.from_index(M_REF, kappa=1.0, a=1.0)


@pytest.fixture
def params_unit():
    """kappa = a = A = 1 (m = sqrt(5)/2)."""
    return PhysicalParams(1.0, 1.0, 1.0)


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


# five parameter sets spanning kappa in {0.5, 1, 2}, A a/kappa in {0.25, 1, 4}
# and Sigma in {0.7, 1.0, 2.5}
ORACLE_SETS = [
    (PhysicalParams(1.0, 1.0, 1.0), 1.0),
    (PhysicalParams(0.5, 1.0, 0.125), 0.7),
    (PhysicalParams(2.0, 1.0, 8.0), 2.5),
    (PhysicalParams(0.5, 1.0, 2.0), 2.5),
    (PhysicalParams(2.0, 1.0, 0.5), 0.7),
]


def wrap_pi(x):
    """Reduce to (-pi/2, pi/2], the range on which a phase shift is defined."""
    return (x + 0.5 * math.pi) % math.pi - 0.5 * math.pi


def chi_unchecked(params, alpha, z):
    """W_{alpha,m}((a+z)/(kappa alpha)) without the z >= 0 guard (w = a+z stays > 0)."""
    from exciton_sae import specfun

    return specfun.whittaker_w(alpha, params.m, (params.a + z) / (params.kappa * alpha)).real


def ode_residual(params, state, z_grid, h=1e-2):
    """max |chi'' - (V - E) chi| over the grid, relative to the size of the two terms.

    chi'' from a five-point central difference; V extended to a+z > 0.
    """
    import numpy as np

    worst_r, worst_scale = 0.0, 0.0
    for z in z_grid:
        f = [chi_unchecked(params, state.alpha, z + j * h) for j in (-2, -1, 0, 1, 2)]
        d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
        w = params.a + z
        v = (-1.0 + params.bigA * params.a / w) / (params.kappa * w)
        rhs = (v - state.energy) * f[2]
        worst_r = max(worst_r, abs(d2 - rhs))
        worst_scale = max(worst_scale, abs(d2) + abs(rhs))
    return worst_r / worst_scale if worst_scale else float(np.inf)
