import cmath
import math

import numpy as np
import pytest

from exciton_sae import oracle, sae, scattering
from exciton_sae.errors import ConditioningError, DegenerateIndexError, DomainError
from exciton_sae.model import PhysicalParams
from exciton_sae.scattering import combined_x_coefficients, scattering_coefficients

from conftest import ORACLE_SETS, rel, wrap_pi

SCATTER_POINTS = [
    (PhysicalParams(1.0, 1.0, 1.0), 1.0, 1.0),
    (PhysicalParams(0.5, 1.0, 0.125), 0.7, 0.3),
    (PhysicalParams(2.0, 1.0, 8.0), 2.5, 2.0),
    (PhysicalParams(0.5, 1.0, 2.0), 2.5, 0.05),
    (PhysicalParams(2.0, 1.0, 0.5), 0.7, 5.0),
]


def test_unitarity_on_random_grid(params_unit):
    rng = np.random.default_rng(20240611)
    for _ in range(20):
        sigma = rng.uniform(0.0, 2 * math.pi)
        energy = 10 ** rng.uniform(-2.5, 1.5)
        for mode in sae.MODES:
            sol = scattering_coefficients(params_unit, sigma, energy, mode)
            assert sol.unitarity_defect < 1e-8
            assert sol.phase_shift == pytest.approx(0.5 * cmath.phase(sol.s_matrix), abs=1e-15)


def test_solution_fields(params_unit):
    sol = scattering_coefficients(params_unit, 1.0, 4.0)
    assert rel(sol.alpha_tilde, 0.5 / (params_unit.kappa * 2.0)) < 1e-14
    assert sol.coeff_d == 1.0 and sol.ratio_c_over_d == sol.coeff_c
    assert -math.pi / 2 < sol.phase_shift <= math.pi / 2
    assert scattering.phase_shift(sol, params_unit) == pytest.approx(sol.phase_shift, abs=1e-15)


@pytest.mark.parametrize("sigma", [0.2, 1.0, 3.0, 5.5])
def test_phase_shift_is_periodic_in_sigma(params_unit, sigma):
    a = scattering_coefficients(params_unit, sigma, 0.8)
    b = scattering_coefficients(params_unit, sigma + 2 * math.pi, 0.8)
    assert abs(wrap_pi(a.phase_shift - b.phase_shift)) < 1e-12


@pytest.mark.parametrize("mode", sae.MODES)
@pytest.mark.parametrize("sigma", [0.4, 1.0, 2.5, 4.0])
def test_construction_residual(params_ref, sigma, mode):
    """The matched u_+/u_- ratio equals the domain ratio carried to the scattering argument."""
    d = sae.deficiency_data(params_ref, mode)
    c_plus, c_minus = sae.domain_coefficients(d, sigma)
    domain_ratio = (c_plus / c_minus).real
    for energy in (0.01, 0.5, 30.0):
        sol = scattering_coefficients(params_ref, sigma, energy, mode)
        plus, minus = combined_x_coefficients(params_ref, sol)
        lam = scattering._x_ratio_phase(params_ref, sol.alpha_tilde, mode)
        assert abs(plus / minus / lam - domain_ratio) <= 1e-9 * max(abs(domain_ratio), 1.0)


@pytest.mark.parametrize("params, sigma, energy", SCATTER_POINTS)
@pytest.mark.parametrize("mode", sae.MODES)
def test_phase_shift_matches_wave_splitting(params, sigma, energy, mode):
    sol = scattering_coefficients(params, sigma, energy, mode)
    s_ode = oracle.scattering_s_matrix(params, sigma, energy, mode)
    delta_ode = 0.5 * cmath.phase(s_ode)
    assert abs(wrap_pi(sol.phase_shift - delta_ode)) < 1e-4


def _scan(params, sigma, energies):
    sols = [scattering_coefficients(params, sigma, e) for e in energies]
    return np.array([s.phase_shift for s in sols]), np.array([s.ratio_c_over_d for s in sols])


def _steps(deltas, ratios):
    d_step = np.abs([wrap_pi(b - a) for a, b in zip(deltas[:-1], deltas[1:])])
    r_step = np.abs(np.diff(ratios)) / np.maximum(np.abs(ratios[:-1]), 1.0)
    return d_step, r_step


@pytest.mark.parametrize("sigma", [0.7, 2.5])
def test_continuity_over_energy(params_unit, sigma):
    """Large steps on the coarse log grid must shrink when refined (no hidden jumps).

    The Coulomb logarithmic phase grows like E^{-1/2} at low energy, so the
    coarse steps there are large but smooth.
    """
    energies = np.geomspace(1e-3, 1e2, 400)
    d_step, r_step = _steps(*_scan(params_unit, sigma, energies))
    for i in np.flatnonzero((d_step > 0.05) | (r_step > 0.05)):
        fine = np.geomspace(energies[i], energies[i + 1], 9)
        fd, fr = _steps(*_scan(params_unit, sigma, fine))
        assert fd.max() < max(d_step[i] / 3, 0.02)
        assert fr.max() < max(r_step[i] / 3, 0.02)


def test_pure_channel_limits(params_ref):
    d = sae.deficiency_data(params_ref)
    zero = scattering_coefficients(params_ref, sae.sigma_rhs_zero(d), 0.7)
    plus, minus = combined_x_coefficients(params_ref, zero)
    # RHS = 0 removes the u_+ channel, just as the zeros of f do for bound states
    assert abs(plus) < 1e-12 * abs(minus)
    inf = scattering_coefficients(params_ref, sae.sigma_rhs_infinity(d), 0.7)
    # RHS = infinity keeps only the regular solution M = u_+
    assert inf.coeff_c == 1.0 and abs(inf.coeff_d) < 1e-10
    assert inf.unitarity_defect < 1e-8 and zero.unitarity_defect < 1e-8


def test_conditioning_error(params_unit, monkeypatch):
    monkeypatch.setattr(scattering, "MAX_CONDITION", 0.5)
    with pytest.raises(ConditioningError) as exc:
        scattering_coefficients(params_unit, 1.0, 1.0)
    assert exc.value.condition >= 1.0


def test_domain_and_degenerate_errors(params_unit):
    with pytest.raises(DomainError):
        scattering_coefficients(params_unit, 1.0, -1.0)
    with pytest.raises(DomainError):
        scattering_coefficients(params_unit, 1.0, math.inf)
    with pytest.raises(DegenerateIndexError):
        scattering_coefficients(PhysicalParams(1.0, 1.0, 0.75), 1.0, 1.0)


def test_oracle_sets_unitary_in_both_modes():
    for params, sigma in ORACLE_SETS:
        for mode in sae.MODES:
            for energy in (0.02, 1.0, 50.0):
                assert scattering_coefficients(params, sigma, energy, mode).unitarity_defect < 1e-8
