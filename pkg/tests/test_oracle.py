import math

import mpmath
import numpy as np
import pytest

from exciton_sae import oracle, sae, specfun, spectrum
from exciton_sae.errors import DegenerateIndexError, DomainError
from exciton_sae.model import PhysicalParams, alpha_from_energy

from conftest import rel


def test_indicial_exponents_are_half_plus_minus_m(params_unit):
    up, um = oracle.frobenius_basis(params_unit, -0.3, 40)
    m = params_unit.m
    assert up.exponent == pytest.approx(0.5 + m, abs=1e-15)
    assert um.exponent == pytest.approx(0.5 - m, abs=1e-15)
    # s(s-1) = A a / kappa for both roots
    for s in (up.exponent, um.exponent):
        assert s * (s - 1) == pytest.approx(params_unit.coupling, abs=1e-14)


def test_frobenius_recurrence_residual(params_unit):
    for series in oracle.frobenius_basis(params_unit, -0.3, 60):
        assert series.coefficients[0] == 1.0
        assert oracle.frobenius_residual(series, params_unit, -0.3) < 1e-14


def test_frobenius_matches_kummer_built_solutions(params_unit):
    energy = -0.3
    m = params_unit.m
    alpha = alpha_from_energy(energy, params_unit.kappa)
    ka = params_unit.kappa * alpha
    x = params_unit.a / ka
    up, um = oracle.frobenius_basis(params_unit, energy, 80)
    for sign, series in ((1, up), (-1, um)):
        mu = sign * m
        u = math_u = np.exp(-x / 2) * x ** (0.5 + mu) * specfun.kummer_m(0.5 + mu - alpha, 1 + 2 * mu, x).real
        expected = ka ** (0.5 + mu) * math_u
        assert rel(series(params_unit.a), expected) < 1e-9, u


def test_frobenius_truncation_shrinks_geometrically(params_unit):
    w = 2.0
    exact = oracle.frobenius_basis(params_unit, -0.3, 120)[0](w)
    errs = [abs(oracle.frobenius_basis(params_unit, -0.3, n)[0](w) - exact) for n in (6, 12, 18)]
    assert errs[1] < 0.1 * errs[0] and errs[2] < 0.1 * errs[1]


def test_frobenius_degenerate_index():
    with pytest.raises(DegenerateIndexError):
        oracle.frobenius_basis(PhysicalParams(1.0, 1.0, 0.75), -0.3)


def test_outward_integration_reproduces_whittaker_m(params_unit):
    energy = -0.3
    m = params_unit.m
    alpha = alpha_from_energy(energy, 1.0)
    up, _ = oracle.frobenius_basis(params_unit, energy)
    y0 = up.evaluate(params_unit.a)
    out = oracle.integrate_ode(params_unit, energy, (0.0, 5.0), "outward", y0)
    x5 = (params_unit.a + 5.0) / alpha
    expected = alpha ** (0.5 + m) * specfun.whittaker_m(alpha, m, x5).real
    assert rel(out.y[-1], expected) < 1e-7


def test_free_limit_has_constant_amplitude():
    p = PhysicalParams(1e8, 1.0, 0.0)
    energy = 1.0
    out = oracle.integrate_ode(p, energy, (0.0, 60.0), "outward", (0.0, 1.0))
    z = np.linspace(0, 60, 601)
    y, dy = out(z)
    amplitude = y ** 2 + dy ** 2 / energy
    assert np.ptp(amplitude) < 1e-6


@pytest.mark.parametrize("energy, rtol", [(0.5, oracle.ODE_RTOL), (-0.3, 1e-12)])
def test_wronskian_conserved_along_integration(params_unit, energy, rtol):
    # at E < 0 both solutions grow like e^{0.55 z}, so a tighter local tolerance is needed
    z = np.linspace(0, 10, 41)
    a = oracle.integrate_ode(params_unit, energy, (0.0, 10.0), "outward", (1.0, 0.0), t_eval=z, rtol=rtol)
    b = oracle.integrate_ode(params_unit, energy, (0.0, 10.0), "outward", (0.0, 1.0), t_eval=z, rtol=rtol)
    wr = a.y * b.dy - a.dy * b.y
    assert np.max(np.abs(wr - wr[0])) < 1e-9


def test_frobenius_pair_wronskian_is_constant(params_unit):
    energy = -0.3
    up, um = oracle.frobenius_basis(params_unit, energy)
    z = np.linspace(0, 8, 33)
    a = oracle.integrate_ode(params_unit, energy, (0.0, 8.0), "outward", up.evaluate(1.0), t_eval=z,
                             rtol=1e-12, atol=1e-14)
    b = oracle.integrate_ode(params_unit, energy, (0.0, 8.0), "outward", um.evaluate(1.0), t_eval=z,
                             rtol=1e-12, atol=1e-14)
    wr = a.y * b.dy - a.dy * b.y
    assert np.max(np.abs(wr + 2 * params_unit.m)) < 1e-9 * 2 * params_unit.m


def test_integrate_ode_rejects_bad_span(params_unit):
    with pytest.raises(DomainError):
        oracle.integrate_ode(params_unit, -0.3, (0.0, 5.0), "inward", (1.0, 0.0))
    with pytest.raises(DomainError):
        oracle.integrate_ode(params_unit, -0.3, (5.0, 0.0), "outward", (1.0, 0.0))


def test_deficiency_coefficients_from_ode_match_connection(params_ref):
    for mode in ("paper", "rigorous"):
        data = sae.deficiency_data(params_ref, mode)
        a_plus, mb_plus = oracle.deficiency_coefficients(params_ref, mode)
        assert rel(a_plus, data.coeff_A_plus) < 1e-8
        assert rel(mb_plus, -data.coeff_B_plus) < 1e-8


def test_shooting_reproduces_closed_form_when_rhs_vanishes(params_ref):
    data = sae.deficiency_data(params_ref)
    sigma = sae.sigma_rhs_zero(data).sigma
    shots = oracle.shoot_spectrum(params_ref, sigma, 3, tol=1e-10)
    m = params_ref.m
    for n, shot in enumerate(shots, start=1):
        assert shot.energy == pytest.approx(-1 / (4 * (0.5 - m + n) ** 2), abs=1e-6)


def test_shooting_agrees_with_whittaker_solver(params_unit):
    states = spectrum.solve_spectrum(params_unit, 1.0, 3)
    target = states[1]
    which = sum(1 for s in states[:1] if s.branch == target.branch)
    shot = oracle.shoot_eigenvalue(params_unit, 1.0, target.branch, tol=1e-10, which=which)
    assert abs(shot.energy - target.energy) < 1e-6
    assert shot.decay_defect >= 0
    assert shot.bracket[1] - shot.bracket[0] <= 1e-10


def test_shooting_is_cutoff_independent(params_unit):
    a = oracle.shoot_eigenvalue(params_unit, 1.0, 1, tol=1e-10, z_max=30.0)
    b = oracle.shoot_eigenvalue(params_unit, 1.0, 1, tol=1e-10, z_max=60.0)
    assert abs(a.energy - b.energy) < 1e-10


def test_highprec_trivial_values():
    with mpmath.workdps(40):
        assert abs(oracle.highprec_eval("gamma", [0.5], 30) - mpmath.sqrt(mpmath.pi)) < mpmath.mpf(10) ** -29
        assert abs(oracle.highprec_eval("kummer_m", [1, 2, 1], 30) - (mpmath.e - 1)) < mpmath.mpf(10) ** -29
        lg = oracle.highprec_eval("loggamma", [3 + 4j], 30)
        assert abs(lg - mpmath.loggamma(3 + 4j)) < mpmath.mpf(10) ** -28


def test_highprec_reflection_branch_and_polar():
    with mpmath.workdps(40):
        g = oracle.highprec_eval("gamma", [-2.5 + 0.3j], 30)
        assert abs(g / mpmath.gamma(mpmath.mpc(-2.5, 0.3)) - 1) < mpmath.mpf(10) ** -28
        chi, theta = oracle.highprec_eval("gamma_polar", [2], 25)
        assert abs(chi - 1) < 1e-24 and abs(theta) < 1e-24


def test_highprec_digit_limit():
    with pytest.raises(DomainError):
        oracle.highprec_eval("gamma", [1.5], oracle.MAX_DIGITS + 1)
    with pytest.raises(DomainError):
        oracle.highprec_eval("bessel", [1.5], 20)


def test_scattering_oracle_is_unitary(params_unit):
    s = oracle.scattering_s_matrix(params_unit, 1.0, 1.0)
    assert abs(abs(s) - 1) < 1e-9
