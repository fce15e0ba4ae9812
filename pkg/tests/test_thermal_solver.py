import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stratrad import dual as dn
from stratrad.special_functions import planck
from stratrad.spectral_grid import SpectralGrid, build_wavelength_uniform, kappa_banded
from stratrad.thermal_solver import (
    absorbed_power,
    balance_residual,
    bracket_and_bisect,
    solve_node,
    solve_profile,
    solve_profile_grey,
)


def field_at_temperature(spectral, T):
    """J = b(nu, T) at every node."""
    return planck(spectral.nu[:, None], np.asarray(T)[None, :])


def test_manufactured_unit_temperature():
    g = build_wavelength_uniform(kappa=kappa_banded(build_wavelength_uniform().nu, 0.05, 0.5, 0, 3))
    # J such that the midpoint balance holds exactly at T = 1
    target = np.sum(g.kappa * g.dnu * planck(g.nu_mid, 1.0))
    J = np.ones((g.jmax, 3)) * target / np.sum(g.kappa * g.dnu)
    prof = solve_profile(J, g, 0.0)
    np.testing.assert_allclose(prof.T, 1.0, atol=1e-12)
    assert not prof.flagged


def test_residual_below_contract(default_spectral):
    T_true = np.linspace(0.05, 0.12, 9)
    J = field_at_temperature(default_spectral, T_true) * 1.07
    prof = solve_profile(J, default_spectral, 0.0)
    r = balance_residual(prof.T, absorbed_power(J, default_spectral), default_spectral, midpoint=True)
    assert np.max(np.abs(r)) < 1e-12


def test_zero_field_gives_zero_temperature(default_spectral):
    prof = solve_profile(np.zeros((default_spectral.jmax, 4)), default_spectral, 0.0)
    np.testing.assert_array_equal(prof.T, 0.0)


def test_grey_closed_form_matches_newton():
    # uniform frequency nodes fine enough that both quadratures resolve b
    nu = np.linspace(0.004, 3.0, 600)
    g = SpectralGrid(nu=nu, kappa=np.full(600, 0.5))
    T_true = np.linspace(0.06, 0.09, 6)
    J = field_at_temperature(g, T_true)
    newton = solve_profile(J, g, 0.0).T
    closed = solve_profile_grey(J, g)
    np.testing.assert_allclose(newton, closed, atol=1e-6)
    np.testing.assert_allclose(newton, T_true, atol=1e-6)


def test_bisection_brackets_root(default_spectral):
    J = field_at_temperature(default_spectral, np.array([0.08, 0.3]))
    rhs = absorbed_power(J, default_spectral)
    T = bracket_and_bisect(rhs, default_spectral, np.zeros(2), eps=0.01)
    assert np.all(np.abs(T - [0.08, 0.3]) < 0.02)


def test_solve_node_matches_profile(default_spectral):
    J = field_at_temperature(default_spectral, np.array([0.07, 0.08, 0.09]))
    prof = solve_profile(J, default_spectral, 0.0)
    assert solve_node(1, J, default_spectral) == pytest.approx(prof.T[1], abs=1e-14)


def test_vectorized_equals_per_node(default_spectral):
    J = field_at_temperature(default_spectral, np.linspace(0.05, 0.1, 5)) * 0.9
    prof = solve_profile(J, default_spectral, 0.0)
    each = [solve_node(i, J, default_spectral) for i in range(5)]
    np.testing.assert_allclose(prof.T, each, rtol=1e-14)


def test_flagging_when_newton_budget_is_too_small(default_spectral, caplog):
    J = field_at_temperature(default_spectral, np.array([0.08]))
    prof = solve_profile(J, default_spectral, 0.0, newton_max=1)
    assert prof.flagged == [0]
    assert "doubtful" in caplog.text


@given(st.floats(0.03, 0.5))
@settings(max_examples=40, deadline=None)
def test_temperature_monotone_in_absorbed_power(T0):
    g = build_wavelength_uniform(jmax=120)
    J = field_at_temperature(g, np.array([T0, T0]))
    J[:, 1] *= 1.1
    T = solve_profile(J, g, 0.0).T
    assert T[1] > T[0]


def test_dual_newton_derivative_matches_fd(default_spectral):
    J = field_at_temperature(default_spectral, np.array([0.08]))
    s = dn.Dual(1.0, 1.0)
    Td = solve_profile(J * s, default_spectral, 0.0).T
    h = 1e-6
    fd = (solve_profile(J * (1 + h), default_spectral, 0.0).T - solve_profile(J * (1 - h), default_spectral, 0.0).T) / (2 * h)
    assert dn.derivative(Td)[0] == pytest.approx(fd[0], rel=1e-6)
    assert dn.value(Td)[0] == solve_profile(J, default_spectral, 0.0).T[0]
