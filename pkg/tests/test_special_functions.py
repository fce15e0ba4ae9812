import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from stratrad.special_functions import (
    C_SUN,
    DomainError,
    T_SUN,
    expint,
    expint_extended,
    planck,
    planck_dT,
    solar_source,
)


def quad_expint(p, t):
    """Independent oracle: E_p(t) = int_0^1 exp(-t/mu) mu^(p-2) dmu."""
    if p == 1:
        # substitute mu = exp(-s) to remove the 1/mu endpoint behaviour
        f = lambda s: np.exp(-t * np.exp(min(s, 700.0)))
        val, _ = integrate.quad(f, 0, np.inf, epsabs=1e-14, epsrel=1e-13, limit=400)
        return val
    f = lambda mu: np.exp(-t / mu) * mu ** (p - 2) if mu > 0 else 0.0
    val, _ = integrate.quad(f, 0, 1, epsabs=1e-14, epsrel=1e-13, limit=400)
    return val


def test_trivial_values():
    assert expint(2, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert expint(3, 0.0) == pytest.approx(0.5, abs=1e-15)
    assert expint(5, 0.0) == pytest.approx(0.25, abs=1e-15)


def test_e1_at_one_matches_quadrature():
    # value frozen from the quadrature oracle
    assert quad_expint(1, 1.0) == pytest.approx(0.219383934395520, abs=1e-12)
    assert expint(1, 1.0) == pytest.approx(0.219384, abs=1e-6)


def test_e5_at_two_matches_quadrature():
    ref = quad_expint(5, 2.0)
    assert ref == pytest.approx(0.0213224002, abs=1e-9)
    assert abs(expint(5, 2.0) - ref) < 1e-10


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
@pytest.mark.parametrize("p", [1, 2, 3, 4, 5])
def test_against_quadrature_oracle(p):
    t = np.logspace(-6, np.log10(17), 200)
    ref = np.array([quad_expint(p, x) for x in t])
    assert np.max(np.abs(expint(p, t) - ref)) < 1e-8


@pytest.mark.parametrize("p", [1, 2, 3, 4, 5])
def test_against_scipy_expn(p):
    t = np.logspace(-6, np.log10(17.9), 500)
    assert np.max(np.abs(expint(p, t) - special.expn(p, t))) < 1e-10


def test_listing_series_is_less_accurate():
    t = np.linspace(0.4, 1.2, 50)
    err = np.max(np.abs(expint(1, t, method="listing") - special.exp1(t)))
    assert 1e-8 < err < 1e-5


def test_small_argument_convention():
    assert expint(1, 1e-11) == 0.0
    assert expint(2, 1e-11) == pytest.approx(1.0, abs=1e-9)


def test_recurrence_residual():
    t = np.logspace(-6, np.log10(17), 200)
    for p in range(2, 6):
        r = (p - 1) * expint(p, t) - (np.exp(-t) - t * expint(p - 1, t))
        assert np.max(np.abs(r)) < 1e-12


@pytest.mark.parametrize("bad", [(0, 1.0), (6, 1.0), (1, -0.1), (1, 18.5)])
def test_domain_errors(bad):
    with pytest.raises(DomainError):
        expint(*bad)


def test_extended_order_six():
    assert expint_extended(6, 1.0) == pytest.approx(special.expn(6, 1.0), abs=1e-10)


@given(st.floats(1e-4, 17.0), st.integers(1, 4))
def test_expint_decreasing_in_order(t, p):
    assert expint(p + 1, t) <= expint(p, t) + 1e-15


@given(st.floats(1e-3, 10.0))
def test_derivative_identity(t):
    # d/dt E_{p+1} = -E_p
    h = 1e-2 * min(t, 1.0)
    for p in (1, 2, 3, 4):
        fd = (expint(p + 1, t + h) - expint(p + 1, t - h)) / (2 * h)
        assert fd == pytest.approx(-expint(p, t), rel=1e-4, abs=1e-9)


def test_planck_values():
    assert planck(1.0, 1.0) == pytest.approx(1 / (np.e - 1))
    assert planck(1.0, 0.0) == 0.0
    # Rayleigh-Jeans limit
    assert planck(1e-12, 2.0) == pytest.approx(2.0 * 1e-24)


@given(st.floats(0.01, 20.0), st.floats(0.02, 3.0))
@settings(max_examples=200)
def test_planck_derivative_matches_fd(nu, T):
    h = 1e-6 * T
    fd = (planck(nu, T + h) - planck(nu, T - h)) / (2 * h)
    d = planck_dT(nu, T)
    assert d == pytest.approx(fd, rel=1e-5, abs=1e-300)


@given(st.floats(0.05, 15.0), st.floats(0.05, 2.0))
def test_planck_positive_and_increasing_in_T(nu, T):
    assert planck(nu, T) > 0
    assert planck(nu, 1.1 * T) >= planck(nu, T)


def test_stefan_boltzmann_refined_grid():
    nu = np.linspace(0, 60, 10_001)[1:]
    for T in (0.5, 1.0):
        val = integrate.trapezoid(planck(nu, T), nu)
        assert val == pytest.approx(np.pi**4 * T**4 / 15, rel=1e-4)


def test_solar_source_scale():
    assert solar_source(1.0) == pytest.approx(C_SUN * planck(1.0, T_SUN))
    assert np.all(solar_source(np.array([0.5, 2.0]), T_sun=0.0) == 0)
