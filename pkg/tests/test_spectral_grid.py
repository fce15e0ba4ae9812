import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stratrad import dual as dn
from stratrad.special_functions import planck
from stratrad.spectral_grid import (
    JMAX_MAX,
    KAPPA_MIN,
    SpectralGrid,
    build_wavelength_uniform,
    integrate_nu,
    kappa_banded,
    kappa_from_file,
    kappa_grey,
    read_kappa_file,
    rectangle_rule,
)


def test_wavelength_uniform_grid():
    g = build_wavelength_uniform()
    assert g.jmax == 400
    assert np.all(np.diff(g.nu) > 0)
    # the last node is j = jmax - 1; nu_max itself would be j = jmax
    assert g.nu[0] == pytest.approx(0.05)
    assert g.nu[-1] == pytest.approx(15.0 / (1 + 14.95 / 0.05 / 400))
    # uniform spacing in 1/nu
    np.testing.assert_allclose(np.diff(1 / g.nu), np.diff(1 / g.nu)[0], rtol=1e-9)
    assert g.dnu[0] == 0.0


@pytest.mark.parametrize("T, deficit", [(0.5, -0.0853418), (1.0, -0.1555473)])
def test_rectangle_rule_on_default_grid_frozen(T, deficit):
    # O(dnu) error of the rectangle rule, dominated by the coarse top cells
    g = build_wavelength_uniform()
    val = integrate_nu(g, planck(g.nu, T))
    assert val / (np.pi**4 * T**4 / 15) - 1 == pytest.approx(deficit, abs=1e-6)


@pytest.mark.parametrize("T", [0.5, 1.0])
def test_stefan_boltzmann_refined(T):
    nu = np.linspace(0, 40, 10_001)[1:]
    val = rectangle_rule(nu, planck(nu, T))
    assert val == pytest.approx(np.pi**4 * T**4 / 15, rel=1e-4)


def test_rectangle_rule_linear_and_constant():
    g = build_wavelength_uniform()
    assert integrate_nu(g, np.ones(g.jmax)) == pytest.approx(g.nu[-1] - g.nu[0])
    # right-node rule on a linear function: exact value plus half the sum of dnu^2
    exact = 0.5 * (g.nu[-1] ** 2 - g.nu[0] ** 2) + 0.5 * np.sum(np.diff(g.nu) ** 2)
    assert integrate_nu(g, g.nu) == pytest.approx(exact, rel=1e-12)


@given(st.lists(st.floats(0, 10), min_size=400, max_size=400))
def test_integrate_monotone(vals):
    g = build_wavelength_uniform()
    assert integrate_nu(g, np.array(vals)) >= 0


def test_kappa_clamped():
    g = SpectralGrid(nu=np.array([1.0, 2.0]), kappa=np.array([1e-9, 0.3]))
    np.testing.assert_allclose(g.kappa, [KAPPA_MIN, 0.3])


def test_fig1_kappa():
    nu = np.array([1.0, 2.9, 3.1, 10.0])
    np.testing.assert_allclose(kappa_banded(nu, base=0.05, step=0.5, nu_hi=3.0), [0.55, 0.55, 0.05, 0.05])


def test_band_is_open_and_accepts_duals():
    nu = np.array([0.6, 0.7, 0.8])
    k = kappa_banded(nu, base=0.5, step=dn.Dual(0.0, 1.0), nu_lo=0.6, nu_hi=0.8)
    np.testing.assert_array_equal(dn.derivative(k), [0.0, 1.0, 0.0])


@given(st.floats(0.001, 3.0))
def test_grey_is_constant(level):
    k = kappa_grey(np.linspace(0.1, 10, 7), level)
    assert np.all(k == level)


def test_invalid_nu_rejected():
    with pytest.raises(ValueError):
        SpectralGrid(nu=np.array([2.0, 1.0]), kappa=np.array([0.5, 0.5]))


def test_read_kappa_file(tmp_path):
    p = tmp_path / "k.txt"
    p.write_text("1.0 0.3 0.4 0.5 0\n2.0 1e-9 0.1 0.2 0\n")
    nu, k = read_kappa_file(p, 0)
    np.testing.assert_allclose(nu, [1.0, 2.0])
    np.testing.assert_allclose(k, [0.3, KAPPA_MIN])
    assert kappa_from_file(p, 2).kappa[0] == 0.5


def test_read_kappa_file_errors(tmp_path):
    empty = tmp_path / "e.txt"
    empty.write_text("")
    with pytest.raises(ValueError, match="no data"):
        read_kappa_file(empty)
    bad = tmp_path / "b.txt"
    bad.write_text("1.0 0.3 0.4 0.5 0\n2.0 x 0.4 0.5 0\n")
    with pytest.raises(ValueError, match=":2:"):
        read_kappa_file(bad)
    short = tmp_path / "s.txt"
    short.write_text("1.0 0.3\n")
    with pytest.raises(ValueError, match="5 columns"):
        read_kappa_file(short)
    big = tmp_path / "big.txt"
    big.write_text("".join(f"{1 + i * 0.01} 0.3 0.3 0.3 0\n" for i in range(JMAX_MAX + 1)))
    with pytest.raises(ValueError, match="more than"):
        read_kappa_file(big)
    with pytest.raises(ValueError):
        read_kappa_file(empty, column=3)
