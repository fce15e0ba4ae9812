import numpy as np
import pytest

from stratrad import experiments as ex
from stratrad.config import SolverConfig
from stratrad.solver_driver import energy_identity_check, fixed_point_solve, gauss_half
from stratrad.spectral_grid import build_wavelength_uniform, kappa_banded


def test_gauss_half_integrates_polynomials():
    mu, w = gauss_half(64)
    assert np.sum(w) == pytest.approx(1.0)
    assert np.sum(w * mu) == pytest.approx(0.5)
    assert np.all((mu > 0) & (mu < 1))


def test_report_lengths_and_text(small_spectral, small_cfg):
    sol = fixed_point_solve(small_spectral, small_cfg)
    r = sol.report
    assert r.iterations == small_cfg.k_max
    assert len(r.norm_J) == len(r.sup_diff_T) == len(r.probe_T) == r.iterations
    text = r.to_text()
    assert text.count("\n") == r.iterations + 1
    assert "wall_time" not in text and "wall_time" in r.to_text(timing=True)


def test_fixed_point_contracts(small_spectral, small_cfg):
    sol = fixed_point_solve(small_spectral, SolverConfig(n_tau=12, k_max=20).with_boundary(earth_albedo=0.0))
    d = np.array(sol.report.sup_diff_T[3:])
    assert np.all(d[1:] < d[:-1])
    assert d[-1] < 1e-6


def test_tolerance_stops_early(small_spectral):
    cfg = SolverConfig(n_tau=12, k_max=50, tol=1e-5)
    sol = fixed_point_solve(small_spectral, cfg)
    assert sol.report.iterations < 50
    assert sol.report.final_sup_diff < 1e-5


def test_deterministic(small_spectral, small_cfg):
    a = fixed_point_solve(small_spectral, small_cfg)
    b = fixed_point_solve(small_spectral, small_cfg)
    assert a.T.tobytes() == b.T.tobytes()
    assert a.report.to_text() == b.report.to_text()


def test_grey_profile_shape(grey_solution):
    T = grey_solution.T
    assert np.all(np.diff(T[1:]) < 0)
    assert 0.07 < T[-1] < T[1] < 0.09
    assert grey_solution.report.final_sup_diff < 1e-6
    assert not grey_solution.report.flagged


def test_energy_identity_default(grey_solution):
    assert energy_identity_check(grey_solution) < 0.05


def test_energy_identity_converges_with_consistent_balance():
    res = []
    for n in (20, 40, 80):
        cfg = ex.grey_config(SolverConfig(n_tau=n, newton_midpoint=False))
        res.append(energy_identity_check(fixed_point_solve(build_wavelength_uniform(), cfg)))
    assert res[0] > res[1] > res[2]


def test_energy_identity_rejects_non_grey(small_spectral):
    sp = small_spectral.with_kappa(kappa_banded(small_spectral.nu, 0.1, 0.4, 0, 1))
    sol = fixed_point_solve(sp, SolverConfig(n_tau=8, k_max=2))
    with pytest.raises(ValueError):
        energy_identity_check(sol)
    sol = fixed_point_solve(small_spectral, SolverConfig(n_tau=8, k_max=2, a_is=0.3))
    with pytest.raises(ValueError):
        energy_identity_check(sol)


def test_scattering_run_is_finite(small_spectral):
    cfg = SolverConfig(n_tau=20, k_max=6, a_is=0.4, a_rs=0.3)
    sol = fixed_point_solve(small_spectral, cfg)
    assert np.all(np.isfinite(sol.T)) and np.all(sol.T > 0)


def test_listing_numerics_close_to_default(small_spectral):
    a = fixed_point_solve(small_spectral, SolverConfig(n_tau=20, k_max=8))
    b = fixed_point_solve(small_spectral, SolverConfig.listing_compatible(n_tau=20, k_max=8))
    assert np.max(np.abs(a.T - b.T) / a.T) < 0.02


def test_config_roundtrip():
    cfg = SolverConfig(n_tau=30).with_boundary(albedo_levels=((0.2, 0.1),))
    again = SolverConfig.from_dict(cfg.to_dict())
    assert again == cfg
    with pytest.raises(ValueError, match="unknown"):
        SolverConfig.from_dict({"bogus": 1})
    with pytest.raises(ValueError):
        SolverConfig(quadrature="simpson")
