"""Runs behind the command line: the four numerical studies plus a generic solve.

Every ``run_*`` function returns its data as arrays and, when ``outdir`` is
given, writes header-free tab separated files of the form
``altitude<TAB>value...`` for depth nodes i >= 1.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import dual as dn
from .atmosphere import OpticalGrid, build_grid
from .config import SolverConfig
from .sensitivity import sensitivity_run, sign_criterion, switch_points
from .solver_driver import Solution, fixed_point_solve
from .spectral_grid import SpectralGrid, build_wavelength_uniform, kappa_banded, kappa_from_file

FMT = "%.12g"

# absorption used in each study
KAPPA_GREY = 0.5
TWO_LEVEL_KAPPA = dict(base=0.05, step=0.5, nu_lo=0.0, nu_hi=3.0)  # 0.5 (0.1 + 1_{nu<3})
PROP2_KAPPA = dict(base=0.05, step=0.5, nu_lo=0.0, nu_hi=0.2)  # 0.5 (0.1 + 1_{nu<0.2})
ALBEDO_KAPPA = dict(base=0.05, step=0.5, nu_lo=0.0, nu_hi=6.0)  # 0.5 (1_{nu<6} + 0.1)
SENSITIVITY_BANDS = {"case0": (0.2, 0.3), "case1": (0.3, 0.4), "case2": (0.6, 0.8)}


def grey_config(cfg: SolverConfig | None = None) -> SolverConfig:
    """Ground albedo 0.3 and the sun entering at the ground as mu Q0."""
    cfg = cfg or SolverConfig()
    return cfg.with_boundary(earth_albedo=0.3, alpha_bottom=1.0, bottom_plain=True)


def perturbation_config(cfg: SolverConfig | None = None) -> SolverConfig:
    """I(0, mu) = mu Q0, nothing from the top, no ground reflection."""
    cfg = cfg or SolverConfig()
    return cfg.with_boundary(earth_albedo=0.0, alpha_bottom=1.0, bottom_plain=True, albedo_levels=())


# ---------------------------------------------------------------- file io

def write_tsv(path, columns) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    with open(path, "w", newline="\n") as fh:
        for row in data:
            fh.write("\t".join(FMT % v for v in row) + "\n")
    return path


def read_tsv(path) -> np.ndarray:
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rows.append([float(x) for x in line.split("\t")])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    if rows and len({len(r) for r in rows}) != 1:
        raise ValueError(f"{path}: ragged rows")
    return np.array(rows, dtype=float).reshape(len(rows), -1)


def profile_columns(sol: Solution):
    return sol.altitude[1:], np.asarray(dn.value(sol.T))[1:]


# ---------------------------------------------------------------- studies

def run_grey(cfg: SolverConfig | None = None, outdir=None, spectral: SpectralGrid | None = None) -> Solution:
    cfg = grey_config(cfg)
    spectral = spectral or build_wavelength_uniform(kappa=KAPPA_GREY)
    sol = fixed_point_solve(spectral, cfg)
    if outdir is not None:
        write_tsv(Path(outdir) / "grey.txt", profile_columns(sol))
    return sol


@dataclass
class Prop2Result:
    solutions: dict

    def gap(self, a: str, b: str) -> float:
        Ta = dn.value(self.solutions[a].T)
        Tb = dn.value(self.solutions[b].T)
        return float(np.max(np.abs(Ta - Tb)))

    @property
    def ratio(self) -> float:
        """max|T4 - T5| / max|T1 - T2|."""
        return self.gap("T4", "T5") / self.gap("T1", "T2")


def prop2_cases(cfg: SolverConfig | None = None) -> dict:
    """(spectral grid, config) for T0..T5."""
    cfg = perturbation_config(cfg)
    base = build_wavelength_uniform()
    nu = base.nu
    two_level = base.with_kappa(kappa_banded(nu, **TWO_LEVEL_KAPPA))
    band = base.with_kappa(kappa_banded(nu, **PROP2_KAPPA))
    top = cfg.with_boundary(alpha_bottom=0.0, bottom_plain=False)
    attenuated = cfg.with_boundary(alpha_bottom=1.0, bottom_plain=False)
    plain = cfg.with_boundary(alpha_bottom=1.0, bottom_plain=True)
    hot = 2 * cfg.T_sun
    return {
        "T0": (base.with_kappa(KAPPA_GREY), grey_config(cfg)),
        "T1": (two_level, top),
        "T2": (two_level, attenuated),
        "T3": (two_level, plain),
        "T4": (band, replace(top, T_sun=hot)),
        "T5": (band, replace(attenuated, T_sun=hot)),
    }


def run_prop2(cfg: SolverConfig | None = None, outdir=None) -> Prop2Result:
    sols = {name: fixed_point_solve(sp, c) for name, (sp, c) in prop2_cases(cfg).items()}
    if outdir is not None:
        for name, sol in sols.items():
            write_tsv(Path(outdir) / f"prop2_{name}.txt", profile_columns(sol))
    return Prop2Result(sols)


def albedo_cases(cfg: SolverConfig | None = None) -> dict:
    cfg = perturbation_config(cfg)
    spectral = build_wavelength_uniform()
    spectral = spectral.with_kappa(kappa_banded(spectral.nu, **ALBEDO_KAPPA))
    return {
        "T_Q0": (spectral, cfg.with_boundary(source_scale=1.0)),
        "T_07Q0": (spectral, cfg.with_boundary(source_scale=0.7)),
        "T_prime": (spectral, cfg.with_boundary(earth_albedo=0.3, bottom_plain=False, source_scale=1 / 0.7)),
        "T_second": (spectral, cfg.with_boundary(earth_albedo=0.3, bottom_plain=True)),
    }


def run_albedo(cfg: SolverConfig | None = None, outdir=None) -> dict:
    sols = {name: fixed_point_solve(sp, c) for name, (sp, c) in albedo_cases(cfg).items()}
    if outdir is not None:
        for name, sol in sols.items():
            write_tsv(Path(outdir) / f"albedo_{name}.txt", profile_columns(sol))
    return sols


def run_signmap(cfg: SolverConfig | None = None, outdir=None, z_max: float = 6.0, nu_max: float = 3.0):
    sol = run_grey(cfg)
    signs = sign_criterion(sol)
    along_nu, along_z = switch_points(signs, sol.spectral.nu, sol.altitude, z_max=z_max, nu_max=nu_max)
    if outdir is not None:
        for name, pts in (("switch_nu.txt", along_nu), ("switch_z.txt", along_z)):
            arr = np.array(pts, dtype=float).reshape(-1, 2)
            write_tsv(Path(outdir) / name, (arr[:, 0], arr[:, 1]))
    return along_nu, along_z, sol


def run_sensitivity(cfg: SolverConfig | None = None, outdir=None) -> dict:
    """T' for the three bands; columns altitude, 0, case1, case2, case0."""
    cfg = perturbation_config(cfg)
    spectral = build_wavelength_uniform(kappa=KAPPA_GREY)
    out, alt = {}, None
    for name, (nu1, nu2) in SENSITIVITY_BANDS.items():
        dT, sol = sensitivity_run(nu1, nu2, spectral, cfg, base=KAPPA_GREY)
        out[name] = dT
        alt = sol.altitude
    out["altitude"] = alt
    if outdir is not None:
        write_tsv(
            Path(outdir) / "derivative.txt",
            (alt[1:], np.zeros(len(alt) - 1), out["case1"][1:], out["case2"][1:], out["case0"][1:]),
        )
    return out


# ---------------------------------------------------------------- altitude dependent absorption

def bump_grid(grid: OpticalGrid, y: float = 2.0, delta: float = 0.05) -> OpticalGrid:
    """Depth grid at the same altitudes for the density factor r(z) = 1 + delta 1_cell(z).

    tau(z) = int_0^z r(s) e^{-s} ds; the bump covers the single altitude cell
    containing ``y``.
    """
    z = grid.altitude
    k = int(np.searchsorted(z, y, side="right") - 1)
    lo, hi = z[k], z[k + 1]
    covered_hi = np.clip(z, lo, hi)
    extra = delta * (np.exp(-lo) - np.exp(-covered_hi))
    return OpticalGrid(tau=grid.tau + extra, altitude=z)


@dataclass
class Prop1Result:
    altitude: np.ndarray
    T: np.ndarray
    T_bumped: np.ndarray
    bump_node: int
    predicted: float
    checked: np.ndarray
    # unperturbed profile read off at the shifted depths tau'(z)
    T_remapped: np.ndarray | None = None

    @property
    def shift(self) -> np.ndarray:
        return self.T_bumped - self.T

    @property
    def max_shift_where_decreasing(self) -> float:
        return float(np.max(self.shift[self.checked])) if np.any(self.checked) else 0.0

    @property
    def sign_agrees(self) -> bool:
        return bool(np.sign(self.shift[self.bump_node]) == np.sign(self.predicted))


def run_prop1(cfg: SolverConfig | None = None, outdir=None, y: float = 2.0, delta: float = 0.05) -> Prop1Result:
    """Grey solve with and without a local density bump at altitude ``y``.

    The predictor 4 T^3(y) (delta r / r) dT/dz(y) is evaluated with a
    centered difference of the unperturbed profile and compared, in sign,
    with the shift at the first node above the bump cell (the lower node of
    the cell keeps its depth). ``T_remapped`` is T(tau'(z)) interpolated from
    the unperturbed solve, i.e. the response when the change of total depth
    is ignored.
    """
    cfg = grey_config(cfg)
    spectral = build_wavelength_uniform(kappa=KAPPA_GREY)
    grid = build_grid(cfg.n_tau, cfg.H)
    ref = fixed_point_solve(spectral, cfg, grid=grid)
    bumped = fixed_point_solve(spectral, cfg, grid=bump_grid(grid, y, delta))
    z = grid.altitude
    T = np.asarray(dn.value(ref.T))
    Tb = np.asarray(dn.value(bumped.T))
    k = int(np.searchsorted(z, y, side="right") - 1)
    dTdz = np.gradient(T, z)
    predicted = 4 * T[k] ** 3 * delta * dTdz[k]
    remapped = np.interp(bumped.grid.tau, grid.tau, T)
    # nodes i >= 1, as in the written profiles, where the profile decreases
    checked = np.zeros(len(T), dtype=bool)
    checked[1:] = dTdz[1:] < 0
    res = Prop1Result(
        altitude=z, T=T, T_bumped=Tb, bump_node=k + 1, predicted=float(predicted), checked=checked, T_remapped=remapped
    )
    if outdir is not None:
        write_tsv(Path(outdir) / "prop1.txt", (z[1:], T[1:], Tb[1:], res.shift[1:]))
    return res


def run_solve(kappa_file, column: int = 0, cfg: SolverConfig | None = None, outdir=None) -> Solution:
    cfg = cfg or SolverConfig()
    sol = fixed_point_solve(kappa_from_file(kappa_file, column), cfg)
    if outdir is not None:
        write_tsv(Path(outdir) / f"temperature{column}.txt", profile_columns(sol))
    return sol


def ensure_dir(path) -> Path:
    p = Path(path)
    os.makedirs(p, exist_ok=True)
    return p
