"""Solver configuration with the reference program's constants as defaults."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields, replace

from .atmosphere import BoundaryConfig
from .special_functions import C_SUN, T_SUN


# numerics of the reference program
LISTING_NUMERICS = dict(
    quadrature="sampled",
    dt_rule="listing",
    expint_method="listing",
    profile_offset=True,
    bottom_s2_listing=True,
)


@dataclass(frozen=True)
class SolverConfig:
    # depth grid
    n_tau: int = 60
    H: float = 12.0
    # outer fixed point
    k_max: int = 16
    tol: float | None = None
    T_init: float = 0.0
    # sun
    T_sun: float = T_SUN
    C_sun: float = C_SUN
    boundary: BoundaryConfig = field(default_factory=BoundaryConfig)
    # scattering
    a_is: float = 0.0
    a_rs: float = 0.0
    tm1_frac: float = 0.6
    tm2_frac: float = 0.9
    profile_offset: bool = False
    # depth quadrature: "exact" integrates each cell analytically,
    # "sampled" uses the left-point rule of step dt
    quadrature: str = "exact"
    dt: float = 0.005
    nt: int = 5
    dt_rule: str = "min_steps"
    expint_method: str = "series"
    # kappa floor used for the boundary source terms
    kappa_source_floor: float = 0.01
    bottom_s2_listing: bool = False
    # thermal balance
    eps_dycho: float = 0.01
    eps_newton: float = 1e-12
    newton_max: int = 50
    # Newton evaluates b at cell midpoints in frequency; False uses the nodes,
    # which matches the frequencies of the emission term
    newton_midpoint: bool = True
    balance_scattering_weights: bool = False

    def __post_init__(self):
        if self.n_tau < 2:
            raise ValueError("n_tau must be at least 2")
        if self.k_max < 1:
            raise ValueError("k_max must be positive")
        if self.quadrature not in ("exact", "sampled"):
            raise ValueError(f"unknown quadrature {self.quadrature!r}")
        if self.dt_rule not in ("min_steps", "listing"):
            raise ValueError(f"unknown dt_rule {self.dt_rule!r}")
        if self.expint_method not in ("series", "listing"):
            raise ValueError(f"unknown expint_method {self.expint_method!r}")
        if self.dt <= 0 or self.nt < 1:
            raise ValueError("dt and nt must be positive")

    @classmethod
    def listing_compatible(cls, **overrides) -> "SolverConfig":
        """Configuration reproducing the reference program's numerics."""
        base = dict(LISTING_NUMERICS)
        base.update(overrides)
        return cls(**base)

    def with_boundary(self, **kw) -> "SolverConfig":
        return replace(self, boundary=replace(self.boundary, **kw))

    def step(self, t_lo: float, t_hi: float) -> float:
        """Depth step of the sampled quadrature on [t_lo, t_hi]."""
        if self.dt_rule == "listing":
            return min(self.dt, self.nt / (t_hi - t_lo))
        return min(self.dt, (t_hi - t_lo) / self.nt)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["boundary"]["albedo_levels"] = [list(x) for x in self.boundary.albedo_levels]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SolverConfig":
        d = dict(d)
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "boundary" in d and isinstance(d["boundary"], dict):
            d["boundary"] = BoundaryConfig(**d["boundary"])
        return cls(**d)
