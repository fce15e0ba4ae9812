"""Command line front end.

    stratrad grey|prop2|albedo|signmap|sensitivity|prop1 [options]
    stratrad solve KAPPA_FILE [--column N] [options]

Configuration precedence is command line flag, then ``--config`` JSON file,
then the built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import dual as dn
from . import experiments as ex
from .config import LISTING_NUMERICS, SolverConfig

log = logging.getLogger("stratrad")

# flag name -> (config field, type); boundary fields are prefixed "boundary."
FLAGS = {
    "n-tau": ("n_tau", int),
    "H": ("H", float),
    "k-max": ("k_max", int),
    "tol": ("tol", float),
    "T-init": ("T_init", float),
    "T-sun": ("T_sun", float),
    "C-sun": ("C_sun", float),
    "a-is": ("a_is", float),
    "a-rs": ("a_rs", float),
    "tm1-frac": ("tm1_frac", float),
    "tm2-frac": ("tm2_frac", float),
    "dt": ("dt", float),
    "nt": ("nt", int),
    "kappa-source-floor": ("kappa_source_floor", float),
    "eps-dycho": ("eps_dycho", float),
    "eps-newton": ("eps_newton", float),
    "newton-max": ("newton_max", int),
    "earth-albedo": ("boundary.earth_albedo", float),
    "alpha-bottom": ("boundary.alpha_bottom", float),
    "source-scale": ("boundary.source_scale", float),
    "T-e": ("boundary.T_e", float),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file with solver settings")
    common.add_argument("--outdir", type=Path, default=Path("."), help="directory for output files")
    common.add_argument("--strict", action="store_true", help="reproduce the reference program's numerics")
    common.add_argument("--timing", action="store_true", help="print wall time")
    common.add_argument("-v", "--verbose", action="store_true")
    common.add_argument("--bottom-plain", dest="bottom_plain", action="store_true", default=None)
    common.add_argument("--bottom-attenuated", dest="bottom_plain", action="store_false")
    for flag, (_, typ) in FLAGS.items():
        common.add_argument(f"--{flag}", type=typ, default=None)

    p = argparse.ArgumentParser(prog="stratrad", description="Stratified radiative transfer solver")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("grey", "grey atmosphere, kappa = 0.5"),
        ("prop2", "top versus ground sunlight boundary conditions"),
        ("albedo", "ground albedo versus reduced sunlight"),
        ("signmap", "sign changes of J - b"),
        ("sensitivity", "temperature derivative for three absorption bands"),
        ("prop1", "local increase of the air density"),
    ]:
        sub.add_parser(name, parents=[common], help=help_)
    s = sub.add_parser("solve", parents=[common], help="solve with absorption read from a file")
    s.add_argument("kappa_file", type=Path)
    s.add_argument("--column", type=int, default=0, choices=(0, 1, 2))
    return p


def resolve_config(args) -> SolverConfig:
    data = {}
    if args.config is not None:
        with open(args.config) as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError(f"{args.config}: expected a JSON object")
    boundary = dict(data.pop("boundary", {}) or {})
    for flag, (name, _) in FLAGS.items():
        v = getattr(args, flag.replace("-", "_"))
        if v is None:
            continue
        if name.startswith("boundary."):
            boundary[name.split(".", 1)[1]] = v
        else:
            data[name] = v
    if args.bottom_plain is not None:
        boundary["bottom_plain"] = args.bottom_plain
    if args.strict:
        data = {**LISTING_NUMERICS, **data}
    cfg = SolverConfig.from_dict(data)
    if boundary:
        cfg = cfg.with_boundary(**boundary)
    return cfg


def _flagged(*sols) -> list:
    return [f for s in sols for f in s.report.flagged]


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
        out = ex.ensure_dir(args.outdir)
        flagged = []
        if args.command == "grey":
            sol = ex.run_grey(cfg, out)
            sys.stdout.write(sol.report.to_text(args.timing))
            flagged = _flagged(sol)
        elif args.command == "prop2":
            res = ex.run_prop2(cfg, out)
            print(f"max|T1-T2|\t{res.gap('T1', 'T2'):.6g}")
            print(f"max|T4-T5|\t{res.gap('T4', 'T5'):.6g}")
            print(f"ratio\t{res.ratio:.6g}")
            flagged = _flagged(*res.solutions.values())
        elif args.command == "albedo":
            sols = ex.run_albedo(cfg, out)
            ref = dn.value(sols["T_Q0"].T)
            for name, sol in sols.items():
                d = dn.value(sol.T) - ref
                print(f"{name}\tmin(T-T_Q0)={d.min():.6g}\tmax(T-T_Q0)={d.max():.6g}")
            flagged = _flagged(*sols.values())
        elif args.command == "signmap":
            along_nu, along_z, sol = ex.run_signmap(cfg, out)
            print(f"switch points along nu: {len(along_nu)}, along z: {len(along_z)}")
            flagged = _flagged(sol)
        elif args.command == "sensitivity":
            res = ex.run_sensitivity(cfg, out)
            for name, (nu1, nu2) in ex.SENSITIVITY_BANDS.items():
                d = res[name]
                print(f"{name} ({nu1}, {nu2})\tmin={d.min():.6g}\tmax={d.max():.6g}")
        elif args.command == "prop1":
            res = ex.run_prop1(cfg, out)
            print(f"max shift where T decreases\t{res.max_shift_where_decreasing:.6g}")
            print(f"shift at bump\t{res.shift[res.bump_node]:.6g}\tpredicted\t{res.predicted:.6g}")
        elif args.command == "solve":
            sol = ex.run_solve(args.kappa_file, args.column, cfg, out)
            sys.stdout.write(sol.report.to_text(args.timing))
            flagged = _flagged(sol)
    except (ValueError, OSError, FloatingPointError, json.JSONDecodeError) as exc:
        print(f"stratrad: error: {exc}", file=sys.stderr)
        return 2
    if flagged:
        print(f"stratrad: Newton did not converge at (iteration, node) {flagged}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
