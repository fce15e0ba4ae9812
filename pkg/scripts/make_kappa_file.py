"""Write a five-column absorption file for ``stratrad solve``.

Columns: nu, grey 0.5, the two-level band 0.5 (0.1 + 1_{nu<3}), a narrow
band 0.5 (0.1 + 1_{nu<0.2}), and an unused zero column, on the default
frequency grid.
"""

import argparse

import numpy as np

from stratrad import experiments as ex
from stratrad.spectral_grid import build_wavelength_uniform, kappa_banded


def main(path: str):
    nu = build_wavelength_uniform().nu
    cols = (
        nu,
        np.full_like(nu, ex.KAPPA_GREY),
        kappa_banded(nu, **ex.TWO_LEVEL_KAPPA),
        kappa_banded(nu, **ex.PROP2_KAPPA),
        np.zeros_like(nu),
    )
    np.savetxt(path, np.column_stack(cols), fmt="%.10g", delimiter="\t")
    print(f"wrote {len(nu)} lines to {path}")


if __name__ == "__main__":
    p = argparse.ArgumentParser()
    p.add_argument("path", nargs="?", default="kappa.txt")
    main(p.parse_args().path)
