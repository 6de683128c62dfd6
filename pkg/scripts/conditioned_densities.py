"""Initial, traced and conditioned momentum densities for dP0=150, dp=30.

    python scripts/conditioned_densities.py [--p-out 100] [--out results/conditioned_densities.csv]
"""

import argparse
import math
import pathlib

import numpy as np

from pointer_tof import condition_on_tof, distribution_samples, io, reference_setup


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--p-out", type=float, default=None, help="ToF readout (default: P0)")
    parser.add_argument("--out", default="results/conditioned_densities.csv")
    args = parser.parse_args()

    setup = reference_setup(dP0=150.0, dp=30.0)
    p_out = setup.P0 if args.p_out is None else args.p_out
    result = condition_on_tof(setup, p_out)
    half = 5.0 * math.sqrt(result.var_pt)
    grid = np.linspace(setup.P0 - half, setup.P0 + half, 1001)
    dens = distribution_samples(setup, grid, p_out)
    rows = np.column_stack([dens.grid, dens.initial, dens.traced, dens.conditioned])
    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(io.csv_text(["P", "initial", "traced", "conditioned"], rows,
                               {"setup": setup.to_dict(), "p_out": p_out}))
    print(f"p_c = {result.p_c:.6f}, dP_T = {math.sqrt(result.var_pt):.4f}, "
          f"dP_c = {math.sqrt(result.var_pc):.4f}, dP_c/dP0 = {result.width_ratio:.5f}, d = {result.d:.6f}")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
