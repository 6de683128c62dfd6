"""Gradient d over (pointer width, initial width) on the reference apparatus.

    python scripts/gradient_surface.py [--num 60] [--out results/gradient_surface.csv]
"""

import argparse
import pathlib

from pointer_tof import io
from pointer_tof.sweep import gradient_surface_spec, run_sweep


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--num", type=int, default=60, help="points per axis")
    parser.add_argument("--out", default="results/gradient_surface.csv")
    args = parser.parse_args()

    spec = gradient_surface_spec(args.num, args.num)
    result = run_sweep(spec)
    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(io.csv_text(["dp", "dP0", "d"], result.rows, {"setup": spec.base.to_dict()}))
    grid = result.grid()
    print(f"d ranges over [{grid.min():.3e}, {grid.max():.3e}]")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
