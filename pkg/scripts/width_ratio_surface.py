"""Relative post-measurement width over (pointer width, initial width), plus critical widths.

    python scripts/width_ratio_surface.py [--num 60] [--out results/width_ratio_surface.csv]
"""

import argparse
import pathlib

from pointer_tof import io, reference_setup
from pointer_tof.sweep import width_ratio_surface_spec, find_critical_width, run_sweep


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--num", type=int, default=60, help="points per axis")
    parser.add_argument("--out", default="results/width_ratio_surface.csv")
    args = parser.parse_args()

    spec = width_ratio_surface_spec(args.num, args.num)
    result = run_sweep(spec)
    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(io.csv_text(["dp", "dP0", "width_ratio"], result.rows, {"setup": spec.base.to_dict()}))
    below = (result.rows[:, 2] < 1.0).mean()
    print(f"{100 * below:.1f}% of the grid lies below the critical plane")

    crit_rows = [(dp, find_critical_width(reference_setup(), dp=dp)) for dp in (1.0, 10.0, 30.0, 60.0)]
    crit = out.with_name(out.stem + "_critical.csv")
    crit.write_text(io.csv_text(["dp", "critical_dP0"], crit_rows, {"setup": spec.base.to_dict()}))
    for dp, w in crit_rows:
        print(f"dp = {dp:5.1f}: critical dP0 = {w:.4f}")
    print(f"wrote {out} and {crit}")


if __name__ == "__main__":
    main()
