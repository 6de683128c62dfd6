"""Minimize dP_c/dP0 over apparatus parameters at dP0=150.

    python scripts/optimize_apparatus.py [--out results/optimize.csv]
"""

import argparse
import pathlib

from pointer_tof import io, reference_setup, width_ratio
from pointer_tof.sweep import optimize_width_ratio

SEARCHES = (
    {"kappa": (0.1, 5.0)},
    {"kappa": (0.1, 5.0), "dp": (1.0, 60.0)},
    {"kappa": (0.1, 5.0), "dp": (1.0, 60.0), "T": (2.0, 10.0)},
)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results/optimize.csv")
    args = parser.parse_args()

    base = reference_setup(dP0=150.0, dp=30.0)
    print(f"fixed apparatus: ratio {width_ratio(base):.5f}")
    rows = []
    for i, free in enumerate(SEARCHES):
        result = optimize_width_ratio(base, free)
        s = result.setup
        rows.append((i, s.kappa, s.dp1, s.T, result.ratio, result.evaluations))
        print(f"free {sorted(free)}: ratio {result.ratio:.5f} at kappa={s.kappa:.4f} dp={s.dp1:.3f} "
              f"T={s.T:.3f} ({result.evaluations} evaluations)")
    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(io.csv_text(["search", "kappa", "dp", "T", "ratio", "evaluations"], rows,
                               {"setup": base.to_dict()}))
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
