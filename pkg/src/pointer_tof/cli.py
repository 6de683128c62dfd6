"""Command-line front end.

    pointer-tof simulate CONFIG.json [--out PATH] [--format json|csv] [--setup.kappa 2 ...]

Any scalar field of the config can be overridden with a flag named by its
dotted path. Exit codes: 0 success, 2 validation error, 3 numerical-contract
violation, 4 oracle mismatch.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import List, Optional

import numpy as np

from . import io
from .config import COMMANDS, RunConfig, apply_overrides, parse_scalar
from .errors import ContractViolationError, InvalidParameterError
from .dynamics import propagate
from .oracle import GridSpec, conditioned_density_grid, init_grid, oracle_check, propagate_grid, traced_density_grid
from .phasespace import LABELS
from .sweep import SweepAxis, SweepSpec, optimize_width_ratio, run_sweep
from .tof import condition_on_tof, distribution_samples, gaussian_density, tof_expectation

EXIT_OK, EXIT_VALIDATION, EXIT_CONTRACT, EXIT_ORACLE = 0, 2, 3, 4


class UsageError(InvalidParameterError):
    pass


def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def cmd_simulate(cfg: RunConfig):
    setup = cfg.setup
    state = propagate(setup)
    report = {"config": cfg.to_dict(), "labels": list(LABELS), "mean": state.mean, "cov": state.cov}
    warnings = []
    if setup.kappa == 0.0:
        warnings.append("kappa = 0: degenerate ToF functional, tof_expectation omitted")
        _warn(warnings[-1])
    else:
        report["tof_expectation"] = tof_expectation(setup, state=state)
    report["var_pt"] = state.variance("P")
    report["warnings"] = warnings
    if cfg.format == "csv":
        raise UsageError("simulate: only --format json is supported")
    return io.dumps(report), EXIT_OK


def _default_density_grid(setup, result) -> np.ndarray:
    width = 8.0 * math.sqrt(result.var_pt)
    return np.linspace(setup.P0 - width, setup.P0 + width, 801)


def cmd_condition(cfg: RunConfig):
    setup, block = cfg.setup, cfg.block
    result = condition_on_tof(setup, block.p_out)
    if cfg.format == "csv":
        grid = np.asarray(block.densities) if block.densities is not None else _default_density_grid(setup, result)
        dens = distribution_samples(setup, grid, block.p_out)
        rows = np.column_stack([dens.grid, dens.initial, dens.traced, dens.conditioned])
        return io.csv_text(["P", "initial", "traced", "conditioned"], rows, cfg.to_dict()), EXIT_OK
    report = {"config": cfg.to_dict(), "result": result.to_dict()}
    if block.densities is not None:
        dens = distribution_samples(setup, block.densities, block.p_out)
        report["densities"] = {"P": dens.grid, "initial": dens.initial, "traced": dens.traced,
                               "conditioned": dens.conditioned}
    return io.dumps(report), EXIT_OK


def cmd_sweep(cfg: RunConfig):
    block = cfg.block
    spec = SweepSpec(cfg.setup, SweepAxis(block.axis1.name, block.axis1.values),
                     SweepAxis(block.axis2.name, block.axis2.values), block.quantity)
    result = run_sweep(spec, workers=block.workers)
    if cfg.format == "csv":
        return io.csv_text(["axis1", "axis2", "value"], result.rows, cfg.to_dict()), EXIT_OK
    report = {"config": cfg.to_dict(), "axis1": block.axis1.name, "axis2": block.axis2.name,
              "quantity": block.quantity, "rows": result.rows}
    return io.dumps(report), EXIT_OK


def cmd_oracle_check(cfg: RunConfig):
    setup, block = cfg.setup, cfg.block
    if block.half_width is not None:
        spec = GridSpec(block.n, block.half_width, block.dt)
    else:
        spec = GridSpec.auto(setup, block.n, block.sigmas, block.dt)
    report = oracle_check(setup, spec, block.p_out, block.tolerance)
    if block.dump is not None:
        _dump_oracle_densities(setup, spec, block, report)
    payload = {"config": cfg.to_dict(), "grid": {"n": spec.n, "half_width": list(spec.half_width)},
               **report.to_dict()}
    if cfg.format == "csv":
        rows = [(i, err) for i, err in enumerate(list(report.mean_errors.values()) + list(report.cov_errors.values()))]
        text = io.csv_text(["moment", "relative_error"], rows, cfg.to_dict())
    else:
        text = io.dumps(payload)
    return text, EXIT_OK if report.passed else EXIT_ORACLE


def _dump_oracle_densities(setup, spec, block, report) -> None:
    final = propagate_grid(init_grid(setup, spec), setup)
    p_out = report.conditioned[0]["p_out"]
    P, traced = traced_density_grid(final)
    _, cond = conditioned_density_grid(final, setup, p_out)
    state = propagate(setup)
    exact = condition_on_tof(setup, p_out, state=state)
    rows = np.column_stack([P, traced, gaussian_density(P, state.mean_of("P"), state.variance("P")),
                            cond, gaussian_density(P, exact.p_c, exact.var_pc)])
    meta = {"setup": setup.to_dict(), "n": spec.n, "p_out": p_out}
    with open(block.dump, "w") as fh:
        fh.write(io.csv_text(["P", "grid_traced", "engine_traced", "grid_conditioned", "engine_conditioned"],
                             rows, meta))


def cmd_optimize(cfg: RunConfig):
    block = cfg.block
    result = optimize_width_ratio(cfg.setup, block.bounds(), block.grid_points, block.rtol)
    if cfg.format == "csv":
        names = [name for name, _, _ in block.free]
        rows = [[params[n] for n in names] + [ratio] for params, ratio in result.trace]
        return io.csv_text(names + ["ratio"], rows, cfg.to_dict()), EXIT_OK
    report = {"config": cfg.to_dict(), "best_setup": result.setup.to_dict(), "best_ratio": result.ratio,
              "evaluations": result.evaluations,
              "trace": [{"params": params, "ratio": ratio} for params, ratio in result.trace]}
    return io.dumps(report), EXIT_OK


HANDLERS = {"simulate": cmd_simulate, "condition": cmd_condition, "sweep": cmd_sweep,
            "oracle-check": cmd_oracle_check, "optimize": cmd_optimize}


def _parse_overrides(extra: List[str]):
    pairs = []
    i = 0
    while i < len(extra):
        token = extra[i]
        if not token.startswith("--") or len(token) <= 2:
            raise UsageError(f"unexpected argument {token!r}")
        key = token[2:]
        if "=" in key:
            key, value = key.split("=", 1)
        else:
            if i + 1 >= len(extra):
                raise UsageError(f"--{key}: missing value")
            i += 1
            value = extra[i]
        pairs.append((key, parse_scalar(value)))
        i += 1
    return pairs


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pointer-tof", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("config", help="JSON configuration file")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=("json", "csv"))
    return parser


def load_config(command: str, path: str, extra: List[str], out: Optional[str], fmt: Optional[str]) -> RunConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed config {path!r}: {exc.msg} at line {exc.lineno} column {exc.colno}") from None
    overrides = _parse_overrides(extra)
    if out is not None:
        overrides.append(("output.path", out))
    if fmt is not None:
        overrides.append(("output.format", fmt))
    if not isinstance(data, dict):
        raise UsageError(f"malformed config {path!r}: top level must be an object")
    return RunConfig.from_dict(apply_overrides(data, overrides), command)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    try:
        cfg = load_config(args.command, args.config, extra, args.out, args.format)
        text, code = HANDLERS[args.command](cfg)
    except InvalidParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ContractViolationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    if cfg.output.path:
        with open(cfg.output.path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
