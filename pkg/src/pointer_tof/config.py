"""Run configuration: one JSON document, one active command block."""

from __future__ import annotations

import copy
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Optional, Tuple

import numpy as np

from .errors import InvalidParameterError
from .setup import ToFSetup

COMMANDS = ("simulate", "condition", "sweep", "oracle-check", "optimize")
BLOCK_KEYS = {"simulate": None, "condition": "condition", "sweep": "sweep",
              "oracle-check": "oracle", "optimize": "optimize"}
FORMATS = ("json", "csv")


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise InvalidParameterError(f"{where}: expected a finite number, got {value!r}")
    return float(value)


def _values(block: dict, where: str) -> Tuple[float, ...]:
    """Explicit ``values`` list or a ``start``/``stop``/``num`` linspace."""
    if not isinstance(block, dict):
        raise InvalidParameterError(f"{where}: expected an object")
    if "values" in block:
        vals = block["values"]
        if not isinstance(vals, list):
            raise InvalidParameterError(f"{where}.values: expected a list")
        return tuple(_number(v, f"{where}.values") for v in vals)
    try:
        start, stop, num = block["start"], block["stop"], block["num"]
    except KeyError as exc:
        raise InvalidParameterError(f"{where}: need 'values' or start/stop/num (missing {exc})") from None
    if isinstance(num, bool) or not isinstance(num, int) or num < 1:
        raise InvalidParameterError(f"{where}.num: expected a positive integer, got {num!r}")
    return tuple(float(v) for v in np.linspace(_number(start, where), _number(stop, where), num))


def _check_keys(block: dict, allowed, where: str):
    if not isinstance(block, dict):
        raise InvalidParameterError(f"{where}: expected an object")
    unknown = set(block) - set(allowed)
    if unknown:
        raise InvalidParameterError(f"{where}: unknown key(s) {sorted(unknown)}")


@dataclass(frozen=True)
class ConditionBlock:
    p_out: float
    densities: Optional[Tuple[float, ...]] = None

    @classmethod
    def from_dict(cls, d: dict) -> "ConditionBlock":
        _check_keys(d, ("p_out", "densities"), "condition")
        if d.get("p_out") is None:
            raise InvalidParameterError("condition.p_out: required (the measured ToF value)")
        dens = d.get("densities")
        return cls(_number(d["p_out"], "condition.p_out"),
                   None if dens is None else _values(dens, "condition.densities"))

    def to_dict(self) -> dict:
        out: dict = {"p_out": self.p_out}
        if self.densities is not None:
            out["densities"] = {"values": list(self.densities)}
        return out


@dataclass(frozen=True)
class AxisBlock:
    name: str
    values: Tuple[float, ...]

    @classmethod
    def from_dict(cls, d: dict, where: str) -> "AxisBlock":
        if not isinstance(d, dict) or not isinstance(d.get("name"), str):
            raise InvalidParameterError(f"{where}.name: required")
        vals = _values({k: v for k, v in d.items() if k != "name"}, where)
        if not vals:
            raise InvalidParameterError(f"{where}: empty value list")
        return cls(d["name"], vals)

    def to_dict(self) -> dict:
        return {"name": self.name, "values": list(self.values)}


@dataclass(frozen=True)
class SweepBlock:
    axis1: AxisBlock
    axis2: AxisBlock
    quantity: str = "gradient_d"
    workers: int = 1

    @classmethod
    def from_dict(cls, d: dict) -> "SweepBlock":
        _check_keys(d, ("axis1", "axis2", "quantity", "workers"), "sweep")
        for key in ("axis1", "axis2"):
            if key not in d:
                raise InvalidParameterError(f"sweep.{key}: required")
        workers = d.get("workers", 1)
        if isinstance(workers, bool) or not isinstance(workers, int) or workers < 1:
            raise InvalidParameterError(f"sweep.workers: expected a positive integer, got {workers!r}")
        return cls(AxisBlock.from_dict(d["axis1"], "sweep.axis1"), AxisBlock.from_dict(d["axis2"], "sweep.axis2"),
                   str(d.get("quantity", "gradient_d")), workers)

    def to_dict(self) -> dict:
        return {"axis1": self.axis1.to_dict(), "axis2": self.axis2.to_dict(),
                "quantity": self.quantity, "workers": self.workers}


@dataclass(frozen=True)
class OracleBlock:
    n: int = 128
    half_width: Optional[Tuple[float, float, float]] = None
    sigmas: float = 7.0
    dt: Optional[float] = None
    p_out: Optional[Tuple[float, ...]] = None
    dump: Optional[str] = None
    tolerance: float = 0.01

    @classmethod
    def from_dict(cls, d: dict) -> "OracleBlock":
        _check_keys(d, ("n", "half_width", "sigmas", "dt", "p_out", "dump", "tolerance"), "oracle")
        n = d.get("n", 128)
        if isinstance(n, bool) or not isinstance(n, int):
            raise InvalidParameterError(f"oracle.n: expected an integer, got {n!r}")
        hw = d.get("half_width")
        if hw is not None:
            if not isinstance(hw, list) or len(hw) != 3:
                raise InvalidParameterError("oracle.half_width: expected three numbers (X, x1, x2)")
            hw = tuple(_number(v, "oracle.half_width") for v in hw)
        p_out = d.get("p_out")
        if p_out is not None:
            p_out = (p_out,) if not isinstance(p_out, list) else p_out
            p_out = tuple(_number(v, "oracle.p_out") for v in p_out)
        dt = d.get("dt")
        dump = d.get("dump")
        if dump is not None and not isinstance(dump, str):
            raise InvalidParameterError("oracle.dump: expected a file path")
        return cls(n, hw, _number(d.get("sigmas", 7.0), "oracle.sigmas"),
                   None if dt is None else _number(dt, "oracle.dt"), p_out, dump,
                   _number(d.get("tolerance", 0.01), "oracle.tolerance"))

    def to_dict(self) -> dict:
        out = asdict(self)
        for key in ("half_width", "p_out"):
            if out[key] is not None:
                out[key] = list(out[key])
        return out


@dataclass(frozen=True)
class OptimizeBlock:
    free: Tuple[Tuple[str, float, float], ...] = ()
    grid_points: int = 8
    rtol: float = 1e-6

    @classmethod
    def from_dict(cls, d: dict) -> "OptimizeBlock":
        _check_keys(d, ("free", "grid_points", "rtol"), "optimize")
        free = d.get("free", {})
        if not isinstance(free, dict):
            raise InvalidParameterError("optimize.free: expected an object {name: [lo, hi]}")
        items = []
        for name, bounds in free.items():
            if not isinstance(bounds, list) or len(bounds) != 2:
                raise InvalidParameterError(f"optimize.free.{name}: expected [lo, hi]")
            items.append((name, _number(bounds[0], f"optimize.free.{name}"), _number(bounds[1], f"optimize.free.{name}")))
        gp = d.get("grid_points", 8)
        if isinstance(gp, bool) or not isinstance(gp, int):
            raise InvalidParameterError(f"optimize.grid_points: expected an integer, got {gp!r}")
        return cls(tuple(items), gp, _number(d.get("rtol", 1e-6), "optimize.rtol"))

    def bounds(self) -> dict:
        return {name: (lo, hi) for name, lo, hi in self.free}

    def to_dict(self) -> dict:
        return {"free": {name: [lo, hi] for name, lo, hi in self.free},
                "grid_points": self.grid_points, "rtol": self.rtol}


BLOCK_TYPES = {"condition": ConditionBlock, "sweep": SweepBlock, "oracle": OracleBlock, "optimize": OptimizeBlock}


@dataclass(frozen=True)
class OutputBlock:
    path: Optional[str] = None
    format: Optional[str] = None

    @classmethod
    def from_dict(cls, d: dict) -> "OutputBlock":
        _check_keys(d, ("path", "format"), "output")
        fmt = d.get("format")
        if fmt is not None and fmt not in FORMATS:
            raise InvalidParameterError(f"output.format: expected one of {FORMATS}, got {fmt!r}")
        path = d.get("path")
        if path is not None and not isinstance(path, str):
            raise InvalidParameterError("output.path: expected a string")
        return cls(path, fmt)

    def to_dict(self) -> dict:
        return {"path": self.path, "format": self.format}


@dataclass(frozen=True)
class RunConfig:
    command: str
    setup: ToFSetup
    block: Any = None
    output: OutputBlock = field(default_factory=OutputBlock)

    @classmethod
    def from_dict(cls, data: dict, command: str) -> "RunConfig":
        """Validate everything the command will use before any computation."""
        if command not in COMMANDS:
            raise InvalidParameterError(f"unknown command {command!r}")
        if not isinstance(data, dict):
            raise InvalidParameterError("config: top level must be a JSON object")
        if data.get("command", command) != command:
            raise InvalidParameterError(f"config was written for {data['command']!r}, not {command!r}")
        setup = ToFSetup.from_dict(data.get("setup", {}))
        key = BLOCK_KEYS[command]
        block = None
        if key is not None:
            raw = data.get(key)
            if raw is None:
                if key == "condition":
                    raise InvalidParameterError("condition.p_out: required (the measured ToF value)")
                if key == "sweep":
                    raise InvalidParameterError("sweep: block required (axis1, axis2)")
                raw = {}
            block = BLOCK_TYPES[key].from_dict(raw)
        return cls(command, setup, block, OutputBlock.from_dict(data.get("output", {})))

    def to_dict(self) -> dict:
        out = {"command": self.command, "setup": self.setup.to_dict()}
        key = BLOCK_KEYS[self.command]
        if key is not None:
            out[key] = self.block.to_dict()
        out["output"] = self.output.to_dict()
        return out

    @property
    def format(self) -> str:
        return self.output.format or ("csv" if self.command == "sweep" else "json")


def parse_scalar(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(data: dict, overrides) -> dict:
    """Set dotted paths (``setup.kappa`` -> data['setup']['kappa'])."""
    data = copy.deepcopy(data)
    for path, value in overrides:
        keys = path.split(".")
        node = data
        for key in keys[:-1]:
            child = node.get(key)
            if child is None:
                child = node[key] = {}
            elif not isinstance(child, dict):
                raise InvalidParameterError(f"--{path}: {key!r} is not an object")
            node = child
        node[keys[-1]] = value
    return data
