"""Parameter surfaces, critical-width search and apparatus optimization."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Sequence, Tuple

import numpy as np

from .errors import InfeasibleError, InvalidParameterError, NoCrossingError, ToFError
from .setup import PARAMETER_NAMES, ToFSetup
from .tof import gradient_d, width_ratio

QUANTITIES: Dict[str, Callable[[ToFSetup], float]] = {
    "gradient_d": gradient_d,
    "width_ratio": width_ratio,
}

OPTIMIZABLE = ("kappa", "t1", "t2", "T", "mass_ratio_1", "mass_ratio_2", "mass_ratio", "dp1", "dp2", "dp")

DEFAULT_DP = (1.0, 60.0)
DEFAULT_DP0 = (1.0, 300.0)


@dataclass(frozen=True)
class SweepAxis:
    name: str
    values: tuple

    def __post_init__(self):
        if self.name not in PARAMETER_NAMES:
            raise InvalidParameterError(f"sweep axis: unknown parameter {self.name!r}")
        values = tuple(float(v) for v in self.values)
        if not values:
            raise InvalidParameterError(f"sweep axis {self.name!r}: empty value list")
        if not all(math.isfinite(v) for v in values):
            raise InvalidParameterError(f"sweep axis {self.name!r}: non-finite value")
        object.__setattr__(self, "values", values)

    @classmethod
    def linspace(cls, name: str, start: float, stop: float, num: int) -> "SweepAxis":
        return cls(name, tuple(np.linspace(start, stop, num)))


@dataclass(frozen=True)
class SweepSpec:
    base: ToFSetup
    axis1: SweepAxis
    axis2: SweepAxis
    quantity: str = "gradient_d"

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise InvalidParameterError(f"quantity: expected one of {sorted(QUANTITIES)}, got {self.quantity!r}")

    def setups(self):
        """All grid setups in row-major order, validated up front."""
        out = []
        for v1, v2 in itertools.product(self.axis1.values, self.axis2.values):
            try:
                out.append(self.base.replace(**{self.axis1.name: v1}).replace(**{self.axis2.name: v2}))
            except InvalidParameterError as exc:
                raise InvalidParameterError(
                    f"invalid grid point ({self.axis1.name}={v1!r}, {self.axis2.name}={v2!r}): {exc}") from None
        return out


@dataclass(frozen=True, eq=False)
class SweepResult:
    spec: SweepSpec
    rows: np.ndarray  # (n, 3): axis1 value, axis2 value, quantity

    def grid(self) -> np.ndarray:
        return self.rows[:, 2].reshape(len(self.spec.axis1.values), len(self.spec.axis2.values))


def gradient_surface_spec(num_dp: int = 60, num_dP0: int = 60, base: ToFSetup = None) -> SweepSpec:
    """Gradient d over (dp, dP0) on the reference apparatus."""
    return SweepSpec(base or ToFSetup(), SweepAxis.linspace("dp", *DEFAULT_DP, num_dp),
                     SweepAxis.linspace("dP0", *DEFAULT_DP0, num_dP0), "gradient_d")


def width_ratio_surface_spec(num_dp: int = 60, num_dP0: int = 60, base: ToFSetup = None) -> SweepSpec:
    """Relative post-measurement width over (dp, dP0)."""
    return SweepSpec(base or ToFSetup(), SweepAxis.linspace("dp", *DEFAULT_DP, num_dp),
                     SweepAxis.linspace("dP0", *DEFAULT_DP0, num_dP0), "width_ratio")


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    setups = spec.setups()
    quantity = QUANTITIES[spec.quantity]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(quantity, setups))
    else:
        values = [quantity(s) for s in setups]
    coords = np.array(list(itertools.product(spec.axis1.values, spec.axis2.values)))
    rows = np.column_stack([coords, np.asarray(values, dtype=float)])
    bad = ~np.isfinite(rows[:, 2])
    if np.any(bad):
        v1, v2 = rows[np.argmax(bad), :2]
        raise InvalidParameterError(f"non-finite {spec.quantity} at ({spec.axis1.name}={v1!r}, {spec.axis2.name}={v2!r})")
    return SweepResult(spec, rows)


def find_critical_width(setup: ToFSetup, dp: float = None, bracket: Tuple[float, float] = (1e-2, 1e6),
                        rtol: float = 1e-6) -> float:
    """Initial width dP0 at which Delta P_c / Delta P_0 = 1, by bisection in log(dP0)."""
    if dp is not None:
        setup = setup.replace(dp=dp)
    lo, hi = map(float, bracket)
    if not 0.0 < lo < hi:
        raise InvalidParameterError(f"bracket: need 0 < lo < hi, got {bracket!r}")

    def excess(width):
        return width_ratio(setup.replace(dP0=width)) - 1.0

    f_lo, f_hi = excess(lo), excess(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0.0) == (f_hi > 0.0):
        raise NoCrossingError(
            f"width ratio - 1 has the same sign at both ends of [{lo:g}, {hi:g}] ({f_lo:+.3g}, {f_hi:+.3g})")
    while hi - lo > rtol * lo:
        mid = math.sqrt(lo * hi)
        f_mid = excess(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return math.sqrt(lo * hi)


INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f: Callable[[float], float], lo: float, hi: float, xtol: float = 1e-10,
                   max_iter: int = 200) -> Tuple[float, float]:
    """Minimize a unimodal ``f`` on [lo, hi]; returns (argmin, min) over all points evaluated."""
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    best = min((fc, c), (fd, d))
    for _ in range(max_iter):
        if b - a <= xtol * max(1.0, abs(a) + abs(b)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
            best = min(best, (fc, c))
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
            best = min(best, (fd, d))
    return best[1], best[0]


@dataclass(frozen=True, eq=False)
class OptimizeResult:
    setup: ToFSetup
    ratio: float
    trace: list = field(default_factory=list)  # coarse-grid (params, ratio) pairs
    evaluations: int = 0


def optimize_width_ratio(base: ToFSetup, free: Mapping[str, Sequence[float]], grid_points: int = 8,
                         rtol: float = 1e-6, max_sweeps: int = 100) -> OptimizeResult:
    """Minimize Delta P_c / Delta P_0 over the named apparatus parameters.

    A tensor coarse grid with ``grid_points`` values per free parameter picks
    the start; coordinate-wise golden-section passes then refine it until a
    full pass improves the ratio by less than ``rtol`` (relative). Infeasible
    points (ordering violations, kappa = 0) count as +inf.
    """
    names = list(free)
    for name in names:
        if name not in OPTIMIZABLE:
            raise InvalidParameterError(f"free parameter {name!r} is not an apparatus parameter {OPTIMIZABLE}")
    bounds = {}
    for name in names:
        lo, hi = map(float, free[name])
        if not lo <= hi:
            raise InvalidParameterError(f"bounds for {name!r}: need lo <= hi, got {free[name]!r}")
        bounds[name] = (lo, hi)
    if grid_points < 8:
        raise InvalidParameterError(f"grid_points: need >= 8, got {grid_points}")

    evaluations = 0

    def objective(params: Mapping[str, float]) -> float:
        nonlocal evaluations
        evaluations += 1
        try:
            return width_ratio(base.replace(**params))
        except ToFError:
            return math.inf

    if not names:
        return OptimizeResult(base, objective({}), [], evaluations)

    axes = [np.linspace(*bounds[n], grid_points) for n in names]
    trace = []
    best_params, best = None, math.inf
    for point in itertools.product(*axes):
        params = dict(zip(names, map(float, point)))
        value = objective(params)
        if math.isfinite(value):
            trace.append((params, value))
            if value < best:
                best_params, best = params, value
    if best_params is None:
        raise InfeasibleError(f"no admissible setup inside the bounds {bounds}")

    for _ in range(max_sweeps):
        start = best
        for name in names:
            def along(v, name=name):
                return objective({**best_params, name: v})

            x, value = golden_section(along, *bounds[name])
            if value < best:
                best_params, best = {**best_params, name: x}, value
        if start - best <= rtol * abs(start):
            break
    return OptimizeResult(base.replace(**best_params), best, trace, evaluations)
