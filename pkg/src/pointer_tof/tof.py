"""ToF observable and the particle state conditioned on one pointer readout."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import Schedule, propagate
from .errors import DegenerateFunctionalError, InvalidParameterError
from .phasespace import GaussianState, PhaseIndex, condition_on_linear, marginal
from .setup import ToFSetup


@dataclass(frozen=True, eq=False)
class ToFFunctional:
    """Linear statistic u = ell . z = (x2 - x1) / (kappa (t2 - t1)), the assigned ToF value."""

    ell: np.ndarray
    kappa: float
    t1: float
    t2: float

    def __call__(self, z: np.ndarray) -> np.ndarray:
        return np.asarray(z) @ self.ell


def tof_functional(setup: ToFSetup) -> ToFFunctional:
    if setup.kappa == 0.0:
        raise DegenerateFunctionalError("kappa = 0: the pointers carry no information about the particle")
    scale = 1.0 / (setup.kappa * setup.flight_time)
    ell = np.zeros(6)
    ell[PhaseIndex.x1] = -scale
    ell[PhaseIndex.x2] = scale
    ell.setflags(write=False)
    return ToFFunctional(ell, setup.kappa, setup.t1, setup.t2)


def tof_expectation(setup: ToFSetup, schedule: Schedule = None, state: GaussianState = None) -> float:
    """Mean of (x2(T) - x1(T)) / (t2 - t1) under the evolved state (equals kappa * P0)."""
    state = state if state is not None else propagate(setup, schedule)
    diff = np.zeros(6)
    diff[PhaseIndex.x1], diff[PhaseIndex.x2] = -1.0, 1.0
    return float(diff @ state.mean) / setup.flight_time


def traced_variance(setup: ToFSetup, schedule: Schedule = None) -> float:
    """Particle momentum variance at T with the pointers traced out."""
    return marginal(propagate(setup, schedule), ["P"]).variance("P")


def traced_variance_closed_form(setup: ToFSetup) -> float:
    return setup.dP0**2 + setup.kappa**2 * (setup.dp1**2 + setup.dp2**2)


@dataclass(frozen=True)
class ConditionedResult:
    p_out: float
    p_c: float
    var_pc: float
    var_pt: float
    d: float
    width_ratio: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _gradient(state: GaussianState, functional: ToFFunctional) -> float:
    gain = state.cov @ functional.ell
    return 1.0 - float(gain[PhaseIndex.P]) / float(functional.ell @ gain)


def condition_on_tof(setup: ToFSetup, p_out: float, schedule: Schedule = None,
                     state: GaussianState = None) -> ConditionedResult:
    """Particle momentum statistics after the pointers yield the ToF value ``p_out``."""
    functional = tof_functional(setup)
    state = state if state is not None else propagate(setup, schedule)
    conditioned = marginal(condition_on_linear(state, functional.ell, p_out), ["P"])
    var_pc = conditioned.variance("P")
    return ConditionedResult(
        p_out=float(p_out),
        p_c=conditioned.mean_of("P"),
        var_pc=var_pc,
        var_pt=state.variance("P"),
        d=_gradient(state, functional),
        width_ratio=math.sqrt(var_pc) / setup.dP0,
    )


def gradient_d(setup: ToFSetup, schedule: Schedule = None) -> float:
    """Slope d in p_c = p_out + d (P0 - p_out), from d = 1 - Cov(P, u) / Var(u)."""
    return _gradient(propagate(setup, schedule), tof_functional(setup))


def width_ratio(setup: ToFSetup, schedule: Schedule = None) -> float:
    """Delta P_c / Delta P_0 (independent of the readout value)."""
    return condition_on_tof(setup, setup.P0, schedule).width_ratio


def gaussian_density(x, mean: float, var: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * (x - mean) ** 2 / var) / math.sqrt(2.0 * math.pi * var)


@dataclass(frozen=True, eq=False)
class DistributionSamples:
    grid: np.ndarray
    initial: np.ndarray
    traced: np.ndarray
    conditioned: Optional[np.ndarray] = None
    result: Optional[ConditionedResult] = None


def distribution_samples(setup: ToFSetup, grid, p_out: Optional[float] = None,
                         schedule: Schedule = None) -> DistributionSamples:
    """Initial, traced and (optionally) conditioned momentum densities on ``grid``."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise InvalidParameterError("density grid must be a non-empty 1-D array")
    if np.any(np.diff(grid) <= 0.0):
        raise InvalidParameterError("density grid must be strictly increasing")
    state = propagate(setup, schedule)
    initial = gaussian_density(grid, setup.P0, setup.dP0**2)
    traced = gaussian_density(grid, state.mean_of("P"), state.variance("P"))
    if p_out is None:
        return DistributionSamples(grid, initial, traced)
    result = condition_on_tof(setup, p_out, state=state)
    conditioned = gaussian_density(grid, result.p_c, result.var_pc)
    return DistributionSamples(grid, initial, traced, conditioned, result)


def sample_readouts(setup: ToFSetup, n: int, rng: np.random.Generator, schedule: Schedule = None):
    """Draw ``n`` pointer readout pairs (x1, x2) at T from the evolved state."""
    pointers = marginal(propagate(setup, schedule), ["x1", "x2"])
    draws = rng.multivariate_normal(pointers.mean, pointers.cov, size=n, method="cholesky")
    return draws[:, 0], draws[:, 1]


def assign_tof_value(setup: ToFSetup, x1, x2) -> np.ndarray:
    """P_out = (x2 - x1) / (kappa (t2 - t1))."""
    if setup.kappa == 0.0:
        raise DegenerateFunctionalError("kappa = 0: no ToF value can be assigned")
    return (np.asarray(x2) - np.asarray(x1)) / (setup.kappa * setup.flight_time)
