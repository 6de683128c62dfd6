"""Brute-force check of the Gaussian engine on a three-dimensional wavefunction grid.

The wavefunction psi(X, x1, x2) is propagated spectrally: free segments are
exact kinetic phases in the triple-momentum representation, and each kick is
the exact shift x_i -> x_i - kappa X, applied as the phase exp(-i kappa X p_i)
in the mixed (X, p_i) representation. The conditioned momentum density is
then obtained by literally substituting x2 = kappa (t2 - t1) p_out + x1 and
integrating over x1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import fft

from .dynamics import DeltaSchedule, propagate, state_at
from .errors import AliasingError, ContractViolationError, OutOfSupportError, ResolutionError
from .phasespace import LABELS, make_initial_state
from .setup import ToFSetup
from .tof import condition_on_tof

AXES = ("X", "x1", "x2")
MOMENTA = ("P", "p1", "p2")
MIN_N = 64
# Sampling a Gaussian with one point per standard deviation already gives
# sums accurate to exp(-2 pi^2) ~ 3e-9 (Poisson summation).
MIN_POINTS_PER_SIGMA = 1.0
SUPPORT_SIGMAS = 6.0
EDGE_BINS = 3
ALIASING_TOL = 1e-8
NORM_TOL = 1e-8


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid: ``n`` points per axis, half-extent per axis (X, x1, x2).

    ``dt`` optionally splits each free segment into sub-steps of at most
    ``dt``; the kinetic phase is exact, so this only adds checkpoints.
    """

    n: int = 128
    half_width: tuple = (12.0, 13.0, 13.0)
    dt: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "half_width", tuple(float(h) for h in self.half_width))
        if len(self.half_width) != 3 or min(self.half_width) <= 0.0:
            raise ResolutionError(f"half_width: need three positive extents, got {self.half_width}")
        if self.dt is not None and not self.dt > 0.0:
            raise ResolutionError(f"dt: must be > 0, got {self.dt!r}")

    def spacing(self) -> np.ndarray:
        return 2.0 * np.asarray(self.half_width) / self.n

    def coordinates(self, axis: int) -> np.ndarray:
        h = self.half_width[axis]
        return -h + self.spacing()[axis] * np.arange(self.n)

    def wavenumbers(self, axis: int) -> np.ndarray:
        return 2.0 * np.pi * fft.fftfreq(self.n, d=self.spacing()[axis])

    def cutoff(self, axis: int) -> float:
        return math.pi / self.spacing()[axis]

    @classmethod
    def auto(cls, setup: ToFSetup, n: int = 128, sigmas: float = 7.0, dt: float = None) -> "GridSpec":
        """Extents covering ``sigmas`` standard deviations of every position marginal."""
        half = [0.0, 0.0, 0.0]
        for state in _checkpoint_states(setup):
            for k, name in enumerate(AXES):
                half[k] = max(half[k], abs(state.mean_of(name)) + sigmas * math.sqrt(state.variance(name)))
        return cls(n, tuple(half), dt)


@dataclass(eq=False)
class GridState:
    """Wavefunction samples on the grid; axis order (X, x1, x2)."""

    amplitudes: np.ndarray
    spec: GridSpec
    axes: tuple = field(default=None)

    def __post_init__(self):
        if self.axes is None:
            self.axes = tuple(self.spec.coordinates(k) for k in range(3))

    @property
    def cell(self) -> float:
        return float(np.prod(self.spec.spacing()))

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.cell)


def _checkpoint_states(setup: ToFSetup, schedule: DeltaSchedule = None):
    schedule = schedule or DeltaSchedule.from_setup(setup)
    times = (0.5 * (schedule.t1 + schedule.t2), 0.5 * (schedule.t2 + setup.T))
    yield make_initial_state(setup)
    for t in times:
        yield state_at(setup, t, schedule)
    yield propagate(setup, schedule)


def check_representable(setup: ToFSetup, spec: GridSpec, schedule: DeltaSchedule = None) -> None:
    """Raise if some marginal is under-resolved or leaves the grid at any checkpoint."""
    if spec.n < MIN_N or spec.n & (spec.n - 1):
        raise ResolutionError(f"n: need a power of two >= {MIN_N}, got {spec.n}")
    dx = spec.spacing()
    dk = 2.0 * np.pi / (2.0 * np.asarray(spec.half_width))
    for state in _checkpoint_states(setup, schedule):
        for k, (q, p) in enumerate(zip(AXES, MOMENTA)):
            sq, sp = math.sqrt(state.variance(q)), math.sqrt(state.variance(p))
            if sq < MIN_POINTS_PER_SIGMA * dx[k]:
                raise ResolutionError(
                    f"{q}: spacing {dx[k]:.4g} exceeds std {sq:.4g} (need >= {MIN_POINTS_PER_SIGMA} point per std)")
            if sp < MIN_POINTS_PER_SIGMA * dk[k]:
                raise ResolutionError(
                    f"{p}: momentum spacing {dk[k]:.4g} exceeds std {sp:.4g}; widen half_width[{k}]")
            reach = abs(state.mean_of(q)) + SUPPORT_SIGMAS * sq
            if reach > spec.half_width[k]:
                raise OutOfSupportError(
                    f"{q}: |mean| + {SUPPORT_SIGMAS:g} std = {reach:.4g} exceeds half_width {spec.half_width[k]:.4g}")
            preach = abs(state.mean_of(p)) + SUPPORT_SIGMAS * sp
            if preach > spec.cutoff(k):
                raise ResolutionError(
                    f"{p}: |mean| + {SUPPORT_SIGMAS:g} std = {preach:.4g} exceeds momentum cutoff {spec.cutoff(k):.4g}")


def _gaussian_column(x: np.ndarray, sigma: float, momentum: float, spacing: float) -> np.ndarray:
    psi = np.exp(-x**2 / (4.0 * sigma**2) + 1j * momentum * x)
    return psi / math.sqrt(np.sum(np.abs(psi) ** 2) * spacing)


def init_grid(setup: ToFSetup, spec: GridSpec, schedule: DeltaSchedule = None) -> GridState:
    """Product of the three initial Gaussians, normalized on the grid."""
    check_representable(setup, spec, schedule)
    dx = spec.spacing()
    cols = [
        _gaussian_column(spec.coordinates(0), 0.5 / setup.dP0, setup.P0, dx[0]),
        _gaussian_column(spec.coordinates(1), 0.5 / setup.dp1, 0.0, dx[1]),
        _gaussian_column(spec.coordinates(2), 0.5 / setup.dp2, 0.0, dx[2]),
    ]
    psi = cols[0][:, None, None] * cols[1][None, :, None] * cols[2][None, None, :]
    return GridState(psi, spec)


def _edge_mass(density_k: np.ndarray) -> float:
    """Largest fraction of spectral mass in the outermost bins of any axis."""
    total = density_k.sum()
    n = density_k.shape[0]
    edge = np.r_[n // 2 - EDGE_BINS: n // 2 + EDGE_BINS]
    worst = 0.0
    for axis in range(3):
        profile = density_k.sum(axis=tuple(a for a in range(3) if a != axis))
        worst = max(worst, float(profile[edge].sum() / total))
    return worst


def _free(psi: np.ndarray, spec: GridSpec, tau: float, mass_ratios) -> np.ndarray:
    if tau <= 0.0:
        return psi
    steps = 1 if spec.dt is None else max(1, math.ceil(tau / spec.dt))
    h = tau / steps
    k = [spec.wavenumbers(a) for a in range(3)]
    phase = (np.exp(-0.5j * h * k[0] ** 2)[:, None, None]
             * np.exp(-0.5j * h * mass_ratios[0] * k[1] ** 2)[None, :, None]
             * np.exp(-0.5j * h * mass_ratios[1] * k[2] ** 2)[None, None, :])
    psi_k = fft.fftn(psi)
    for _ in range(steps):
        psi_k *= phase
    edge = _edge_mass(np.abs(psi_k) ** 2)
    if edge > ALIASING_TOL:
        raise AliasingError(f"spectral mass {edge:.2e} within {EDGE_BINS} bins of the momentum-grid edge")
    return fft.ifftn(psi_k)


def _kick(psi: np.ndarray, spec: GridSpec, pointer: int, kappa: float) -> np.ndarray:
    if kappa == 0.0:
        return psi
    X = spec.coordinates(0)
    k = spec.wavenumbers(pointer)
    shape = [1, 1, 1]
    shape[pointer] = -1
    phase = np.exp(-1j * kappa * X[:, None, None] * k.reshape(shape))
    return fft.ifft(fft.fft(psi, axis=pointer) * phase, axis=pointer)


def propagate_grid(state: GridState, setup: ToFSetup, schedule: DeltaSchedule = None) -> GridState:
    """Evolve from t=0 to T under the delta-kick schedule."""
    schedule = schedule or DeltaSchedule.from_setup(setup)
    k1, k2 = schedule.kappas
    ratios = (setup.mass_ratio_1, setup.mass_ratio_2)
    spec = state.spec
    norm0 = state.norm()
    psi = _free(state.amplitudes, spec, schedule.t1, ratios)
    psi = _kick(psi, spec, 1, k1)
    psi = _free(psi, spec, schedule.t2 - schedule.t1, ratios)
    psi = _kick(psi, spec, 2, k2)
    psi = _free(psi, spec, setup.T - schedule.t2, ratios)
    out = GridState(psi, spec, state.axes)
    drift = abs(out.norm() - norm0)
    if drift > NORM_TOL:
        raise ContractViolationError(f"norm drift {drift:.2e} during grid propagation")
    return out


def _apply_momentum(psi: np.ndarray, spec: GridSpec, axis: int) -> np.ndarray:
    k = spec.wavenumbers(axis)
    shape = [1, 1, 1]
    shape[axis] = -1
    return fft.ifft(fft.fft(psi, axis=axis) * k.reshape(shape), axis=axis)


def grid_moments(state: GridState):
    """First and symmetrized second moments of (X, P, x1, p1, x2, p2).

    Each second moment is Re <A psi | B psi>, which equals <(AB + BA)/2> for
    Hermitian A, B.
    """
    psi = state.amplitudes
    spec = state.spec
    cell = state.cell
    ops = []
    for axis in range(3):
        shape = [1, 1, 1]
        shape[axis] = -1
        ops.append(psi * state.axes[axis].reshape(shape))
        ops.append(_apply_momentum(psi, spec, axis))
    norm = state.norm()
    mean = np.array([np.vdot(psi, a).real for a in ops]) * cell / norm
    second = np.empty((6, 6))
    for i in range(6):
        for j in range(i, 6):
            second[i, j] = second[j, i] = np.vdot(ops[i], ops[j]).real * cell / norm
    return mean, second - np.outer(mean, mean)


def _momentum_density(state: GridState):
    """|psi(P, x1, x2)|^2 with P sorted ascending, and the P axis."""
    phi = fft.fftshift(fft.fft(state.amplitudes, axis=0), axes=0)
    P = fft.fftshift(state.spec.wavenumbers(0))
    return P, np.abs(phi) ** 2


def conditioned_density_grid(state: GridState, setup: ToFSetup, p_out: float):
    """W(P | p_out) on the particle momentum grid, normalized to unit integral."""
    P, rho = _momentum_density(state)
    x1 = state.axes[1]
    x2 = state.axes[2]
    dx2 = x2[1] - x2[0]
    shift = setup.kappa * setup.flight_time * p_out
    s = (x1 + shift - x2[0]) / dx2
    lower = np.floor(s).astype(int)
    inside = (lower >= 0) & (lower < len(x2) - 1)
    if not np.any(inside):
        raise OutOfSupportError(f"substitution line x2 = x1 + {shift:.4g} misses the grid")
    j = np.nonzero(inside)[0]
    i = lower[inside]
    w = s[inside] - i
    line = rho[:, j, i] * (1.0 - w) + rho[:, j, i + 1] * w
    W = line.sum(axis=1)
    dP = P[1] - P[0]
    total = W.sum() * dP
    if not total > 0.0:
        raise OutOfSupportError("conditioned density vanishes on the grid")
    return P, W / total


def conditioned_stats_grid(state: GridState, setup: ToFSetup, p_out: float):
    """(mean, variance) of the conditioned particle momentum density."""
    P, W = conditioned_density_grid(state, setup, p_out)
    dP = P[1] - P[0]
    mean = float(np.sum(P * W) * dP)
    var = float(np.sum((P - mean) ** 2 * W) * dP)
    return mean, var


def traced_density_grid(state: GridState):
    P, rho = _momentum_density(state)
    W = rho.sum(axis=(1, 2))
    return P, W / (W.sum() * (P[1] - P[0]))


def _relative(value: float, reference: float, scale: float) -> float:
    return abs(value - reference) / max(abs(reference), scale)


@dataclass
class OracleReport:
    """Grid-vs-engine comparison.

    Relative errors use max(|engine value|, natural scale) as denominator,
    where the natural scale is the standard deviation (means) or the product
    of standard deviations (covariances); exact zeros would otherwise make
    the relative error meaningless.
    """

    n: int
    norm_drift: float
    mean_errors: dict
    cov_errors: dict
    conditioned: list
    tolerance: float = 0.01

    @property
    def max_error(self) -> float:
        errs = list(self.mean_errors.values()) + list(self.cov_errors.values())
        for row in self.conditioned:
            errs += [row["p_c_error"], row["var_pc_error"]]
        return max(errs)

    @property
    def passed(self) -> bool:
        return self.max_error < self.tolerance and self.norm_drift < NORM_TOL

    def to_dict(self) -> dict:
        return dict(n=self.n, norm_drift=self.norm_drift, mean_errors=self.mean_errors,
                    cov_errors=self.cov_errors, conditioned=self.conditioned,
                    max_error=self.max_error, tolerance=self.tolerance, passed=self.passed)


def oracle_check(setup: ToFSetup, spec: GridSpec = None, p_outs: Sequence[float] = None,
                 tolerance: float = 0.01) -> OracleReport:
    """Propagate on the grid and compare every moment with the Gaussian engine."""
    spec = spec or GridSpec.auto(setup)
    engine = propagate(setup)
    initial = init_grid(setup, spec)
    final = propagate_grid(initial, setup)
    drift = abs(final.norm() - initial.norm())
    mean, cov = grid_moments(final)
    std = np.sqrt(np.diag(engine.cov))
    mean_errors = {LABELS[i]: _relative(mean[i], engine.mean[i], std[i]) for i in range(6)}
    cov_errors = {}
    for i in range(6):
        for j in range(i, 6):
            key = f"{LABELS[i]},{LABELS[j]}"
            cov_errors[key] = _relative(cov[i, j], engine.cov[i, j], std[i] * std[j])
    if p_outs is None:
        p_outs = (setup.P0, setup.P0 + math.sqrt(engine.variance("P")))
    conditioned = []
    for p_out in p_outs:
        exact = condition_on_tof(setup, p_out, state=engine)
        mean_c, var_c = conditioned_stats_grid(final, setup, p_out)
        conditioned.append(dict(
            p_out=float(p_out), p_c_grid=mean_c, p_c_engine=exact.p_c,
            var_pc_grid=var_c, var_pc_engine=exact.var_pc,
            p_c_error=_relative(mean_c, exact.p_c, math.sqrt(exact.var_pc)),
            var_pc_error=_relative(var_c, exact.var_pc, 0.0),
        ))
    return OracleReport(spec.n, drift, mean_errors, cov_errors, conditioned, tolerance)
