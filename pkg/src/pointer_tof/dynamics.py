"""Heisenberg-picture evolution maps for delta-kick and smooth coupling schedules.

Under H = P^2/2 + sum_i r_i p_i^2/2 + f_i(t) X p_i (r_i = M/m_i) the
evolution from 0 to t is linear. Its coefficients are integrals of the
coupling functions:

    a_i(t) = int_0^t f_i,          b_i(t) = int_0^t a_i,
    c_i(t) = int_0^t tau f_i,      g_ij(t) = int_0^t f_i b_j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Callable, Optional, Union

import numpy as np
from scipy.integrate import cumulative_simpson, simpson

from .errors import AmbiguousInstantError, InvalidCouplingError, InvalidParameterError
from .phasespace import GaussianState, SymplecticMap, apply_map, make_initial_state
from .setup import ToFSetup

X, P, x1, p1, x2, p2 = range(6)

QUADRATURE_TOL = 1e-10
MAX_PANELS = 2**20


@dataclass(frozen=True)
class DeltaSchedule:
    """Instantaneous kicks f_i(t) = kappa_i delta(t - t_i).

    ``kappa2`` defaults to ``kappa``; setting it to zero switches off the
    second pointer.
    """

    kappa: float
    t1: float
    t2: float
    kappa2: Optional[float] = None

    def __post_init__(self):
        if not 0.0 < self.t1 < self.t2:
            raise InvalidParameterError(f"kick times: require 0 < t1 < t2, got {self.t1!r}, {self.t2!r}")

    @property
    def kappas(self) -> tuple:
        return (self.kappa, self.kappa if self.kappa2 is None else self.kappa2)

    @classmethod
    def from_setup(cls, setup: ToFSetup) -> "DeltaSchedule":
        return cls(setup.kappa, setup.t1, setup.t2)


@dataclass(frozen=True)
class SampledSchedule:
    """Smooth couplings given as callables of scaled time.

    ``support`` must contain the region where either function is non-zero.
    ``min_panels`` is a resolution hint for the quadrature (pulses narrower
    than the starting grid would otherwise be missed entirely).
    """

    f1: Callable
    f2: Callable
    support: tuple = (0.0, math.inf)
    min_panels: int = 16


Schedule = Union[DeltaSchedule, SampledSchedule]


def gaussian_pulse_schedule(kappa: float, t1: float, t2: float, sigma: float, T: float = None) -> SampledSchedule:
    """Normalized Gaussian pulses of area ``kappa`` centred at t1 and t2."""
    if not sigma > 0.0:
        raise InvalidParameterError(f"sigma: must be > 0, got {sigma!r}")
    norm = kappa / (sigma * math.sqrt(2.0 * math.pi))

    def pulse(center):
        def f(t):
            return norm * np.exp(-0.5 * ((np.asarray(t, dtype=float) - center) / sigma) ** 2)
        return f

    horizon = T if T is not None else t2 + 10.0 * sigma
    # aim for ~10 samples per sigma on the first pass
    panels = 16
    while horizon / panels > sigma / 10.0 and panels < MAX_PANELS:
        panels *= 2
    return SampledSchedule(pulse(t1), pulse(t2), (t1 - 10 * sigma, t2 + 10 * sigma), panels)


@dataclass(frozen=True)
class CouplingCoefficients:
    t: float
    a1: float = 0.0
    a2: float = 0.0
    b1: float = 0.0
    b2: float = 0.0
    c1: float = 0.0
    c2: float = 0.0
    g11: float = 0.0
    g12: float = 0.0
    g21: float = 0.0
    g22: float = 0.0
    error: float = 0.0  # quadrature error estimate; zero for closed forms

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, f.name) for f in fields(self)[1:-1]])


def delta_coefficients(schedule: DeltaSchedule, t: float) -> CouplingCoefficients:
    """Closed-form coefficients; a kick at t_i acts for t > t_i only."""
    if t in (schedule.t1, schedule.t2):
        raise AmbiguousInstantError(f"t={t!r} coincides with a kick instant")
    if t < 0.0:
        raise InvalidParameterError(f"t: must be >= 0, got {t!r}")
    k1, k2 = schedule.kappas
    on1 = t > schedule.t1
    on2 = t > schedule.t2
    c = dict(t=float(t))
    if on1:
        c.update(a1=k1, b1=k1 * (t - schedule.t1), c1=k1 * schedule.t1)
    if on2:
        c.update(a2=k2, b2=k2 * (t - schedule.t2), c2=k2 * schedule.t2,
                 g21=k1 * k2 * (schedule.t2 - schedule.t1))
    return CouplingCoefficients(**c)


def _sample(f: Callable, tau: np.ndarray) -> np.ndarray:
    values = np.asarray(f(tau), dtype=float)
    if values.shape != tau.shape:
        values = np.array([float(f(t)) for t in tau])
    if not np.all(np.isfinite(values)):
        raise InvalidCouplingError("coupling function returned non-finite samples")
    return values


def _simpson_coefficients(schedule: SampledSchedule, t: float, panels: int) -> np.ndarray:
    tau = np.linspace(0.0, t, panels + 1)
    h = t / panels
    f = [_sample(schedule.f1, tau), _sample(schedule.f2, tau)]
    a_cum = [cumulative_simpson(fi, dx=h, initial=0.0) for fi in f]
    b_cum = [cumulative_simpson(ai, dx=h, initial=0.0) for ai in a_cum]
    a = [simpson(fi, dx=h) for fi in f]
    b = [simpson(ai, dx=h) for ai in a_cum]
    c = [simpson(tau * fi, dx=h) for fi in f]
    g = [[simpson(f[i] * b_cum[j], dx=h) for j in range(2)] for i in range(2)]
    return np.array([a[0], a[1], b[0], b[1], c[0], c[1], g[0][0], g[0][1], g[1][0], g[1][1]])


def quadrature_coefficients(schedule: SampledSchedule, t: float, panels: int = 16,
                            tol: float = QUADRATURE_TOL, max_panels: int = MAX_PANELS) -> CouplingCoefficients:
    """Composite Simpson on a uniform grid over [0, t], doubling the panel count.

    Inner iterated integrals use cumulative Simpson on the same grid. Doubling
    stops once every coefficient changes by less than ``tol`` (relative to
    max(1, |value|)) or ``max_panels`` is reached; the last change is
    reported as ``error``.
    """
    if panels < 16:
        raise InvalidParameterError(f"panels: must be >= 16, got {panels!r}")
    if t < 0.0:
        raise InvalidParameterError(f"t: must be >= 0, got {t!r}")
    if t == 0.0:
        return CouplingCoefficients(t=0.0)
    n = max(int(panels), int(schedule.min_panels))
    n += n % 2
    previous = _simpson_coefficients(schedule, t, n)
    error = math.inf
    while n < max_panels:
        n *= 2
        current = _simpson_coefficients(schedule, t, n)
        error = float(np.max(np.abs(current - previous) / np.maximum(1.0, np.abs(current))))
        previous = current
        if error < tol:
            break
    names = [f.name for f in fields(CouplingCoefficients)][1:-1]
    return CouplingCoefficients(t=float(t), error=error, **dict(zip(names, previous.tolist())))


def symplectic_from_coefficients(coeffs: CouplingCoefficients, setup: ToFSetup) -> SymplecticMap:
    t = coeffs.t
    r1, r2 = setup.mass_ratio_1, setup.mass_ratio_2
    S = np.eye(6)
    S[P, p1], S[P, p2] = -coeffs.a1, -coeffs.a2
    S[X, P] = t
    S[X, p1], S[X, p2] = -coeffs.b1, -coeffs.b2
    S[x1, X], S[x1, P] = coeffs.a1, coeffs.c1
    S[x1, p1], S[x1, p2] = r1 * t - coeffs.g11, -coeffs.g12
    S[x2, X], S[x2, P] = coeffs.a2, coeffs.c2
    S[x2, p1], S[x2, p2] = -coeffs.g21, r2 * t - coeffs.g22
    # quadrature-built maps are only as symplectic as the integrals are accurate
    atol = max(1e-12, 100.0 * coeffs.error) if math.isfinite(coeffs.error) else math.inf
    return SymplecticMap(S, atol=atol)


def free_map(tau: float, mass_ratio_1: float, mass_ratio_2: float) -> SymplecticMap:
    S = np.eye(6)
    S[X, P] = tau
    S[x1, p1] = mass_ratio_1 * tau
    S[x2, p2] = mass_ratio_2 * tau
    return SymplecticMap(S)


def kick_map(pointer: int, kappa: float) -> SymplecticMap:
    """Instantaneous coupling to pointer 1 or 2: P -> P - kappa p_i, x_i -> x_i + kappa X."""
    if pointer not in (1, 2):
        raise InvalidParameterError(f"pointer must be 1 or 2, got {pointer!r}")
    xi, pi = (x1, p1) if pointer == 1 else (x2, p2)
    S = np.eye(6)
    S[P, pi] = -kappa
    S[xi, X] = kappa
    return SymplecticMap(S)


def delta_symplectic_composed(setup: ToFSetup, schedule: DeltaSchedule = None) -> SymplecticMap:
    """F(T - t2) K2 F(t2 - t1) K1 F(t1), built from elementary maps."""
    schedule = schedule or DeltaSchedule.from_setup(setup)
    k1, k2 = schedule.kappas
    r = (setup.mass_ratio_1, setup.mass_ratio_2)
    S = free_map(schedule.t1, *r)
    S = kick_map(1, k1) @ S
    S = free_map(schedule.t2 - schedule.t1, *r) @ S
    S = kick_map(2, k2) @ S
    return free_map(setup.T - schedule.t2, *r) @ S


def evolution_map(setup: ToFSetup, schedule: Schedule = None, panels: int = 16) -> SymplecticMap:
    """Map from t=0 to the readout time T."""
    if schedule is None or isinstance(schedule, DeltaSchedule):
        return delta_symplectic_composed(setup, schedule)
    return symplectic_from_coefficients(quadrature_coefficients(schedule, setup.T, panels), setup)


def propagate(setup: ToFSetup, schedule: Schedule = None, panels: int = 16) -> GaussianState:
    """Gaussian state of particle and pointers at the readout time T."""
    return apply_map(evolution_map(setup, schedule, panels), make_initial_state(setup))


def state_at(setup: ToFSetup, t: float, schedule: DeltaSchedule = None) -> GaussianState:
    """Gaussian state at an intermediate time t (not a kick instant)."""
    schedule = schedule or DeltaSchedule.from_setup(setup)
    S = symplectic_from_coefficients(delta_coefficients(schedule, t), setup)
    return apply_map(S, make_initial_state(setup))

