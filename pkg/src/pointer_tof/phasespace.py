"""Exact Gaussian-state algebra on the three-mode phase space (X, P, x1, p1, x2, p2)."""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import ContractViolationError, DegenerateConditioningError, InvalidParameterError

LABELS = ("X", "P", "x1", "p1", "x2", "p2")

SYMMETRY_RTOL = 1e-12
UNCERTAINTY_ATOL = 1e-10
SYMPLECTIC_ATOL = 1e-12
CONDITIONING_MIN_VAR = 1e-14


class PhaseIndex(IntEnum):
    X = 0
    P = 1
    x1 = 2
    p1 = 3
    x2 = 4
    p2 = 5


Index = Union[int, str, PhaseIndex]


def symplectic_form(n_modes: int = 3) -> np.ndarray:
    """Block-diagonal Omega with [[0, 1], [-1, 0]] per (position, momentum) pair."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


OMEGA = symplectic_form(3)


def _index(i: Index) -> int:
    if isinstance(i, str):
        try:
            return LABELS.index(i)
        except ValueError:
            raise InvalidParameterError(f"unknown phase-space coordinate {i!r}") from None
    i = int(i)
    if not 0 <= i < len(LABELS):
        raise InvalidParameterError(f"phase-space index out of range: {i}")
    return i


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Mean vector and covariance matrix over the coordinates named in ``labels``.

    The covariance is symmetrized on construction; an asymmetry beyond
    ``SYMMETRY_RTOL`` (relative to the largest entry) is rejected.
    """

    mean: np.ndarray
    cov: np.ndarray
    labels: tuple = LABELS

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        n = len(self.labels)
        if mean.shape != (n,) or cov.shape != (n, n):
            raise InvalidParameterError(
                f"shape mismatch: mean {mean.shape}, cov {cov.shape}, {n} labels"
            )
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise InvalidParameterError("Gaussian state has non-finite entries")
        scale = max(1.0, float(np.max(np.abs(cov))))
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_RTOL * scale:
            raise ContractViolationError("covariance matrix is not symmetric")
        object.__setattr__(self, "mean", _frozen(mean))
        object.__setattr__(self, "cov", _frozen(0.5 * (cov + cov.T)))
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def dim(self) -> int:
        return len(self.labels)

    def variance(self, label: str) -> float:
        i = self.labels.index(label)
        return float(self.cov[i, i])

    def mean_of(self, label: str) -> float:
        return float(self.mean[self.labels.index(label)])

    def uncertainty_margin(self) -> float:
        """Smallest eigenvalue of cov + (i/2) Omega; >= 0 for a physical state."""
        if self.labels != LABELS:
            raise InvalidParameterError("uncertainty check needs the full six-coordinate state")
        return float(np.linalg.eigvalsh(self.cov + 0.5j * OMEGA)[0])

    def check_uncertainty(self) -> "GaussianState":
        # eigvalsh is accurate to ~eps*||cov||, which dominates for very broad states.
        tol = UNCERTAINTY_ATOL + 64 * np.finfo(float).eps * float(np.linalg.norm(self.cov, 2))
        margin = self.uncertainty_margin()
        if margin < -tol:
            raise ContractViolationError(
                f"covariance violates the uncertainty relation (min eigenvalue {margin:.3e})"
            )
        return self

    def allclose(self, other: "GaussianState", rtol=1e-12, atol=1e-12) -> bool:
        return (
            self.labels == other.labels
            and np.allclose(self.mean, other.mean, rtol=rtol, atol=atol)
            and np.allclose(self.cov, other.cov, rtol=rtol, atol=atol)
        )


def symplectic_defect(matrix: np.ndarray) -> float:
    """max |S Omega S^T - Omega|."""
    m = np.asarray(matrix, dtype=float)
    omega = symplectic_form(m.shape[0] // 2)
    return float(np.max(np.abs(m @ omega @ m.T - omega)))


@dataclass(frozen=True, eq=False)
class SymplecticMap:
    """Linear phase-space map z -> S z.

    ``atol`` is the admissible defect of S Omega S^T = Omega. It is scaled by
    max|S|^2 so that maps with large entries are not rejected for rounding.
    """

    matrix: np.ndarray
    atol: float = SYMPLECTIC_ATOL

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (6, 6):
            raise InvalidParameterError(f"symplectic map must be 6x6, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ContractViolationError("symplectic map has non-finite entries")
        defect = symplectic_defect(m)
        scale = max(1.0, float(np.max(np.abs(m)))) ** 2
        if defect > self.atol * scale:
            raise ContractViolationError(f"map is not symplectic (defect {defect:.3e})")
        object.__setattr__(self, "matrix", _frozen(m))

    @classmethod
    def identity(cls) -> "SymplecticMap":
        return cls(np.eye(6))

    def entry(self, row: Index, col: Index) -> float:
        return float(self.matrix[_index(row), _index(col)])

    def __matmul__(self, other: "SymplecticMap") -> "SymplecticMap":
        return compose(self, other)


def make_initial_state(setup) -> GaussianState:
    """Product of minimum-uncertainty real Gaussians with zero mean position.

    Pointer means vanish; the particle carries mean momentum ``P0``.
    """
    for name in ("dP0", "dp1", "dp2"):
        width = getattr(setup, name)
        if not width > 0.0:
            raise InvalidParameterError(f"{name}: must be > 0, got {width!r}")
    mean = np.array([0.0, setup.P0, 0.0, 0.0, 0.0, 0.0])
    momentum_vars = np.array([setup.dP0, setup.dp1, setup.dp2]) ** 2
    diag = np.empty(6)
    diag[0::2] = 1.0 / (4.0 * momentum_vars)
    diag[1::2] = momentum_vars
    return GaussianState(mean, np.diag(diag)).check_uncertainty()


def apply_map(S: SymplecticMap, state: GaussianState) -> GaussianState:
    if not isinstance(S, SymplecticMap):
        raise ContractViolationError("apply_map needs a validated SymplecticMap")
    if state.labels != LABELS:
        raise InvalidParameterError("apply_map needs the full six-coordinate state")
    m = S.matrix
    return GaussianState(m @ state.mean, m @ state.cov @ m.T).check_uncertainty()


def compose(outer: SymplecticMap, inner: SymplecticMap) -> SymplecticMap:
    """Map that applies ``inner`` first, then ``outer``."""
    return SymplecticMap(outer.matrix @ inner.matrix, atol=max(outer.atol, inner.atol))


def marginal(state: GaussianState, indices: Iterable[Index]) -> GaussianState:
    """Trace out every coordinate not listed in ``indices``."""
    names = []
    for i in indices:
        if isinstance(i, str):
            names.append(i)
        elif 0 <= int(i) < state.dim:
            names.append(state.labels[int(i)])
        else:
            raise InvalidParameterError(f"coordinate index out of range: {i}")
    if not names:
        raise InvalidParameterError("marginal needs at least one coordinate")
    if len(set(names)) != len(names):
        raise InvalidParameterError(f"duplicate coordinates in {names}")
    try:
        idx = [state.labels.index(n) for n in names]
    except ValueError:
        raise InvalidParameterError(f"coordinates {names} not all present in {state.labels}") from None
    return GaussianState(state.mean[idx], state.cov[np.ix_(idx, idx)], tuple(names))


def condition_on_linear(state: GaussianState, functional: Sequence[float], value: float) -> GaussianState:
    """Condition on the linear statistic u = functional . z taking ``value``.

    The returned covariance does not depend on ``value`` or on the mean.
    """
    ell = np.asarray(functional, dtype=float)
    if ell.shape != (state.dim,):
        raise InvalidParameterError(f"functional must have length {state.dim}, got {ell.shape}")
    gain = state.cov @ ell
    var_u = float(ell @ gain)
    if not var_u > CONDITIONING_MIN_VAR:
        raise DegenerateConditioningError(f"conditioning statistic has variance {var_u:.3e}")
    mean = state.mean + gain * ((value - float(ell @ state.mean)) / var_u)
    cov = state.cov - np.outer(gain, gain) / var_u
    return GaussianState(mean, cov, state.labels)
