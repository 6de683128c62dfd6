"""Parameter vector of a ToF measurement setup."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .errors import InvalidParameterError

# Names that set two fields at once.
TIED = {
    "dp": ("dp1", "dp2"),
    "mass_ratio": ("mass_ratio_1", "mass_ratio_2"),
}


@dataclass(frozen=True)
class ToFSetup:
    """Apparatus and initial-state parameters, all in scaled units.

    The pointers couple to the particle at ``t1`` and ``t2`` and are read out
    at ``T``. ``mass_ratio_i`` is M/m_i. ``dP0`` is the initial momentum width
    of the particle, ``dp1``/``dp2`` the momentum widths of the pointers.
    """

    kappa: float = 1.0
    t1: float = 0.5
    t2: float = 1.5
    T: float = 3.0
    mass_ratio_1: float = 0.1
    mass_ratio_2: float = 0.1
    P0: float = 100.0
    dP0: float = 150.0
    dp1: float = 30.0
    dp2: float = 30.0

    def __post_init__(self):
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise InvalidParameterError(f"{f.name}: expected a number, got {value!r}")
            if not math.isfinite(value):
                raise InvalidParameterError(f"{f.name}: must be finite, got {value!r}")
            object.__setattr__(self, f.name, float(value))
        if not 0.0 < self.t1 < self.t2 < self.T:
            raise InvalidParameterError(
                f"times: require 0 < t1 < t2 < T, got t1={self.t1!r}, t2={self.t2!r}, T={self.T!r}"
            )
        for name in ("dP0", "dp1", "dp2", "mass_ratio_1", "mass_ratio_2"):
            if getattr(self, name) <= 0.0:
                raise InvalidParameterError(f"{name}: must be > 0, got {getattr(self, name)!r}")

    @property
    def flight_time(self) -> float:
        return self.t2 - self.t1

    def replace(self, **changes) -> "ToFSetup":
        """Copy with some fields changed; accepts the tied names ``dp`` and ``mass_ratio``."""
        expanded = {}
        for name, value in changes.items():
            if name in TIED:
                for sub in TIED[name]:
                    expanded[sub] = value
            elif name in FIELD_NAMES:
                expanded[name] = value
            else:
                raise InvalidParameterError(f"unknown setup parameter {name!r}")
        return dataclasses.replace(self, **expanded)

    def get(self, name: str) -> float:
        if name in TIED:
            first, second = (getattr(self, sub) for sub in TIED[name])
            if first != second:
                raise InvalidParameterError(f"{name}: tied fields differ ({first!r} vs {second!r})")
            return first
        if name not in FIELD_NAMES:
            raise InvalidParameterError(f"unknown setup parameter {name!r}")
        return getattr(self, name)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ToFSetup":
        if not isinstance(data, dict):
            raise InvalidParameterError(f"setup: expected an object, got {type(data).__name__}")
        unknown = set(data) - set(FIELD_NAMES) - set(TIED)
        if unknown:
            raise InvalidParameterError(f"setup: unknown parameter(s) {sorted(unknown)}")
        plain = {k: v for k, v in data.items() if k in FIELD_NAMES}
        base = cls(**plain)
        tied = {k: v for k, v in data.items() if k in TIED}
        return base.replace(**tied) if tied else base


FIELD_NAMES = tuple(f.name for f in dataclasses.fields(ToFSetup))
PARAMETER_NAMES = FIELD_NAMES + tuple(TIED)


def reference_setup(dP0: float = 150.0, dp: float = 30.0, **changes) -> ToFSetup:
    """Reference apparatus (kappa=1, t1=0.5, t2=1.5, T=3, M/m=0.1, P0=100)."""
    return ToFSetup(dP0=dP0, dp1=dp, dp2=dp).replace(**changes)


def desk_setup(**changes) -> ToFSetup:
    """Small-number setup that fits on a 128^3 grid."""
    base = ToFSetup(
        kappa=1.0, t1=0.25, t2=0.75, T=1.0, mass_ratio_1=0.1, mass_ratio_2=0.1,
        P0=2.0, dP0=1.0, dp1=0.5, dp2=0.5,
    )
    return base.replace(**changes)
