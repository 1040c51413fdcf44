"""Dimensional scale constants of the filament model."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .errors import InvalidInputError


@dataclass(frozen=True)
class ModelConstants:
    """Length, mass and time scales plus the circulation.

    ``E0`` and ``beta`` are derived in ``__post_init__`` and cannot be passed.
    ``sigma`` is the sign relating the f-vector to the hydrodynamic impulse,
    ``p = sigma * R0**2 * gamma * f``.
    """

    R0: float = 1.0
    m0: float = 1.0
    t0: float = 1.0
    gamma: float = 1.0
    sigma: int = -1
    E0: float = dataclasses.field(init=False)
    beta: float = dataclasses.field(init=False)

    def __post_init__(self):
        for name in ("R0", "m0", "t0"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise InvalidInputError(f"{name} must be positive (got {value!r})")
        if not math.isfinite(self.gamma):
            raise InvalidInputError(f"gamma must be finite (got {self.gamma!r})")
        if self.sigma not in (1, -1):
            raise InvalidInputError(f"sigma must be +1 or -1 (got {self.sigma!r})")
        e0 = self.m0 * self.R0**2 / self.t0**2
        object.__setattr__(self, "E0", e0)
        object.__setattr__(self, "beta", -2.0 / (e0 * self.t0))

    def replace(self, **changes) -> "ModelConstants":
        return dataclasses.replace(self, **changes)

    @property
    def degenerate(self) -> bool:
        """True for a filament with zero circulation."""
        return self.gamma == 0

    def to_dict(self) -> dict:
        return {
            "R0": self.R0,
            "m0": self.m0,
            "t0": self.t0,
            "gamma": self.gamma,
            "sigma": self.sigma,
            "E0": self.E0,
            "beta": self.beta,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ModelConstants":
        known = {"R0", "m0", "t0", "gamma", "sigma"}
        unknown = set(data) - known - {"E0", "beta"}
        if unknown:
            raise InvalidInputError(f"unknown constants field(s): {sorted(unknown)}")
        kwargs = {k: data[k] for k in known if k in data}
        if "sigma" in kwargs:
            kwargs["sigma"] = int(kwargs["sigma"])
        return cls(**kwargs)


def make_constants(R0=1.0, m0=1.0, t0=1.0, gamma=1.0, sigma=-1) -> ModelConstants:
    return ModelConstants(R0=R0, m0=m0, t0=t0, gamma=gamma, sigma=sigma)
