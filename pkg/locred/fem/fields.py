from dataclasses import dataclass, field

import numpy as np

from locred.base.exceptions import ConfigError


def _square_count(values: np.ndarray, kind: str) -> int:
    n = int(round(np.sqrt(len(values))))
    if n < 1 or n * n != len(values):
        raise ConfigError(f"{kind} must hold n_squares^2 values, got {len(values)}")
    return n


@dataclass(frozen=True, eq=False)
class CoefficientField:
    """Piecewise constant heat conductivity, one value per square (index iy * n + ix)."""

    values: np.ndarray
    kappa_min: float = field(init=False)
    kappa_max: float = field(init=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        _square_count(values, "CoefficientField")
        if not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise ConfigError("heat conductivity must be finite and strictly positive")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "kappa_min", float(values.min()))
        object.__setattr__(self, "kappa_max", float(values.max()))

    @property
    def n_squares(self) -> int:
        return _square_count(self.values, "CoefficientField")

    @property
    def contrast(self) -> float:
        return self.kappa_max / self.kappa_min

    @classmethod
    def constant(cls, n_squares: int, value: float = 1.0) -> "CoefficientField":
        return cls(np.full(n_squares * n_squares, float(value)))


@dataclass(frozen=True, eq=False)
class SourceField:
    """Piecewise constant volumetric source, one value per square."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        _square_count(values, "SourceField")
        if not np.all(np.isfinite(values)):
            raise ConfigError("source values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n_squares(self) -> int:
        return _square_count(self.values, "SourceField")

    @classmethod
    def constant(cls, n_squares: int, value: float = 0.0) -> "SourceField":
        return cls(np.full(n_squares * n_squares, float(value)))
