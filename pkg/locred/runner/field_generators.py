"""Piecewise constant coefficient and source fields painted from axis-aligned rectangles."""
import logging
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from locred.base.exceptions import ConfigError
from locred.decomposition.subdomains import to_squares
from locred.fem.fields import CoefficientField, SourceField
from locred.fem.mesh import TriMesh

logger = logging.getLogger(__name__)


class Rect(BaseModel):
    """[x0, x1] x [y0, y1] carrying a constant value."""
    model_config = {"frozen": True}

    x0: float
    y0: float
    x1: float
    y1: float
    value: float

    @model_validator(mode="after")
    def _check_bounds(self):
        if not (0 <= self.x0 < self.x1 <= 1 and 0 <= self.y0 < self.y1 <= 1):
            raise ValueError(f"rectangle {self.to_text()} must be non-empty and lie in the unit square")
        return self

    @classmethod
    def parse(cls, entry) -> "Rect":
        parts = entry.split() if isinstance(entry, str) else list(entry)
        if len(parts) != 5:
            raise ConfigError(f"rectangle needs 'x0 y0 x1 y1 value', got {entry!r}")
        try:
            x0, y0, x1, y1, value = (float(p) for p in parts)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"rectangle {entry!r} holds a non-numeric entry") from e
        return cls(x0=x0, y0=y0, x1=x1, y1=y1, value=value)

    def to_text(self) -> str:
        return " ".join(repr(float(v)) for v in (self.x0, self.y0, self.x1, self.y1, self.value))


class FieldSpec(BaseModel):
    """Background value overwritten by rectangles in list order."""
    model_config = {"frozen": True}

    background: float
    rects: List[Rect] = Field(default_factory=list)


def rect_squares(rect: Rect, n_squares: int) -> Tuple[int, int, int, int]:
    """Square index range (ix0, iy0, ix1, iy1) covered by ``rect``; edges must lie on the grid."""
    return tuple(to_squares(v, n_squares, name) for v, name in
                 ((rect.x0, "x0"), (rect.y0, "y0"), (rect.x1, "x1"), (rect.y1, "y1")))


def check_field_spec(spec: FieldSpec, n_squares: int, kind: str):
    for rect in spec.rects:
        try:
            rect_squares(rect, n_squares)
        except ConfigError as e:
            raise ConfigError(f"{kind} rectangle {rect.to_text()} is off the grid: {e}") from e


def paint(spec: FieldSpec, n_squares: int) -> np.ndarray:
    """Per-square values, index iy * n + ix."""
    grid = np.full((n_squares, n_squares), float(spec.background))
    for rect in spec.rects:
        ix0, iy0, ix1, iy1 = rect_squares(rect, n_squares)
        grid[iy0:iy1, ix0:ix1] = rect.value
    return grid.ravel()


def generate_kappa(spec: FieldSpec, mesh: TriMesh) -> CoefficientField:
    check_field_spec(spec, mesh.n_squares, "kappa")
    kappa = CoefficientField(paint(spec, mesh.n_squares))
    logger.info(f"kappa: {len(spec.rects)} rectangles, range [{kappa.kappa_min:.3e}, {kappa.kappa_max:.3e}]")
    return kappa


def generate_f(spec: FieldSpec, mesh: TriMesh) -> SourceField:
    check_field_spec(spec, mesh.n_squares, "f")
    return SourceField(paint(spec, mesh.n_squares))
