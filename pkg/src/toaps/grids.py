"""Rectangular sampling grids for 2D phase-space domains.

One PhaseGrid describes either a (q, p), (theta, t), or (theta, E)
window; the axis names are carried so emitted tables stay labeled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["PhaseGrid"]


@dataclass(frozen=True)
class PhaseGrid:
    x_name: str
    x_min: float
    x_max: float
    x_count: int
    y_name: str
    y_min: float
    y_max: float
    y_count: int

    def __post_init__(self):
        for n, lo, hi in ((self.x_count, self.x_min, self.x_max), (self.y_count, self.y_min, self.y_max)):
            if n < 1:
                raise ValueError("axis counts must be at least 1")
            if n > 1 and not hi > lo:
                raise ValueError("axis with more than one sample needs max > min")
            if not (np.isfinite(lo) and np.isfinite(hi)):
                raise ValueError("axis bounds must be finite")

    def x_axis(self) -> np.ndarray:
        if self.x_count == 1:
            return np.array([self.x_min])
        return np.linspace(self.x_min, self.x_max, self.x_count)

    def y_axis(self) -> np.ndarray:
        if self.y_count == 1:
            return np.array([self.y_min])
        return np.linspace(self.y_min, self.y_max, self.y_count)
