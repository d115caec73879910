from dataclasses import dataclass

import numpy as np

from domain.exceptions import DimensionMismatch, NonFiniteData


@dataclass(frozen=True, eq=False)
class DataMatrix:
    """n x p matrix of zero-mean observations, row i is x_i^T"""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.array(self.rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 1:
            raise DimensionMismatch(f"Data matrix must be n x p with n, p >= 1, got shape {rows.shape}")
        if not np.all(np.isfinite(rows)):
            bad_row = int(np.argwhere(~np.isfinite(rows))[0][0])
            raise NonFiniteData(f"Data matrix contains NaN or Inf (first at row {bad_row})")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def p(self) -> int:
        return self.rows.shape[1]

    def scaled(self, factor: float) -> "DataMatrix":
        return DataMatrix(self.rows * factor)
