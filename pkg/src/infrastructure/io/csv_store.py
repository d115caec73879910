from pathlib import Path
from typing import List
import logging

import numpy as np
import pandas as pd

from config.settings import settings
from domain.entities.bench_record import CSV_COLUMNS, BenchRecord
from domain.entities.data_matrix import DataMatrix
from domain.exceptions import BenchIOError, DataParseError

logger = logging.getLogger(__name__)


def write_csv(records: List[BenchRecord], path) -> None:
    """Benchmark records sorted by (scenario, estimator, n), reals with 17 significant digits"""
    frame = pd.DataFrame([r.to_dict() for r in records], columns=CSV_COLUMNS)
    if not frame.empty:
        frame = frame.sort_values(["scenario", "estimator", "n"], kind="mergesort")
    try:
        frame.to_csv(path, index=False, float_format=settings.csv_float_format, lineterminator="\n")
    except OSError as e:
        raise BenchIOError(path, e) from e
    logger.info(f"Wrote {len(frame)} record(s) to {path}")


def _is_numeric(cell) -> bool:
    try:
        float(cell)
    except (TypeError, ValueError):
        return False
    return True


def read_data_matrix(path, transpose: bool = False) -> DataMatrix:
    """Observation-major numeric CSV; a non-numeric first line is treated as a header"""
    try:
        frame = pd.read_csv(path, header=None, dtype=str, skipinitialspace=True, keep_default_na=False)
    except pd.errors.EmptyDataError as e:
        raise DataParseError(f"'{path}' contains no data") from e
    except pd.errors.ParserError as e:
        raise DataParseError(f"'{path}' is not a rectangular CSV: {e}") from e
    except OSError as e:
        raise DataParseError(f"cannot read '{path}': {e}") from e

    first_line = 1
    if not all(_is_numeric(cell) for cell in frame.iloc[0]):
        frame = frame.iloc[1:]
        first_line = 2
    if frame.empty:
        raise DataParseError(f"'{path}' has a header but no observations")

    values = frame.apply(pd.to_numeric, errors="coerce").to_numpy(dtype=np.float64)
    bad = np.argwhere(~np.isfinite(values))
    if bad.size:
        row, column = (int(i) for i in bad[0])
        raise DataParseError(
            f"non-numeric or non-finite value {frame.iat[row, column]!r}",
            row=row + first_line,
            column=column + 1,
        )
    if transpose:
        values = values.T
    return DataMatrix(values)


def write_matrix(matrix: np.ndarray, path) -> None:
    try:
        pd.DataFrame(matrix).to_csv(path, header=False, index=False, float_format=settings.csv_float_format, lineterminator="\n")
    except OSError as e:
        raise BenchIOError(path, e) from e


def read_matrix(path) -> np.ndarray:
    return pd.read_csv(Path(path), header=None).to_numpy(dtype=np.float64)
