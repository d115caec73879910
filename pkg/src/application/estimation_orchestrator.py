from dataclasses import dataclass, field
from typing import Callable, Dict, Optional
import logging

import numpy as np

from domain.entities.data_matrix import DataMatrix
from domain.entities.shrinkage_params import EstimatorMethod, ShrinkageParams
from domain.exceptions import EllShrinkError
from domain.services.shrinkage_service import ShrinkageService
from domain.services.statistics_service import StatisticsService
from infrastructure.io.csv_store import read_data_matrix, write_matrix

logger = logging.getLogger(__name__)


@dataclass
class EstimationResult:
    """Result of estimating a covariance matrix from a data file"""

    matrix: np.ndarray
    params: ShrinkageParams
    n: int
    p: int
    diagnostics: Dict[str, Optional[float]] = field(default_factory=dict)


class EstimationOrchestrator:
    """Reads observations, fits the chosen estimator and writes the estimate"""

    def __init__(self):
        self.statistics = StatisticsService()
        self.shrinkage = ShrinkageService(self.statistics)

    def estimate_file(self, data_path, method: EstimatorMethod, out_path, transpose: bool = False) -> EstimationResult:
        X = read_data_matrix(data_path, transpose=transpose)
        logger.info(f"Read {X.n} observations of dimension {X.p} from {data_path}")

        matrix, params = self.shrinkage.estimate(X, method)
        write_matrix(matrix, out_path)
        logger.info(f"{method.value} estimate written to {out_path}")

        return EstimationResult(matrix=matrix, params=params, n=X.n, p=X.p, diagnostics=self.diagnostics(X))

    def diagnostics(self, X: DataMatrix) -> Dict[str, Optional[float]]:
        """Every statistic that can be computed for X; None where it is undefined"""
        S = self.statistics.scm(X)
        computations: Dict[str, Callable[[], float]] = {
            "eta_hat": lambda: self.statistics.eta_hat(S),
            "gamma_hat_sign": lambda: self.statistics.gamma_hat_sign(X),
            "gamma_hat_plugin": lambda: self.statistics.gamma_hat_plugin(S),
            "kappa_hat": lambda: self.statistics.kappa_hat(X),
        }
        values: Dict[str, Optional[float]] = {}
        for name, compute in computations.items():
            try:
                values[name] = compute()
            except EllShrinkError as e:
                logger.debug(f"{name} undefined: {e}")
                values[name] = None
        return values
