from typing import Tuple
import logging

import numpy as np

from domain.entities.data_matrix import DataMatrix
from domain.entities.sphericity_stats import SphericityStats
from domain.exceptions import DimensionMismatch, DomainError, ZeroNormRow, ZeroVarianceColumn

logger = logging.getLogger(__name__)


def _trace_of_square(A: np.ndarray) -> float:
    return float(np.einsum("ij,ji->", A, A))


def _check_square(S: np.ndarray) -> None:
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionMismatch(f"Expected a square matrix, got shape {S.shape}")


class StatisticsService:
    """Sample statistics of zero-mean data: SCM, sign SCM, and consistent
    estimators of the scale (eta), sphericity (gamma) and elliptical kurtosis (kappa).

    Moments are raw (uncentered): the population mean is zero by assumption.
    """

    def scm(self, X: DataMatrix) -> np.ndarray:
        """S = (1/n) sum_i x_i x_i^T"""
        S = X.rows.T @ X.rows / X.n
        return (S + S.T) / 2

    def normalized(self, X: DataMatrix) -> Tuple[DataMatrix, float]:
        """(X / max|x_ij|, max|x_ij|); fourth powers of the scaled entries stay in float range"""
        peak = float(np.max(np.abs(X.rows)))
        if peak == 0:
            return X, 1.0
        return DataMatrix(X.rows / peak), peak

    def sign_scm(self, X: DataMatrix) -> np.ndarray:
        """S_sgn = (1/n) sum_i x_i x_i^T / ||x_i||^2, unit trace"""
        peaks = np.max(np.abs(X.rows), axis=1)
        zero_rows = np.flatnonzero(peaks == 0)
        if zero_rows.size:
            raise ZeroNormRow(int(zero_rows[0]))
        # each row divided by its largest entry first, so the norm cannot under- or overflow
        V = X.rows / peaks[:, None]
        U = V / np.sqrt(np.einsum("ij,ij->i", V, V))[:, None]
        S_sgn = U.T @ U / X.n
        return (S_sgn + S_sgn.T) / 2

    def gamma_hat_sign(self, X: DataMatrix) -> float:
        """gamma_hat = p tr(S_sgn^2) - p/n, returned unclamped"""
        S_sgn = self.sign_scm(X)
        return X.p * _trace_of_square(S_sgn) - X.p / X.n

    def kappa_hat(self, X: DataMatrix) -> float:
        """Average marginal sample kurtosis / 3, clamped below at -2/(p+2)"""
        peaks = np.max(np.abs(X.rows), axis=0)
        zero_columns = np.flatnonzero(peaks == 0)
        if zero_columns.size:
            raise ZeroVarianceColumn(int(zero_columns[0]))
        # kurtosis is scale-free per column
        scaled = X.rows / peaks
        squares = scaled * scaled
        m2 = squares.mean(axis=0)
        m4 = (squares * squares).mean(axis=0)
        k = m4 / (m2 * m2) - 3.0
        return max(-2.0 / (X.p + 2), float(k.sum()) / (3 * X.p))

    def eta_hat(self, S: np.ndarray) -> float:
        _check_square(S)
        return float(np.trace(S)) / S.shape[0]

    def eta2_hat(self, S: np.ndarray) -> float:
        _check_square(S)
        return _trace_of_square(S) / S.shape[0]

    def gamma_hat_plugin(self, S: np.ndarray) -> float:
        """Plug-in sphericity eta2_hat / eta_hat^2 = p tr(S^2) / tr(S)^2"""
        _check_square(S)
        peak = float(np.max(np.abs(S)))
        if not np.isfinite(peak):
            raise DomainError("Plug-in sphericity is undefined for a non-finite SCM")
        T = S / peak if peak > 0 else S
        eta = self.eta_hat(T)
        if eta == 0:
            raise DomainError("Plug-in sphericity is undefined for tr(S) = 0")
        return self.eta2_hat(T) / (eta * eta)

    def sphericity_stats(self, X: DataMatrix) -> SphericityStats:
        S = self.scm(X)
        return SphericityStats(
            eta_hat=self.eta_hat(S),
            eta2_hat=self.eta2_hat(S),
            gamma_hat=self.gamma_hat_sign(X),
            kappa_hat=self.kappa_hat(X),
            gamma_hat_plugin=self.gamma_hat_plugin(S),
            dim=X.p,
        )
