import logging

import numpy as np

from config.settings import settings
from domain.entities.covariance_model import CovarianceModel, ScaleMeasures
from domain.entities.scm_moments import ScmMoments
from domain.exceptions import DimensionTooLarge, DomainError

logger = logging.getLogger(__name__)

_GAMMA_SLACK = 1e-12


def kurtosis_lower_bound(p: int) -> float:
    return -2.0 / (p + 2)


def validate_kappa(kappa: float, p: int) -> None:
    if kappa < kurtosis_lower_bound(p) - _GAMMA_SLACK:
        raise DomainError(f"kappa={kappa} is below the elliptical bound -2/(p+2) = {kurtosis_lower_bound(p):.6g}")


def kurtosis_term(gamma: float, kappa: float, p: int) -> float:
    """kappa(2 gamma + p) + gamma + p, the bracket shared by the SCM moment formulas"""
    return kappa * (2 * gamma + p) + gamma + p


def commutation_matrix(p: int) -> np.ndarray:
    """K_p with K vec(A) = vec(A^T) for column-stacked vec"""
    if p < 1:
        raise DomainError(f"Dimension must be positive, got {p}")
    i, j = np.meshgrid(np.arange(p), np.arange(p), indexing="ij")
    K = np.zeros((p * p, p * p))
    K[(j * p + i).ravel(), (i * p + j).ravel()] = 1.0
    return K


class OracleService:
    """Closed-form moments of the SCM and the optimal-MSE expressions"""

    def scm_moments(self, eta: float, gamma: float, kappa: float, n: int, p: int) -> ScmMoments:
        if not eta > 0:
            raise DomainError(f"eta must be positive, got {eta}")
        if gamma < 1 - _GAMMA_SLACK:
            raise DomainError(f"gamma must be >= 1, got {gamma}")
        if n < 1 or p < 1:
            raise DomainError(f"n and p must be positive, got n={n}, p={p}")
        validate_kappa(kappa, p)

        bracket = kurtosis_term(gamma, kappa, p)
        mse = (p / n) * eta**2 * bracket
        nmse = bracket / (gamma * n)
        return ScmMoments(mse=mse, nmse=nmse, expected_tr_s2=mse + p * gamma * eta**2)

    def optimal_mse(self, model: CovarianceModel, beta_o: float) -> float:
        """||M - eta I||_F^2 (1 - beta_o), the MSE attained by the oracle RSCM"""
        self._check_beta_o(beta_o)
        distance_sq = float(np.sum((model.matrix - model.eta * np.eye(model.dim)) ** 2))
        return distance_sq * (1 - beta_o)

    def optimal_nmse(self, gamma: float, beta_o: float) -> float:
        """optimal_mse normalized by ||M||_F^2: (gamma - 1)(1 - beta_o)/gamma"""
        self._check_beta_o(beta_o)
        if gamma < 1 - _GAMMA_SLACK:
            raise DomainError(f"gamma must be >= 1, got {gamma}")
        return max(0.0, gamma - 1) * (1 - beta_o) / gamma

    def rscm_mse(self, alpha: float, beta: float, scale: ScaleMeasures, expected_tr_s2: float) -> float:
        """Exact E||beta S + alpha I - M||_F^2 given E[tr(S^2)].

        L(alpha, beta) = alpha^2 p + beta^2 a1 + (1-beta)^2 p eta2 - 2 alpha (1-beta) p eta,
        a1 = E[tr(S^2)] - p eta2.
        """
        p = scale.dim
        a1 = expected_tr_s2 - p * scale.eta2
        return (
            alpha**2 * p
            + beta**2 * a1
            + (1 - beta) ** 2 * p * scale.eta2
            - 2 * alpha * (1 - beta) * p * scale.eta
        )

    def ledoit_wolf_form(self, scale: ScaleMeasures, expected_tr_s2: float) -> float:
        """beta_o = a2 / (a2 + a1) with a2 = ||M - eta I||^2 and a1 = MSE(S)"""
        p = scale.dim
        a1 = expected_tr_s2 - p * scale.eta2
        a2 = p * max(0.0, scale.gamma - 1) * scale.eta**2
        if a1 + a2 <= 0:
            raise DomainError("MSE(S) + ||M - eta I||^2 must be positive")
        return a2 / (a2 + a1)

    def cov_vec_scm(self, model: CovarianceModel, kappa: float, n: int) -> np.ndarray:
        """p^2 x p^2 covariance of vec(S) for an elliptical population"""
        p = model.dim
        if p > settings.max_cov_vec_dim:
            raise DimensionTooLarge(f"cov(vec S) needs a {p * p}x{p * p} matrix; limit is p <= {settings.max_cov_vec_dim}")
        if n < 1:
            raise DomainError(f"n must be positive, got {n}")
        validate_kappa(kappa, p)

        M = np.asarray(model.matrix)
        K = commutation_matrix(p)
        vec_m = M.reshape(-1, order="F")
        return (1 + kappa) / n * (np.eye(p * p) + K) @ np.kron(M, M) + (kappa / n) * np.outer(vec_m, vec_m)

    @staticmethod
    def _check_beta_o(beta_o: float) -> None:
        if not 0 <= beta_o < 1:
            raise DomainError(f"beta_o must lie in [0, 1), got {beta_o}")
