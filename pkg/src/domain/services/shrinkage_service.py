from typing import Dict, Optional, Tuple
import logging

import numpy as np

from domain.entities.covariance_model import ScaleMeasures
from domain.entities.data_matrix import DataMatrix
from domain.entities.shrinkage_params import NO_SHRINKAGE, EstimatorMethod, ShrinkageParams
from domain.exceptions import DegenerateDenominator, DomainError
from domain.services.oracle_service import kurtosis_term, validate_kappa
from domain.services.statistics_service import StatisticsService

logger = logging.getLogger(__name__)


def rscm(S: np.ndarray, params: ShrinkageParams) -> np.ndarray:
    """S_{alpha,beta} = beta S + alpha I"""
    return params.beta * S + params.alpha * np.eye(S.shape[0])


def _require_two_rows(X: DataMatrix) -> None:
    if X.n < 2:
        raise DomainError(f"Shrinkage estimation needs n >= 2, got n={X.n}")


def _target_weight(beta: float, eta: float) -> float:
    """alpha = (1 - beta) eta, refusing targets beyond float64 range"""
    if beta == 1.0:
        return 0.0
    alpha = (1 - beta) * eta
    if not np.isfinite(alpha):
        raise DomainError("Shrinkage target (1 - beta) tr(S)/p is outside float64 range at this data scale")
    return alpha


class ShrinkageStrategy:
    """Strategy interface for data-driven shrinkage parameter selection"""

    def __init__(self, statistics: Optional[StatisticsService] = None):
        self.statistics = statistics or StatisticsService()

    def select_params(self, X: DataMatrix) -> ShrinkageParams:
        raise NotImplementedError


class ScmStrategy(ShrinkageStrategy):
    """Plain SCM: alpha = 0, beta = 1"""

    def select_params(self, X: DataMatrix) -> ShrinkageParams:
        return NO_SHRINKAGE


class LedoitWolfStrategy(ShrinkageStrategy):
    """Distribution-free Ledoit-Wolf plug-in parameters.

    beta* = 1 - [(1/(pn)) sum ||x_i||^4 - eta2_hat] / [n (eta2_hat - eta_hat^2)]
    clamped to [0, 1]. With eta2_factor=False the denominator is n (gamma_plugin - 1),
    which only agrees with the scale-invariant form when eta_hat = 1.
    """

    def __init__(self, statistics: Optional[StatisticsService] = None, eta2_factor: bool = True):
        super().__init__(statistics)
        self.eta2_factor = eta2_factor

    def select_params(self, X: DataMatrix) -> ShrinkageParams:
        _require_two_rows(X)
        # moments of Y = X / scale; eta_x = scale^2 eta converts back to the data's units
        Y, scale = self.statistics.normalized(X)
        S = self.statistics.scm(Y)
        eta = self.statistics.eta_hat(S)
        if not eta > 0:
            raise DomainError("Ledoit-Wolf parameters need tr(S) > 0")
        eta2 = self.statistics.eta2_hat(S)
        eta_x = eta * scale * scale

        dispersion = eta2 - eta * eta
        if dispersion <= np.finfo(float).eps * eta * eta:
            logger.warning("SCM is proportional to the identity; Ledoit-Wolf falls back to beta=0")
            return ShrinkageParams(alpha=_target_weight(0.0, eta_x), beta=0.0, degenerate=True)

        n, p = Y.n, Y.p
        norms_sq = np.einsum("ij,ij->i", Y.rows, Y.rows)
        numerator = float(np.sum(norms_sq * norms_sq)) / (p * n) - eta2
        ratio = numerator / (n * dispersion)
        if not self.eta2_factor and ratio:
            # n(gamma_plugin - 1) denominator: the ratio keeps a factor eta_x^2
            ratio = ratio * eta_x * eta_x

        beta = float(np.clip(1 - ratio, 0.0, 1.0))
        params = ShrinkageParams(alpha=_target_weight(beta, eta_x), beta=beta)
        logger.debug(f"LW params alpha={params.alpha:.6g} beta={params.beta:.6g}")
        return params


class EllipticalStrategy(ShrinkageStrategy):
    """Ell-RSCM plug-in: sign-SCM sphericity and clamped sample kurtosis
    substituted into the elliptical oracle formula."""

    def select_params(self, X: DataMatrix) -> ShrinkageParams:
        _require_two_rows(X)
        gamma_hat = self.statistics.gamma_hat_sign(X)
        kappa_hat = self.statistics.kappa_hat(X)
        Y, scale = self.statistics.normalized(X)
        eta = self.statistics.eta_hat(self.statistics.scm(Y)) * scale * scale

        t = gamma_hat - 1
        denominator = t + kurtosis_term(gamma_hat, kappa_hat, X.p) / X.n
        if denominator <= 0:
            beta = 0.0
        else:
            beta = min(1.0, max(0.0, t / denominator))

        params = ShrinkageParams(alpha=_target_weight(beta, eta), beta=beta)
        logger.debug(f"Ell params gamma_hat={gamma_hat:.6g} kappa_hat={kappa_hat:.6g} beta={beta:.6g}")
        return params


class ShrinkageService:
    """Domain service for the RSCM estimator stack"""

    def __init__(self, statistics: Optional[StatisticsService] = None):
        self.statistics = statistics or StatisticsService()
        self.strategies: Dict[EstimatorMethod, ShrinkageStrategy] = {
            EstimatorMethod.SCM: ScmStrategy(self.statistics),
            EstimatorMethod.LW: LedoitWolfStrategy(self.statistics),
            EstimatorMethod.ELL: EllipticalStrategy(self.statistics),
        }

    def oracle_params_general(self, scale: ScaleMeasures, expected_tr_s2: float) -> ShrinkageParams:
        """beta_o = p(gamma-1)eta^2 / (E[tr S^2] - p eta^2), alpha_o = (1 - beta_o) eta"""
        p, eta = scale.dim, scale.eta
        denominator = expected_tr_s2 - p * eta**2
        if not denominator > 0:
            raise DegenerateDenominator(f"E[tr(S^2)]={expected_tr_s2} must exceed p*eta^2={p * eta**2}")
        beta = max(0.0, p * (scale.gamma - 1) * eta**2 / denominator)
        return ShrinkageParams(alpha=(1 - beta) * eta, beta=beta)

    def oracle_params_elliptical(self, scale: ScaleMeasures, kappa: float, n: int) -> ShrinkageParams:
        """beta_o = (gamma-1) / (gamma-1 + (1/n){kappa(2gamma+p) + gamma + p})"""
        if n < 1:
            raise DomainError(f"n must be positive, got {n}")
        validate_kappa(kappa, scale.dim)
        t = max(0.0, scale.gamma - 1)
        if t == 0:
            return ShrinkageParams(alpha=scale.eta, beta=0.0)
        beta = t / (t + kurtosis_term(scale.gamma, kappa, scale.dim) / n)
        return ShrinkageParams(alpha=(1 - beta) * scale.eta, beta=beta)

    def lw_params(self, X: DataMatrix, eta2_factor: bool = True) -> ShrinkageParams:
        return LedoitWolfStrategy(self.statistics, eta2_factor=eta2_factor).select_params(X)

    def ell_params(self, X: DataMatrix) -> ShrinkageParams:
        return self.strategies[EstimatorMethod.ELL].select_params(X)

    def estimate(self, X: DataMatrix, method: EstimatorMethod) -> Tuple[np.ndarray, ShrinkageParams]:
        """Returns rscm(scm(X), params) together with the method's params"""
        strategy = self.strategies.get(method)
        if strategy is None:
            raise DomainError(f"Method {method.value} needs the true model and is not a data-driven estimator")
        params = strategy.select_params(X)
        estimate = rscm(self.statistics.scm(X), params)
        if not np.all(np.isfinite(estimate)):
            raise DomainError("Covariance estimate is outside float64 range at this data scale")
        return estimate, params
