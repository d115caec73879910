from typing import List, Sequence, Tuple
import logging

import numpy as np
from scipy.linalg import solve_triangular

from domain.entities.covariance_model import CovarianceModel
from domain.entities.data_matrix import DataMatrix
from domain.entities.elliptical_spec import EllipticalSpec, Family
from domain.entities.rng_stream import RngStream
from domain.exceptions import DimensionMismatch, DomainError

logger = logging.getLogger(__name__)


def make_ar1(p: int, rho: float) -> CovarianceModel:
    """AR(1) covariance [M]_ij = rho^|i-j|; always has eta = 1"""
    if p < 1:
        raise DomainError(f"Dimension must be positive, got {p}")
    if not 0 < rho < 1:
        raise DomainError(f"AR(1) coefficient must lie in (0, 1), got {rho}")
    idx = np.arange(p)
    return CovarianceModel(rho ** np.abs(idx[:, None] - idx[None, :]))


def make_spiked(spectrum: Sequence[Tuple[float, int]]) -> CovarianceModel:
    """Diagonal covariance with the given (eigenvalue, multiplicity) blocks in order"""
    if not spectrum:
        raise DomainError("Spectrum must contain at least one (eigenvalue, multiplicity) pair")
    values: List[float] = []
    for eigenvalue, multiplicity in spectrum:
        if not eigenvalue > 0:
            raise DomainError(f"Eigenvalues must be positive, got {eigenvalue}")
        if int(multiplicity) != multiplicity or multiplicity < 1:
            raise DomainError(f"Multiplicities must be positive integers, got {multiplicity}")
        values.extend([float(eigenvalue)] * int(multiplicity))
    return CovarianceModel(np.diag(values))


def make_spiked_sweep(p: int, m: int, high: float = 1.0, low: float = 0.01) -> CovarianceModel:
    """m eigenvalues equal to `high`, the remaining p - m equal to `low`"""
    if not 1 <= m <= p - 1:
        raise DomainError(f"m must lie in [1, p-1], got m={m}, p={p}")
    return make_spiked([(high, m), (low, p - m)])


class SamplingService:
    """Seeded samplers for Gaussian and multivariate-t populations with covariance M"""

    def sample_gaussian(self, model: CovarianceModel, n: int, rng: RngStream) -> DataMatrix:
        """Rows x_i = L z_i, z_i ~ N(0, I), L = chol(M)"""
        self._check_n(n)
        generator = rng.generator()
        z = generator.standard_normal((n, model.dim))
        return DataMatrix(z @ model.cholesky.T)

    def sample_student_t(self, model: CovarianceModel, nu: float, n: int, rng: RngStream) -> DataMatrix:
        """Multivariate t_nu rows rescaled so that Cov(x) = M.

        x_i = sqrt((nu-2)/nu) * L z_i / sqrt(s_i/nu), s_i ~ chi2_nu drawn as gamma(nu/2, 2).
        """
        if not nu > 4:
            raise DomainError(f"nu must exceed 4 for finite 4th-order moments, got {nu}")
        self._check_n(n)
        generator = rng.generator()
        z = generator.standard_normal((n, model.dim))
        chi2 = generator.gamma(nu / 2.0, 2.0, size=n)
        scale = np.sqrt((nu - 2.0) / nu) / np.sqrt(chi2 / nu)
        return DataMatrix((z @ model.cholesky.T) * scale[:, None])

    def sample(self, spec: EllipticalSpec, n: int, rng: RngStream) -> DataMatrix:
        if spec.family is Family.GAUSSIAN:
            return self.sample_gaussian(spec.covariance, n, rng)
        return self.sample_student_t(spec.covariance, spec.nu, n, rng)

    def elliptical_kurtosis(self, spec: EllipticalSpec) -> float:
        """kappa = 0 for Gaussian, 2/(nu-4) for t_nu"""
        if spec.family is Family.GAUSSIAN:
            return 0.0
        return 2.0 / (spec.nu - 4.0)

    def squared_modular_variates(self, X: DataMatrix, model: CovarianceModel) -> np.ndarray:
        """r_i^2 = x_i^T M^-1 x_i"""
        if X.p != model.dim:
            raise DimensionMismatch(f"Data has p={X.p} but model has p={model.dim}")
        w = solve_triangular(model.cholesky, X.rows.T, lower=True)
        return np.sum(w * w, axis=0)

    def empirical_elliptical_kurtosis(self, X: DataMatrix, model: CovarianceModel) -> float:
        """E[r^4]/(p(p+2)) - 1 with the expectation replaced by the sample mean"""
        r2 = self.squared_modular_variates(X, model)
        p = model.dim
        return float(np.mean(r2 * r2) / (p * (p + 2)) - 1.0)

    @staticmethod
    def _check_n(n: int) -> None:
        if n < 1:
            raise DomainError(f"Sample size must be positive, got {n}")
