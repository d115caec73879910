from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from config.settings import settings
from domain.exceptions import DimensionMismatch, DomainError, NonFiniteData, NotPositiveDefinite, NotSymmetric


class ScaleMeasures(Protocol):
    """Anything exposing the scale/sphericity measures of a covariance matrix"""

    dim: int
    eta: float
    eta2: float
    gamma: float


@dataclass(frozen=True)
class ScaleSummary:
    """Matrix-free scale measures: eta = tr(M)/p, eta2 = tr(M^2)/p, gamma = eta2/eta^2"""

    dim: int
    eta: float
    eta2: float
    gamma: float

    @classmethod
    def from_eta_gamma(cls, p: int, eta: float, gamma: float) -> "ScaleSummary":
        if p < 1:
            raise DomainError(f"Dimension must be positive, got {p}")
        if not eta > 0:
            raise DomainError(f"eta must be positive, got {eta}")
        if gamma < 1 - 1e-12:
            raise DomainError(f"Sphericity gamma must be >= 1, got {gamma}")
        return cls(dim=p, eta=float(eta), eta2=float(gamma * eta**2), gamma=float(gamma))


@dataclass(frozen=True, eq=False)
class CovarianceModel:
    """True p x p covariance matrix M with cached scale and sphericity measures.

    The input is symmetrized as (A + A^T)/2 when its asymmetry is below the
    configured tolerance; positive definiteness is checked by Cholesky.
    """

    matrix: np.ndarray
    dim: int = field(init=False)
    eta: float = field(init=False)
    eta2: float = field(init=False)
    gamma: float = field(init=False)
    cholesky: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
            raise DimensionMismatch(f"Covariance matrix must be square and non-empty, got shape {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise NonFiniteData("Covariance matrix contains NaN or Inf")

        asymmetry = np.max(np.abs(matrix - matrix.T))
        if asymmetry > settings.symmetry_tolerance:
            raise NotSymmetric(f"Matrix asymmetry {asymmetry:.3e} exceeds tolerance {settings.symmetry_tolerance:.0e}")
        matrix = (matrix + matrix.T) / 2

        try:
            chol = np.linalg.cholesky(matrix)
        except np.linalg.LinAlgError as e:
            raise NotPositiveDefinite(f"Cholesky factorization failed: {e}") from e

        p = matrix.shape[0]
        trace = float(np.trace(matrix))
        trace_sq = float(np.sum(matrix * matrix))

        matrix.setflags(write=False)
        chol.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "cholesky", chol)
        object.__setattr__(self, "dim", p)
        object.__setattr__(self, "eta", trace / p)
        object.__setattr__(self, "eta2", trace_sq / p)
        object.__setattr__(self, "gamma", p * trace_sq / trace**2)

    @property
    def frobenius_sq(self) -> float:
        """||M||_F^2 = p * eta2"""
        return self.dim * self.eta2

    @property
    def summary(self) -> ScaleSummary:
        return ScaleSummary(dim=self.dim, eta=self.eta, eta2=self.eta2, gamma=self.gamma)


def new_covariance_model(matrix) -> CovarianceModel:
    return CovarianceModel(np.asarray(matrix, dtype=np.float64))
