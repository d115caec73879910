from dataclasses import dataclass
from enum import Enum

from domain.exceptions import DomainError


class EstimatorMethod(Enum):
    SCM = "SCM"
    LW = "LW"
    ELL = "Ell"
    ORACLE_ELL = "OracleEll"

    @classmethod
    def parse(cls, value: str) -> "EstimatorMethod":
        for method in cls:
            if method.value.lower() == value.lower():
                return method
        raise DomainError(f"Unknown estimator '{value}'")


@dataclass(frozen=True)
class ShrinkageParams:
    """(alpha, beta) of the regularized SCM beta*S + alpha*I"""

    alpha: float
    beta: float
    degenerate: bool = False

    def __post_init__(self):
        if not self.alpha >= 0:
            raise DomainError(f"alpha must be nonnegative, got {self.alpha}")
        if not 0 <= self.beta <= 1:
            raise DomainError(f"beta must lie in [0, 1], got {self.beta}")


NO_SHRINKAGE = ShrinkageParams(alpha=0.0, beta=1.0)
