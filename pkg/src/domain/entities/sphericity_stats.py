from dataclasses import dataclass

from domain.exceptions import DomainError


@dataclass(frozen=True)
class SphericityStats:
    eta_hat: float
    eta2_hat: float
    gamma_hat: float
    kappa_hat: float
    gamma_hat_plugin: float
    dim: int

    def __post_init__(self):
        if self.eta_hat < 0 or self.eta2_hat < 0:
            raise DomainError("Scale estimates must be nonnegative")
        if self.kappa_hat < -2 / (self.dim + 2):
            raise DomainError(f"kappa_hat {self.kappa_hat} below the bound -2/(p+2)")
