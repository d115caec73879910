from typing import Annotated, List, Literal, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt, field_validator, model_validator

from config.settings import settings
from domain.entities.covariance_model import CovarianceModel
from domain.entities.elliptical_spec import EllipticalSpec
from domain.services.sampling_service import make_ar1, make_spiked, make_spiked_sweep

EstimatorName = Literal["SCM", "LW", "Ell", "OracleEll"]
ALL_ESTIMATORS: List[str] = ["SCM", "LW", "Ell", "OracleEll"]


class Ar1Covariance(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["ar1"]
    p: PositiveInt
    rho: float = Field(gt=0, lt=1)

    def build(self, name: str) -> List[Tuple[str, CovarianceModel]]:
        return [(name, make_ar1(self.p, self.rho))]


class SpikedCovariance(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["spiked"]
    spectrum: List[Tuple[PositiveFloat, PositiveInt]] = Field(min_length=1)

    def build(self, name: str) -> List[Tuple[str, CovarianceModel]]:
        return [(name, make_spiked(self.spectrum))]


class SpikedSweepCovariance(BaseModel):
    """m eigenvalues `high`, p - m eigenvalues `low`, one sub-scenario per m"""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["spiked_sweep"]
    p: int = Field(ge=2)
    m_values: List[PositiveInt] = Field(min_length=1)
    high: PositiveFloat = 1.0
    low: PositiveFloat = 0.01

    @model_validator(mode="after")
    def check_m_range(self):
        bad = [m for m in self.m_values if m > self.p - 1]
        if bad:
            raise ValueError(f"m_values must lie in [1, p-1]; got {bad} for p={self.p}")
        return self

    def build(self, name: str) -> List[Tuple[str, CovarianceModel]]:
        return [(f"{name}/m={m}", make_spiked_sweep(self.p, m, self.high, self.low)) for m in self.m_values]


class GaussianFamily(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["gaussian"]

    def spec(self, covariance: CovarianceModel) -> EllipticalSpec:
        return EllipticalSpec.gaussian(covariance)


class StudentTFamily(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["student_t"]
    nu: float = Field(gt=4)

    def spec(self, covariance: CovarianceModel) -> EllipticalSpec:
        return EllipticalSpec.student_t(covariance, self.nu)


CovarianceSpec = Annotated[
    Union[Ar1Covariance, SpikedCovariance, SpikedSweepCovariance], Field(discriminator="kind")
]
FamilySpec = Annotated[Union[GaussianFamily, StudentTFamily], Field(discriminator="kind")]


class ScenarioConfig(BaseModel):
    """One Monte Carlo experiment: covariance factory, sampling family and grid"""

    model_config = ConfigDict(extra="forbid")

    name: str = Field(min_length=1)
    covariance: CovarianceSpec
    family: FamilySpec
    n_values: List[PositiveInt] = Field(min_length=1)
    trials: PositiveInt = Field(default_factory=lambda: settings.default_trials)
    master_seed: int = Field(default_factory=lambda: settings.default_master_seed, ge=0, lt=2**64)
    estimators: List[EstimatorName] = Field(default_factory=lambda: list(ALL_ESTIMATORS), min_length=1)
    lw_eta2_factor: bool = True

    @field_validator("estimators")
    @classmethod
    def unique_estimators(cls, value: List[str]) -> List[str]:
        if len(set(value)) != len(value):
            raise ValueError("estimators must not repeat")
        return value

    def covariance_models(self) -> List[Tuple[str, CovarianceModel]]:
        """(record scenario name, model) pairs; sweeps expand into several"""
        return self.covariance.build(self.name)


class BenchConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenarios: List[ScenarioConfig] = Field(min_length=1)
