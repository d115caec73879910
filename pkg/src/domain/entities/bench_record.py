from dataclasses import dataclass, asdict

CSV_COLUMNS = [
    "scenario",
    "estimator",
    "p",
    "n",
    "trials",
    "mean_nmse",
    "se_nmse",
    "mean_beta",
    "mean_alpha",
    "oracle_nmse_bound",
]


@dataclass(frozen=True)
class BenchRecord:
    """One (scenario, estimator, n, p) cell of averaged NMSE results"""

    scenario: str
    estimator: str
    p: int
    n: int
    trials: int
    mean_nmse: float
    se_nmse: float
    mean_beta: float
    mean_alpha: float
    oracle_nmse_bound: float

    def to_dict(self) -> dict:
        return asdict(self)
