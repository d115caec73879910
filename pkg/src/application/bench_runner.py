import asyncio
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple
import logging

import numpy as np

from config.settings import settings
from domain.entities.bench_record import BenchRecord
from domain.entities.covariance_model import CovarianceModel
from domain.entities.data_matrix import DataMatrix
from domain.entities.elliptical_spec import EllipticalSpec
from domain.entities.rng_stream import RngStream
from domain.entities.scenario_config import BenchConfig, ScenarioConfig
from domain.entities.shrinkage_params import NO_SHRINKAGE, ShrinkageParams
from domain.exceptions import DimensionMismatch, EllShrinkError, TrialError
from domain.services.oracle_service import OracleService
from domain.services.sampling_service import SamplingService
from domain.services.shrinkage_service import ShrinkageService, rscm

logger = logging.getLogger(__name__)

_sampling = SamplingService()
_shrinkage = ShrinkageService()
_oracle = OracleService()


def nmse_sample(estimate: np.ndarray, model: CovarianceModel) -> float:
    """||estimate - M||_F^2 / ||M||_F^2"""
    if estimate.shape != model.matrix.shape:
        raise DimensionMismatch(f"Estimate has shape {estimate.shape}, model has {model.matrix.shape}")
    M = model.matrix
    return float(np.sum((estimate - M) ** 2) / np.sum(M * M))


@dataclass(frozen=True)
class TrialBlock:
    """Contiguous range of trials for one (scenario, n); the unit of parallel work"""

    scenario: str
    spec: EllipticalSpec
    n: int
    start: int
    stop: int
    master_seed: int
    estimators: Tuple[str, ...]
    lw_eta2_factor: bool
    oracle_params: ShrinkageParams


def evaluate_estimator(name: str, X: DataMatrix, block: TrialBlock) -> ShrinkageParams:
    if name == "SCM":
        return NO_SHRINKAGE
    if name == "LW":
        return _shrinkage.lw_params(X, eta2_factor=block.lw_eta2_factor)
    if name == "Ell":
        return _shrinkage.ell_params(X)
    return block.oracle_params


def run_trial_block(block: TrialBlock) -> np.ndarray:
    """Per-trial (nmse, alpha, beta) for every estimator, shape (trials, estimators, 3).

    Trial t draws from stream t, and every estimator sees that same data matrix.
    """
    model = block.spec.covariance
    out = np.empty((block.stop - block.start, len(block.estimators), 3))
    for t in range(block.start, block.stop):
        X = _sampling.sample(block.spec, block.n, RngStream(block.master_seed, t))
        S = _shrinkage.statistics.scm(X)
        for k, name in enumerate(block.estimators):
            try:
                params = evaluate_estimator(name, X, block)
            except EllShrinkError as e:
                raise TrialError(block.scenario, block.n, t, e) from e
            out[t - block.start, k] = (nmse_sample(rscm(S, params), model), params.alpha, params.beta)
    return out


def _mean_and_se(values: np.ndarray) -> Tuple[float, float]:
    """Exactly rounded sums, so the result does not depend on how trials were split"""
    count = len(values)
    mean = math.fsum(values) / count
    if count < 2:
        return mean, 0.0
    variance = math.fsum((values - mean) ** 2) / (count - 1)
    return mean, math.sqrt(variance / count)


class BenchRunner:
    """Monte Carlo harness for the NMSE experiments"""

    def __init__(self, block_size: Optional[int] = None):
        self.block_size = block_size or settings.trial_block_size
        self.sampling = _sampling
        self.shrinkage = _shrinkage
        self.oracle = _oracle

    def oracle_bound(self, spec: EllipticalSpec, n: int) -> Tuple[ShrinkageParams, float]:
        """Elliptical oracle parameters and their normalized optimal MSE"""
        model = spec.covariance
        kappa = self.sampling.elliptical_kurtosis(spec)
        params = self.shrinkage.oracle_params_elliptical(model, kappa, n)
        return params, self.oracle.optimal_mse(model, params.beta) / model.frobenius_sq

    def _plan(self, config: ScenarioConfig) -> Tuple[List[TrialBlock], Dict[Tuple[str, int], float], Dict[str, int]]:
        blocks: List[TrialBlock] = []
        bounds: Dict[Tuple[str, int], float] = {}
        dims: Dict[str, int] = {}
        for name, model in config.covariance_models():
            spec = config.family.spec(model)
            dims[name] = model.dim
            for n in config.n_values:
                oracle_params, bound = self.oracle_bound(spec, n)
                bounds[(name, n)] = bound
                for start in range(0, config.trials, self.block_size):
                    blocks.append(
                        TrialBlock(
                            scenario=name,
                            spec=spec,
                            n=n,
                            start=start,
                            stop=min(start + self.block_size, config.trials),
                            master_seed=config.master_seed,
                            estimators=tuple(config.estimators),
                            lw_eta2_factor=config.lw_eta2_factor,
                            oracle_params=oracle_params,
                        )
                    )
        return blocks, bounds, dims

    async def run_scenario_async(self, config: ScenarioConfig, workers: Optional[int] = None) -> List[BenchRecord]:
        workers = workers or settings.default_workers
        started = time.time()

        logger.info(f"Phase 1: Planning scenario '{config.name}' ({config.trials} trials, n={config.n_values})")
        blocks, bounds, dims = self._plan(config)

        logger.info(f"Phase 2: Running {len(blocks)} trial block(s) on {workers} worker(s)")
        if workers == 1:
            results = [run_trial_block(block) for block in blocks]
        else:
            loop = asyncio.get_running_loop()
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = await asyncio.gather(*(loop.run_in_executor(pool, run_trial_block, b) for b in blocks))

        logger.info("Phase 3: Aggregating results")
        grouped: Dict[Tuple[str, int], List[np.ndarray]] = {}
        for block, result in zip(blocks, results):
            grouped.setdefault((block.scenario, block.n), []).append(result)

        records: List[BenchRecord] = []
        for (name, n), parts in grouped.items():
            trials = np.concatenate(parts, axis=0)
            for k, estimator in enumerate(config.estimators):
                mean_nmse, se_nmse = _mean_and_se(trials[:, k, 0])
                records.append(
                    BenchRecord(
                        scenario=name,
                        estimator=estimator,
                        p=dims[name],
                        n=n,
                        trials=config.trials,
                        mean_nmse=mean_nmse,
                        se_nmse=se_nmse,
                        mean_beta=math.fsum(trials[:, k, 2]) / config.trials,
                        mean_alpha=math.fsum(trials[:, k, 1]) / config.trials,
                        oracle_nmse_bound=bounds[(name, n)],
                    )
                )

        logger.info(f"Scenario '{config.name}' completed in {time.time() - started:.1f}s ({len(records)} records)")
        return records

    def run_scenario(self, config: ScenarioConfig, workers: Optional[int] = None) -> List[BenchRecord]:
        return asyncio.run(self.run_scenario_async(config, workers))

    async def run_config_async(self, config: BenchConfig, workers: Optional[int] = None) -> List[BenchRecord]:
        records: List[BenchRecord] = []
        for scenario in config.scenarios:
            records.extend(await self.run_scenario_async(scenario, workers))
        return records

    def run_config(self, config: BenchConfig, workers: Optional[int] = None) -> List[BenchRecord]:
        return asyncio.run(self.run_config_async(config, workers))
