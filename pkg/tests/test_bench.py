import hashlib

import pytest
import numpy as np
import pandas as pd

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

import application.bench_runner as bench_runner
from application.bench_runner import BenchRunner, nmse_sample
from config.settings import settings
from domain.entities.bench_record import CSV_COLUMNS, BenchRecord
from domain.entities.covariance_model import CovarianceModel
from domain.entities.scenario_config import ScenarioConfig
from domain.exceptions import BenchIOError, DimensionMismatch, ScenarioConfigError, TrialError, ZeroNormRow
from domain.repositories.scenario_repository import YamlScenarioRepository
from domain.services.oracle_service import OracleService
from infrastructure.io.csv_store import write_csv, write_matrix

CONFIG_DIR = os.path.join(os.path.dirname(__file__), '..', 'configs')


def _scenario(**overrides) -> ScenarioConfig:
    document = {
        "name": "ar1_small",
        "covariance": {"kind": "ar1", "p": 5, "rho": 0.5},
        "family": {"kind": "student_t", "nu": 8},
        "n_values": [10, 20],
        "trials": 60,
        "master_seed": 42,
    }
    document.update(overrides)
    return ScenarioConfig.model_validate(document)


def _record(scenario="a", estimator="SCM", n=10, mean_nmse=0.1) -> BenchRecord:
    return BenchRecord(
        scenario=scenario,
        estimator=estimator,
        p=5,
        n=n,
        trials=3,
        mean_nmse=mean_nmse,
        se_nmse=0.01,
        mean_beta=1.0,
        mean_alpha=0.0,
        oracle_nmse_bound=0.05,
    )


class TestNmseSample:
    """Test cases for the per-trial loss"""

    @pytest.fixture
    def model(self):
        """Create diagonal covariance model"""
        return CovarianceModel(np.diag([1.0, 2.0, 3.0]))

    def test_exact_estimate(self, model):
        """Test the true matrix has zero loss"""
        assert nmse_sample(model.matrix.copy(), model) == 0.0

    def test_zero_estimate(self, model):
        """Test the zero matrix has unit loss"""
        assert nmse_sample(np.zeros((3, 3)), model) == pytest.approx(1.0)

    def test_scaled_identity_estimate(self, model):
        """Test eta I has loss (gamma - 1)/gamma"""
        expected = (model.gamma - 1) / model.gamma
        assert nmse_sample(model.eta * np.eye(3), model) == pytest.approx(expected)

    def test_shape_mismatch(self, model):
        """Test a wrong-sized estimate is rejected"""
        with pytest.raises(DimensionMismatch):
            nmse_sample(np.eye(2), model)


class TestBenchRunner:
    """Test cases for the Monte Carlo harness"""

    @pytest.fixture
    def runner(self):
        """Create benchmark runner with small blocks"""
        return BenchRunner(block_size=16)

    def test_record_grid(self, runner):
        """Test one record per estimator and n"""
        records = runner.run_scenario(_scenario())

        assert len(records) == 2 * 4
        assert {(r.estimator, r.n) for r in records} == {(e, n) for e in ["SCM", "LW", "Ell", "OracleEll"] for n in [10, 20]}
        assert all(r.trials == 60 and r.p == 5 for r in records)

    def test_single_trial_is_reproducible(self, runner):
        """Test identical config gives identical records"""
        config = _scenario(trials=1)
        assert runner.run_scenario(config) == runner.run_scenario(config)

    def test_block_size_does_not_change_results(self):
        """Test block partition does not change records"""
        config = _scenario()
        assert BenchRunner(block_size=7).run_scenario(config) == BenchRunner(block_size=60).run_scenario(config)

    def test_scm_has_no_shrinkage(self, runner):
        """Test SCM records beta=1, alpha=0"""
        for r in runner.run_scenario(_scenario(estimators=["SCM"])):
            assert r.mean_beta == 1.0
            assert r.mean_alpha == 0.0

    def test_oracle_bound(self, runner):
        """Test OracleEll records match the closed-form oracle"""
        config = _scenario(n_values=[20], estimators=["OracleEll"])
        spec = config.family.spec(config.covariance_models()[0][1])
        params, bound = runner.oracle_bound(spec, 20)

        record = runner.run_scenario(config)[0]
        assert record.oracle_nmse_bound == pytest.approx(bound)
        assert record.mean_beta == pytest.approx(params.beta)
        assert OracleService().optimal_nmse(spec.covariance.gamma, params.beta) == pytest.approx(bound)

    def test_means_respect_oracle_bound(self, runner):
        """Test no estimator beats the oracle bound by more than 4 SE"""
        for r in runner.run_scenario(_scenario(trials=400)):
            assert r.mean_nmse >= r.oracle_nmse_bound - 4 * r.se_nmse

    def test_scm_matches_closed_form(self, runner):
        """Test Gaussian SCM NMSE matches its closed form within 4 SE"""
        config = _scenario(trials=2000, estimators=["SCM"], family={"kind": "gaussian"})
        model = config.covariance_models()[0][1]
        oracle = OracleService()

        for r in runner.run_scenario(config):
            expected = oracle.scm_moments(model.eta, model.gamma, 0.0, r.n, model.dim).nmse
            assert abs(r.mean_nmse - expected) <= 4 * r.se_nmse

    def test_estimators_share_each_trial(self, runner, monkeypatch):
        """Test every estimator sees the same draw per trial"""
        seen = {}
        original = bench_runner.evaluate_estimator

        def recording(name, X, block):
            seen.setdefault(name, []).append(hashlib.sha256(X.rows.tobytes()).hexdigest())
            return original(name, X, block)

        monkeypatch.setattr(bench_runner, "evaluate_estimator", recording)
        runner.run_scenario(_scenario(n_values=[10], trials=20), workers=1)

        assert len(seen["SCM"]) == 20
        assert seen["SCM"] == seen["LW"] == seen["Ell"] == seen["OracleEll"]
        assert len(set(seen["SCM"])) == 20

    def test_estimator_failure_names_trial(self, runner, monkeypatch):
        """Test an estimator failure is wrapped with its trial"""
        def failing(name, X, block):
            raise ZeroNormRow(0)

        monkeypatch.setattr(bench_runner, "evaluate_estimator", failing)

        with pytest.raises(TrialError) as exc_info:
            runner.run_scenario(_scenario(n_values=[10], trials=3), workers=1)

        assert exc_info.value.scenario == "ar1_small"
        assert exc_info.value.trial == 0
        assert isinstance(exc_info.value.cause, ZeroNormRow)

    def test_workers_do_not_change_csv(self, runner, tmp_path):
        """Test 1 and 2 workers write identical CSV bytes"""
        config = _scenario(trials=50)
        serial, parallel = tmp_path / "serial.csv", tmp_path / "parallel.csv"

        write_csv(runner.run_scenario(config, workers=1), serial)
        write_csv(runner.run_scenario(config, workers=2), parallel)

        assert serial.read_bytes() == parallel.read_bytes()

    def test_spiked_sweep_expands_per_m(self, runner):
        """Test a spiked sweep yields one scenario per m"""
        config = _scenario(
            name="sweep",
            covariance={"kind": "spiked_sweep", "p": 6, "m_values": [1, 3]},
            n_values=[12],
            trials=5,
            estimators=["Ell"],
        )
        names = [r.scenario for r in runner.run_scenario(config)]
        assert names == ["sweep/m=1", "sweep/m=3"]

    @pytest.mark.asyncio
    async def test_run_scenario_async(self, runner):
        """Test the async entry point"""
        records = await runner.run_scenario_async(_scenario(trials=10, estimators=["Ell"]))
        assert [r.n for r in records] == [10, 20]


class TestCsvStore:
    """Test cases for the benchmark CSV"""

    def test_empty_writes_header_only(self, tmp_path):
        """Test no records writes only the header"""
        path = tmp_path / "empty.csv"
        write_csv([], path)

        assert path.read_text() == ",".join(CSV_COLUMNS) + "\n"

    def test_single_record(self, tmp_path):
        """Test reals are written with 17 significant digits"""
        path = tmp_path / "one.csv"
        write_csv([_record(mean_nmse=0.1)], path)

        lines = path.read_text().splitlines()
        assert len(lines) == 2
        assert lines[1].split(",")[5] == "0.10000000000000001"

        frame = pd.read_csv(path)
        assert list(frame.columns) == CSV_COLUMNS
        assert frame.loc[0, "mean_nmse"] == 0.1

    def test_sorted_by_scenario_estimator_n(self, tmp_path):
        """Test rows are sorted by scenario, estimator, n"""
        path = tmp_path / "sorted.csv"
        write_csv([_record("b", "SCM", 10), _record("a", "SCM", 20), _record("a", "Ell", 30), _record("a", "SCM", 10)], path)

        frame = pd.read_csv(path)
        assert list(zip(frame.scenario, frame.estimator, frame.n)) == [
            ("a", "Ell", 30),
            ("a", "SCM", 10),
            ("a", "SCM", 20),
            ("b", "SCM", 10),
        ]

    def test_missing_directory_raises_bench_io_error(self, tmp_path):
        """Test write_csv into a missing directory raises BenchIOError with the path"""
        path = tmp_path / "missing" / "records.csv"

        with pytest.raises(BenchIOError) as exc_info:
            write_csv([_record()], path)

        assert exc_info.value.path == str(path)

    def test_matrix_to_missing_directory_raises_bench_io_error(self, tmp_path):
        """Test write_matrix into a missing directory raises BenchIOError"""
        with pytest.raises(BenchIOError):
            write_matrix(np.eye(2), tmp_path / "missing" / "cov.csv")


class TestScenarioRepository:
    """Test cases for YAML scenario loading"""

    @pytest.fixture
    def repository(self):
        """Create YAML scenario repository"""
        return YamlScenarioRepository()

    def test_parse_valid_document(self, repository):
        """Test defaults fill omitted fields"""
        config = repository.parse(
            "scenarios:\n"
            "  - name: a\n"
            "    covariance: {kind: ar1, p: 10, rho: 0.4}\n"
            "    family: {kind: gaussian}\n"
            "    n_values: [20, 40]\n"
        )
        scenario = config.scenarios[0]

        assert scenario.trials == settings.default_trials
        assert scenario.master_seed == settings.default_master_seed
        assert scenario.estimators == ["SCM", "LW", "Ell", "OracleEll"]

    def test_malformed_yaml_reports_line(self, repository):
        """Test YAML errors carry a line number"""
        with pytest.raises(ScenarioConfigError) as exc_info:
            repository.parse("scenarios:\n  - name: a\n    covariance: {kind: ar1\n")

        assert exc_info.value.line is not None

    def test_missing_field_is_named(self, repository):
        """Test a missing field is named"""
        with pytest.raises(ScenarioConfigError) as exc_info:
            repository.parse("scenarios:\n  - name: a\n    family: {kind: gaussian}\n    n_values: [10]\n")

        assert "covariance" in exc_info.value.field

    def test_nu_must_exceed_four(self, repository):
        """Test Student-t needs nu > 4"""
        with pytest.raises(ScenarioConfigError) as exc_info:
            repository.parse(
                "scenarios:\n"
                "  - name: a\n"
                "    covariance: {kind: ar1, p: 10, rho: 0.4}\n"
                "    family: {kind: student_t, nu: 4}\n"
                "    n_values: [20]\n"
            )

        assert "nu" in exc_info.value.field

    def test_non_mapping_document(self, repository):
        """Test a top-level list is rejected"""
        with pytest.raises(ScenarioConfigError):
            repository.parse("- just\n- a list\n")

    def test_missing_file(self, repository, tmp_path):
        """Test a missing file is a config error"""
        with pytest.raises(ScenarioConfigError):
            repository.load(tmp_path / "absent.yaml")

    def test_seed_override(self, repository, monkeypatch):
        """Test ELLSHRINK_SEED replaces master_seed"""
        monkeypatch.setattr(settings, "seed", "7")
        config = repository.parse(
            "scenarios:\n"
            "  - name: a\n"
            "    covariance: {kind: ar1, p: 10, rho: 0.4}\n"
            "    family: {kind: gaussian}\n"
            "    n_values: [20]\n"
            "    master_seed: 99\n"
        )

        assert config.scenarios[0].master_seed == 7

    @pytest.mark.parametrize("seed", ["-1", "abc", "1.5", str(2**64)])
    def test_invalid_seed_override(self, repository, monkeypatch, seed):
        """Test a negative, non-integer or too large ELLSHRINK_SEED is a config error"""
        monkeypatch.setattr(settings, "seed", seed)

        with pytest.raises(ScenarioConfigError) as exc_info:
            repository.parse(
                "scenarios:\n"
                "  - name: a\n"
                "    covariance: {kind: ar1, p: 10, rho: 0.4}\n"
                "    family: {kind: gaussian}\n"
                "    n_values: [20]\n"
            )

        assert exc_info.value.field == "ELLSHRINK_SEED"

    def test_bundled_configs_load(self, repository):
        """Test the shipped scenario documents validate"""
        fig1 = repository.load(os.path.join(CONFIG_DIR, "fig1.yaml"))
        fig2 = repository.load(os.path.join(CONFIG_DIR, "fig2.yaml"))
        fig3 = repository.load(os.path.join(CONFIG_DIR, "fig3.yaml"))

        assert len(fig1.scenarios) == 4
        assert len(fig2.scenarios[0].covariance_models()) == 11
        assert fig2.scenarios[1].estimators == ["LW"]
        assert fig2.scenarios[1].lw_eta2_factor is False
        assert len(fig2.scenarios[1].covariance_models()) == 11
        assert fig3.scenarios[1].lw_eta2_factor is False


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
