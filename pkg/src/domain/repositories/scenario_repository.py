from abc import ABC, abstractmethod
from pathlib import Path
import logging

import yaml
from pydantic import ValidationError

from config.settings import settings
from domain.entities.scenario_config import BenchConfig, ScenarioConfig
from domain.exceptions import ScenarioConfigError

logger = logging.getLogger(__name__)


class ScenarioRepositoryInterface(ABC):
    """Abstract interface for scenario document storage"""

    @abstractmethod
    def load(self, path) -> BenchConfig:
        """Load and validate a scenario document"""
        pass


class YamlScenarioRepository(ScenarioRepositoryInterface):
    """Scenario documents stored as YAML files.

    ELLSHRINK_SEED, when set, replaces the master_seed of every scenario.
    """

    def load(self, path) -> BenchConfig:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ScenarioConfigError(f"cannot read '{path}': {e}") from e
        config = self.parse(text)
        logger.info(f"Loaded {len(config.scenarios)} scenario(s) from {path}")
        return config

    def parse(self, text: str) -> BenchConfig:
        try:
            document = yaml.safe_load(text)
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            line = mark.line + 1 if mark is not None else None
            problem = getattr(e, "problem", None) or str(e)
            raise ScenarioConfigError(f"invalid YAML: {problem}", line=line) from e

        if not isinstance(document, dict):
            raise ScenarioConfigError("document must be a mapping with a 'scenarios' list", field="scenarios")

        try:
            config = BenchConfig.model_validate(document)
        except ValidationError as e:
            first = e.errors()[0]
            field = ".".join(str(part) for part in first["loc"])
            raise ScenarioConfigError(first["msg"], field=field) from e

        if settings.seed is not None:
            config = self._override_seed(config, settings.seed)
        return config

    def _override_seed(self, config: BenchConfig, seed) -> BenchConfig:
        """Re-validates every scenario with master_seed replaced"""
        try:
            scenarios = [
                ScenarioConfig.model_validate({**s.model_dump(), "master_seed": seed}) for s in config.scenarios
            ]
        except ValidationError as e:
            raise ScenarioConfigError(e.errors()[0]["msg"], field="ELLSHRINK_SEED") from e
        logger.info(f"ELLSHRINK_SEED={seed} overrides scenario master seeds")
        return BenchConfig(scenarios=scenarios)
