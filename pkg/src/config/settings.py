from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import Optional

class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="ELLSHRINK_", env_file=".env", extra="ignore")

    # Seeding (ELLSHRINK_SEED overrides the master_seed of every scenario).
    # Kept as text so a malformed value surfaces as a config error when applied.
    seed: Optional[str] = None
    default_master_seed: int = 20170828

    # Monte Carlo harness
    default_trials: int = 10000
    default_workers: int = 1
    trial_block_size: int = 250

    # Numerical guards
    symmetry_tolerance: float = 1e-10
    max_cov_vec_dim: int = 50

    # Output
    csv_float_format: str = "%.17g"
    log_level: str = "INFO"

# Global settings instance
settings = Settings()
