#!/usr/bin/env python3
"""
Elliptical Shrinkage Covariance Toolkit - Main Entry Point

Usage:
    python src/main.py bench --config configs/fig1.yaml --out fig1.csv --workers 4
    python src/main.py estimate --data data.csv --method ell --out cov.csv
    python src/main.py oracle --p 100 --n 100 --gamma 2 --kappa 0.5

Exit codes: 0 success, 1 runtime error, 2 usage/config error.
Environment: ELLSHRINK_SEED overrides every scenario's master seed.
"""

import click
import logging
import sys
import os

# Add src to path for imports
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from config.settings import settings
from domain.entities.covariance_model import ScaleSummary
from domain.entities.shrinkage_params import EstimatorMethod
from domain.exceptions import DataParseError, DomainError, EllShrinkError, ScenarioConfigError
from domain.repositories.scenario_repository import YamlScenarioRepository
from domain.services.oracle_service import OracleService
from domain.services.shrinkage_service import ShrinkageService

EXIT_RUNTIME = 1
EXIT_USAGE = 2

# Configure logging
logging.basicConfig(
    level=getattr(logging, settings.log_level.upper(), logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S'
)

logger = logging.getLogger(__name__)


def _fmt(value) -> str:
    return "undefined" if value is None else f"{value:.10g}"


@click.group(name="ellshrink")
def cli():
    """Shrinkage covariance estimation for elliptical populations"""
    pass


@cli.command()
@click.option('--config', 'config_path', required=True, type=click.Path(dir_okay=False), help='Scenario YAML document')
@click.option('--out', 'out_path', required=True, type=click.Path(dir_okay=False), help='CSV file to write')
@click.option('--workers', default=settings.default_workers, type=click.IntRange(min=1), help='Worker processes')
@click.pass_context
def bench(ctx, config_path, out_path, workers):
    """Run Monte Carlo NMSE scenarios and write one CSV"""
    from application.bench_runner import BenchRunner
    from infrastructure.io.csv_store import write_csv

    try:
        config = YamlScenarioRepository().load(config_path)
    except ScenarioConfigError as e:
        click.echo(f"❌ Config error in {config_path}: {e}", err=True)
        ctx.exit(EXIT_USAGE)

    click.echo(f"🔬 Running {len(config.scenarios)} scenario(s) with {workers} worker(s)...")
    try:
        records = BenchRunner().run_config(config, workers=workers)
        write_csv(records, out_path)
    except (EllShrinkError, ArithmeticError, OSError) as e:
        logger.error(f"Benchmark failed: {str(e)}")
        click.echo(f"❌ Benchmark failed: {str(e)}", err=True)
        ctx.exit(EXIT_RUNTIME)

    click.echo(f"\n📊 {len(records)} record(s) written to {out_path}")
    for r in records:
        click.echo(f"  {r.scenario:<24} {r.estimator:<10} n={r.n:<5} NMSE={r.mean_nmse:.5f} ± {r.se_nmse:.5f}  bound={r.oracle_nmse_bound:.5f}")


@cli.command()
@click.option('--data', 'data_path', required=True, type=click.Path(dir_okay=False), help='Numeric CSV, rows = observations')
@click.option('--method', required=True, type=click.Choice(['scm', 'lw', 'ell'], case_sensitive=False))
@click.option('--out', 'out_path', required=True, type=click.Path(dir_okay=False), help='CSV file for the estimate')
@click.option('--transpose', is_flag=True, help='Input file is variable-major (rows = variables)')
@click.pass_context
def estimate(ctx, data_path, method, out_path, transpose):
    """Estimate a covariance matrix from a data file"""
    from application.estimation_orchestrator import EstimationOrchestrator

    try:
        result = EstimationOrchestrator().estimate_file(data_path, EstimatorMethod.parse(method), out_path, transpose)
    except DataParseError as e:
        click.echo(f"❌ Cannot parse {data_path}: {e}", err=True)
        ctx.exit(EXIT_USAGE)
    except (EllShrinkError, ArithmeticError, OSError) as e:
        click.echo(f"❌ Estimation failed: {e}", err=True)
        ctx.exit(EXIT_RUNTIME)

    d = result.diagnostics
    click.echo(f"p: {result.p}")
    click.echo(f"n: {result.n}")
    click.echo(f"eta_hat: {_fmt(d['eta_hat'])}")
    click.echo(f"gamma_hat_sign: {_fmt(d['gamma_hat_sign'])}")
    click.echo(f"gamma_hat_plugin: {_fmt(d['gamma_hat_plugin'])}")
    click.echo(f"kappa_hat: {_fmt(d['kappa_hat'])}")
    click.echo(f"alpha_hat: {_fmt(result.params.alpha)}")
    click.echo(f"beta_hat: {_fmt(result.params.beta)}")


@cli.command()
@click.option('--p', 'p', required=True, type=int, help='Dimension')
@click.option('--n', 'n', required=True, type=int, help='Sample size')
@click.option('--gamma', required=True, type=float, help='Sphericity p tr(M^2)/tr(M)^2')
@click.option('--kappa', required=True, type=float, help='Elliptical kurtosis')
@click.option('--eta', default=1.0, type=float, show_default=True, help='Scale tr(M)/p')
@click.pass_context
def oracle(ctx, p, n, gamma, kappa, eta):
    """Print the closed-form elliptical oracle quantities"""
    oracle_service = OracleService()
    try:
        scale = ScaleSummary.from_eta_gamma(p, eta, gamma)
        moments = oracle_service.scm_moments(eta, gamma, kappa, n, p)
        params = ShrinkageService().oracle_params_elliptical(scale, kappa, n)
        optimal = oracle_service.optimal_nmse(gamma, params.beta)
    except (DomainError, ArithmeticError) as e:
        click.echo(f"❌ Invalid parameters: {e}", err=True)
        ctx.exit(EXIT_USAGE)

    click.echo(f"beta_o: {params.beta:.10g}")
    click.echo(f"alpha_o: {params.alpha:.10g}")
    click.echo(f"mse_scm: {moments.mse:.10g}")
    click.echo(f"nmse_scm: {moments.nmse:.10g}")
    click.echo(f"optimal_nmse: {optimal:.10g}")
    click.echo(f"eta2: {scale.eta2:.10g}")
    click.echo(f"expected_tr_s2: {moments.expected_tr_s2:.10g}")


if __name__ == "__main__":
    try:
        cli()
    except KeyboardInterrupt:
        click.echo("\n👋 Interrupted")
        sys.exit(EXIT_RUNTIME)
