"""
Command-line entry point: rkit rearrange | energy | minimize | sweep | verify.
Human summaries go to stdout, logs to stderr, machine output to the --out files.
"""

import functools
import logging
import os
from dataclasses import replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import click
from rich.console import Console

from .checks.report import SuiteConfig
from .checks.suite import SUITE_ALIASES, SUITE_NAMES, VerificationSuite
from .core.config_manager import ConfigManager, GridDefaults
from .core.exceptions import GridError, RearrangementKitError
from .core.grid import Field1D, Grid1D, Grid2D
from .core.rearrange import (
    coupled_rearrangement,
    decreasing_rearrangement,
    schwarz_rearrangement,
    steiner_rearrangement,
    symmetric_rearrangement_1d,
)
from .functionals.energy import energy_breakdown, system_energy
from .functionals.nonlinearity import CoupledGSpec
from .functionals.spec_files import load_spec
from .solvers.gradient_flow import (
    ConstraintSpec,
    FlowConfig,
    minimize_scalar,
    minimize_system,
)
from .solvers.sweep import energy_curve_sweep
from .utils.field_io import emit_plot_data, json_text, load_field, save_field, write_json
from .utils.logger import StructuredLogger, setup_logging
from .utils.manifest import RunManifest

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = "config/config.yaml"
REARRANGEMENTS = ("decreasing", "symmetric", "steiner", "schwarz", "coupled")


class Settings:
    """Configuration resolved once per invocation."""

    def __init__(self, config_path: str, env: str):
        self.manager: Optional[ConfigManager] = None
        if Path(config_path).exists() or config_path != DEFAULT_CONFIG:
            self.manager = ConfigManager(config_path, env)

    def get(self, path: str, default: Any = None) -> Any:
        return self.manager.get(path, default) if self.manager else default

    @property
    def flow(self) -> FlowConfig:
        return self.manager.get_flow_config() if self.manager else FlowConfig()

    @property
    def suite(self) -> SuiteConfig:
        return self.manager.get_suite_config() if self.manager else SuiteConfig()

    @property
    def grid(self) -> GridDefaults:
        if self.manager:
            return self.manager.get_grid_defaults()
        return GridDefaults(length=30.0, h=0.05, dim=1)


def parse_grid(text: Optional[str], defaults: GridDefaults):
    """
    Parse "L=30,h=0.05" or "L=8,h=0.1,dim=2" into a centered grid.

    Raises:
        click.BadParameter: Malformed string
    """
    values: Dict[str, float] = {"L": defaults.length, "h": defaults.h, "dim": defaults.dim}
    if text:
        for item in text.split(","):
            key, sep, raw = item.partition("=")
            key = key.strip()
            if not sep or key not in values:
                raise click.BadParameter(f"expected L=..,h=..[,dim=..], got {text!r}")
            try:
                values[key] = float(raw)
            except ValueError as e:
                raise click.BadParameter(f"{key} must be a number, got {raw!r}") from e
    if values["L"] <= 0 or values["h"] <= 0:
        raise click.BadParameter(f"L and h must be positive, got {text!r}")
    dim = int(values["dim"])
    if dim not in (1, 2):
        raise click.BadParameter(f"dim must be 1 or 2, got {dim}")
    axis = Grid1D.covering(values["L"], values["h"])
    return axis if dim == 1 else Grid2D(axis, axis)


# Options that change how a run executes but not what it reports
RUNTIME_PARAMS = frozenset({"jobs"})


def _command_line(ctx: click.Context) -> List[str]:
    params = sorted(
        (k, v) for k, v in ctx.params.items() if v is not None and k not in RUNTIME_PARAMS
    )
    return ["rkit", ctx.info_name] + [f"--{k.replace('_', '-')}={v}" for k, v in params]


def handle_errors(func: Callable) -> Callable:
    """Map toolkit errors to exit codes: grid problems 2, everything else 1."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return func(*args, **kwargs)
        except GridError as e:
            logger.error(f"{ctx.info_name}: {e}")
            click.echo(f"error: {e}", err=True)
            ctx.exit(2)
        except (RearrangementKitError, FileNotFoundError) as e:
            logger.error(f"{ctx.info_name}: {e}")
            click.echo(f"error: {e}", err=True)
            ctx.exit(1)

    return wrapper


@click.group()
@click.option("--config", "config_path", default=DEFAULT_CONFIG, show_default=True)
@click.option("--env", default="development", show_default=True)
@click.option("--log-level", default=None, help="Overrides logging.level of the config")
@click.pass_context
def cli(ctx: click.Context, config_path: str, env: str, log_level: Optional[str]):
    """Discrete rearrangements, energies, ground states and inequality checks."""
    try:
        settings = Settings(config_path, env)
    except FileNotFoundError as e:
        raise click.BadParameter(str(e), param_hint="--config") from e
    level = log_level or settings.get("logging.level", "INFO")
    setup_logging(
        level=level,
        log_dir=settings.get("logging.directory"),
        max_file_size=settings.get("logging.rotation.max_size", "10MB"),
        backup_count=settings.get("logging.rotation.backup_count", 5),
    )
    ctx.obj = settings


@cli.command()
@click.option("--kind", type=click.Choice(REARRANGEMENTS), required=True)
@click.option("--input", "input_path", type=click.Path(), required=True)
@click.option("--second", "second_path", type=click.Path(), default=None)
@click.option("--output", "output_path", type=click.Path(), required=True)
@handle_errors
def rearrange(kind: str, input_path: str, second_path: Optional[str], output_path: str):
    """Rearrange a field CSV (coupled needs --second)."""
    u = load_field(input_path)
    if kind == "coupled":
        if second_path is None:
            raise click.UsageError("--kind coupled needs --second")
        result = coupled_rearrangement(u, load_field(second_path))
    elif kind == "decreasing":
        result = decreasing_rearrangement(_require_1d(u))
    elif kind == "symmetric":
        result = symmetric_rearrangement_1d(_require_1d(u))
    elif kind == "steiner":
        result = steiner_rearrangement(u)
    else:
        result = schwarz_rearrangement(u)
    save_field(result, output_path)
    click.echo(f"{kind} rearrangement: {result.values.size} cells written to {output_path}")


def _require_1d(u) -> Field1D:
    if not isinstance(u, Field1D):
        raise click.UsageError("this rearrangement needs a 1D field")
    return u


@cli.command()
@click.option("--spec", "spec_path", type=click.Path(), required=True)
@click.option("--input", "input_path", type=click.Path(), required=True)
@click.option("--second", "second_path", type=click.Path(), default=None)
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.pass_context
@handle_errors
def energy(
    ctx: click.Context,
    spec_path: str,
    input_path: str,
    second_path: Optional[str],
    out_path: Optional[str],
):
    """Evaluate I[u] (or J[u, v] for a coupled spec)."""
    spec = load_spec(spec_path)
    u = load_field(input_path)
    if isinstance(spec, CoupledGSpec):
        if second_path is None:
            raise click.UsageError("a coupled spec needs --second")
        data: Dict[str, Any] = system_energy(u, load_field(second_path), spec).to_dict()
    else:
        data = energy_breakdown(u, spec)
    data["spec"] = spec.to_dict()

    if not out_path:
        click.echo(json_text(data), nl=False)
        return
    click.echo(
        f"E = {data['total']:.12g} "
        f"(kinetic {data['kinetic']:.6g}, potential {data['potential']:.6g})"
    )
    manifest = RunManifest.capture(_command_line(ctx), spec.to_dict(), grid=u.grid.to_dict())
    write_json({"manifest": manifest.to_dict(), "energy": data}, out_path)


@cli.command()
@click.option("--spec", "spec_path", type=click.Path(), required=True)
@click.option("--alpha", type=float, required=True)
@click.option("--beta", type=float, default=0.0, show_default=True)
@click.option("--grid", "grid_text", default=None, help='e.g. "L=30,h=0.05" or "L=8,h=0.1,dim=2"')
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.option("--field-out", "field_out", type=click.Path(), default=None)
@click.option("--second-field-out", "second_field_out", type=click.Path(), default=None)
@click.pass_context
@handle_errors
def minimize(
    ctx: click.Context,
    spec_path: str,
    alpha: float,
    beta: float,
    grid_text: Optional[str],
    out_path: Optional[str],
    field_out: Optional[str],
    second_field_out: Optional[str],
):
    """Ground state on the mass sphere(s) by normalized gradient flow."""
    settings: Settings = ctx.obj
    spec = load_spec(spec_path)
    grid = parse_grid(grid_text, settings.grid)
    flow = settings.flow
    constraint = ConstraintSpec(alpha, beta)
    if isinstance(spec, CoupledGSpec):
        result = minimize_system(spec, constraint, grid, flow)
    else:
        result = minimize_scalar(spec, constraint, grid, flow)

    data = result.to_dict()
    StructuredLogger(logger).log_minimize_result(data)
    click.echo(
        f"E = {result.energy.total:.12g} | {result.diagnosis.value} after "
        f"{result.iterations} iterations | multipliers {list(result.multipliers)}"
    )
    if out_path:
        manifest = RunManifest.capture(
            _command_line(ctx),
            {"spec": spec.to_dict(), "flow": flow.to_dict()},
            seed=flow.seed,
            grid=result.grid.to_dict(),
        )
        write_json({"manifest": manifest.to_dict(), "result": data}, out_path)
    if field_out:
        save_field(result.fields[0], field_out)
    if second_field_out and len(result.fields) > 1:
        save_field(result.fields[1], second_field_out)


@cli.command()
@click.option("--spec", "spec_path", type=click.Path(), required=True)
@click.option("--alphas", required=True, help="Comma-separated increasing masses")
@click.option("--grid", "grid_text", default=None)
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.option("--plot-out", "plot_out", type=click.Path(), default=None)
@click.pass_context
@handle_errors
def sweep(
    ctx: click.Context,
    spec_path: str,
    alphas: str,
    grid_text: Optional[str],
    out_path: Optional[str],
    plot_out: Optional[str],
):
    """Energy curve alpha -> E_alpha for a scalar spec."""
    settings: Settings = ctx.obj
    try:
        masses = [float(a) for a in alphas.split(",") if a.strip()]
    except ValueError as e:
        raise click.BadParameter(f"--alphas must be numbers, got {alphas!r}") from e
    spec = load_spec(spec_path)
    if isinstance(spec, CoupledGSpec):
        raise click.UsageError("sweep needs a scalar spec")

    table = energy_curve_sweep(
        spec, masses, parse_grid(grid_text, settings.grid), settings.flow, progress=True
    )
    for row in table.itertuples(index=False):
        click.echo(f"alpha={row.alpha:g}  E={row.energy:.12g}  {row.diagnosis}")
    if out_path:
        emit_plot_data(table, out_path)
    if plot_out:
        emit_plot_data(table, plot_out, columns=["alpha", "energy"])


@cli.command()
@click.option(
    "--suite",
    "suites",
    multiple=True,
    type=click.Choice(SUITE_NAMES + tuple(SUITE_ALIASES) + ("all",)),
)
@click.option("--seed", type=int, default=None)
@click.option("--h", "h", type=float, default=None)
@click.option("--jobs", type=int, default=None)
@click.option("--field-count", type=int, default=None)
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.option("--refinement-out", type=click.Path(), default=None)
@click.option("--failures-only", is_flag=True, default=False)
@click.pass_context
@handle_errors
def verify(
    ctx: click.Context,
    suites,
    seed: Optional[int],
    h: Optional[float],
    jobs: Optional[int],
    field_count: Optional[int],
    out_path: Optional[str],
    refinement_out: Optional[str],
    failures_only: bool,
):
    """Run the inequality checks; exit 0 only if every check passed or was skipped."""
    settings: Settings = ctx.obj
    cfg = settings.suite
    env_seed = os.getenv("RKIT_SEED")
    overrides: Dict[str, Any] = {}
    if env_seed:
        overrides["seed"] = int(env_seed)
    elif seed is not None:
        overrides["seed"] = seed
    if suites:
        overrides["suites"] = list(suites)
    if h is not None:
        overrides["h"] = h
    if jobs is not None:
        overrides["jobs"] = jobs
    if field_count is not None:
        overrides["field_count"] = field_count
    cfg = replace(cfg, **overrides)

    result = VerificationSuite(cfg).run()
    result.render(Console(), failures_only=failures_only)

    if out_path:
        manifest = RunManifest.capture(
            _command_line(ctx),
            cfg.to_dict(),
            seed=cfg.seed,
            grid={"h": cfg.h, "flow_h": cfg.flow_h},
        )
        manifest.timings = result.timings
        write_json(result.to_dict(manifest), out_path)
    if refinement_out:
        emit_plot_data(result.refinement_table(), refinement_out)
    ctx.exit(result.exit_code)


def main():
    cli(prog_name="rkit")


if __name__ == "__main__":
    main()
