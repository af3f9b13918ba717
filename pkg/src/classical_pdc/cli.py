"""
Command-line entry point.

Commands:
    verify   Quantum probability vs classical maximum gain for a builtin scenario
    sweep    Rotate one wing's analyzer
    scan     Random correspondence scan
    ode      Integrate three-wave mixing
    report   Full gain reports and eps-scaling per outcome

Each command's --help lists its CSV columns.

Exit status is 0 when every verdict agrees, 1 on disagreement, 2 on bad input.
"""

from __future__ import annotations

import dataclasses
import logging
import sys
from collections.abc import Sequence
from typing import Any
from typing import Literal

import click
import numpy as np

from ._constants import FORBIDDEN_GAIN_TOL
from ._constants import ODE_SNAPSHOT_STRIDE
from ._constants import THREADS_ENV
from ._constants import ZERO_PROBABILITY_TOL
from ._errors import DomainError
from ._errors import ResourceLimitError
from ._errors import UnknownScenarioError
from .artifact_store import ArtifactStore
from .artifact_store import render_csv
from .artifact_store import render_json
from .engine import epsilon_slope
from .scenarios import BUILTIN_NAMES
from .scenarios import OutcomeCheck
from .scenarios import builtin
from .scenarios import outcome_ratio
from .scenarios import phase_plate_check
from .scenarios import random_scan
from .scenarios import run_scenario
from .scenarios import sweep_angle
from .three_wave import ThreeWaveState
from .three_wave import energy_residual
from .three_wave import integrate
from .three_wave import manley_rowe_residual
from .three_wave import undepleted_gain

__all__ = ["RunConfig", "run", "parse_grid", "read_config_file", "cli"]

logger = logging.getLogger(__name__)

Command = Literal["verify", "sweep", "scan", "ode", "report"]
OutputFormat = Literal["csv", "json"]

_INPUTS_KEY = "classical_pdc.inputs"
_CONFIG_ALIASES = {"format": "fmt"}
_SLOPE_GRID = tuple(float(x) for x in np.logspace(-4, -1, 13))
# Slopes below this are read as linear (allowed) scaling, above as quadratic
_SLOPE_SPLIT = 1.5


def parse_grid(spec: str) -> tuple[float, ...]:
    """
    Parse "start:stop:count" into count evenly spaced values, endpoints included.

    Raises:
        DomainError: On malformed specs or count < 1
    """
    parts = spec.split(":")
    if len(parts) != 3:
        raise DomainError(f"Grid must be start:stop:count, got {spec!r}")

    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as err:
        raise DomainError(f"Grid must be start:stop:count, got {spec!r}") from err

    if count < 1:
        raise DomainError(f"Grid count must be >= 1: {count}")

    return tuple(float(x) for x in np.linspace(start, stop, count))


def read_config_file(path: str) -> dict[str, str]:
    """Read "key = value" lines; blank lines and # comments are skipped."""
    values: dict[str, str] = {}

    with open(path, encoding="utf-8") as infile:
        for lineno, raw in enumerate(infile, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue

            key, sep, value = line.partition("=")
            if not sep or not key.strip():
                raise DomainError(f"{path}:{lineno}: expected 'key = value'")

            values[key.strip().lstrip("-").replace("-", "_")] = value.strip()

    return values


@dataclasses.dataclass(frozen=True, slots=True)
class RunConfig:
    """
    Everything one command needs. Numeric fields are checked before dispatch.

    Args:
        output: Artifact path; None writes the artifact to stdout
        fmt: Artifact format; None for verify means summary lines only
        inputs: Files read by this run, never to be written
    """

    command: Command
    scenario: str = "max-entangled-diagonal"
    eps: float = 0.01
    wing: Literal[1, 2] = 2
    beta: tuple[float, ...] = ()
    label: str | None = None
    n: int = 1000
    rng_seed: int = 0
    phase_check: bool = False
    output: str | None = None
    fmt: OutputFormat | None = None
    threads: int = 1
    gain_tol: float = FORBIDDEN_GAIN_TOL
    zero_tol: float = ZERO_PROBABILITY_TOL
    e0: complex = 1.0
    e1: complex = 0.0
    e2: complex = 0.0
    w1: float = 1.0
    w2: float = 1.0
    gamma: float = 1.0
    t_end: float = 1.0
    dt: float = 1e-3
    stride: int = ODE_SNAPSHOT_STRIDE
    inputs: tuple[str, ...] = ()

    def validate(self) -> None:
        """
        Raises:
            DomainError: On the first invalid field
        """
        positive = {"eps": self.eps, "zero_tol": self.zero_tol, "threads": self.threads}
        if self.command == "ode":
            positive = {
                "w1": self.w1,
                "w2": self.w2,
                "gamma": self.gamma,
                "t_end": self.t_end,
                "dt": self.dt,
                "stride": self.stride,
                "threads": self.threads,
            }
        elif self.command == "scan":
            positive["n"] = self.n

        for name, value in positive.items():
            if not value > 0:
                raise DomainError(f"{name} must be positive: {value}")

        if self.gain_tol < 0:
            raise DomainError(f"gain_tol must be >= 0: {self.gain_tol}")
        if self.command == "sweep" and not self.beta:
            raise DomainError("sweep needs a beta grid")
        needs_scenario = self.command in ("verify", "sweep", "report")
        if needs_scenario and self.scenario not in BUILTIN_NAMES:
            raise UnknownScenarioError(self.scenario)


def _summary_line(scenario: str, check: OutcomeCheck) -> str:
    status = "agree" if check.agree else "DISAGREE"
    return (
        f"{scenario} {check.label}: prob={check.prob:.6g} "
        f"lambda_max={check.lambda_max:.6g} {check.verdict} {status}"
    )


class _Emitter:
    """Routes the artifact and the human-readable lines to the right streams."""

    def __init__(self, config: RunConfig) -> None:
        self._config = config
        self._store = ArtifactStore(protected=config.inputs)
        # Human lines move to stderr when stdout carries the artifact
        self._lines_to_stderr = config.output is None and config.fmt is not None

    def line(self, text: str) -> None:
        click.echo(text, err=self._lines_to_stderr)

    def artifact(
        self,
        rows: Sequence[dict[str, Any]],
        payload: Any,
        default: OutputFormat,
    ) -> None:
        fmt = self._config.fmt or default
        path = self._config.output

        if path is None:
            text = render_csv(rows) if fmt == "csv" else render_json(payload)
            click.echo(text, nl=False)
            return

        if fmt == "csv":
            self._store.write_csv(path, rows)
        else:
            self._store.write_json(path, payload)
        logger.info("Wrote %s", path)


def _run_verify(config: RunConfig, emit: _Emitter) -> int:
    record = run_scenario(
        builtin(config.scenario),
        config.eps,
        gain_tol=config.gain_tol,
        zero_tol=config.zero_tol,
    )
    for check in record.outcomes:
        emit.line(_summary_line(record.scenario, check))

    if config.fmt is not None or config.output is not None:
        rows = [
            {"scenario": record.scenario, "eps": record.eps, **check.asdict()}
            for check in record.outcomes
        ]
        emit.artifact(rows, record.asdict(), "json")

    return 0 if record.passed else 1


def _run_sweep(config: RunConfig, emit: _Emitter) -> int:
    rows = sweep_angle(
        builtin(config.scenario),
        config.wing,
        config.beta,
        config.eps,
        label=config.label,
        threads=config.threads,
    )
    table = [row.asdict() for row in rows]
    payload = {
        "scenario": config.scenario,
        "wing": config.wing,
        "eps": config.eps,
        "rows": table,
    }
    emit.artifact(table, payload, "csv")
    return 0


def _run_scan(config: RunConfig, emit: _Emitter) -> int:
    summary = random_scan(
        config.n,
        config.eps,
        config.rng_seed,
        threads=config.threads,
        gain_tol=config.gain_tol,
        zero_tol=config.zero_tol,
    )
    payload = summary.asdict()
    passed = summary.passed

    if config.phase_check:
        phase = phase_plate_check(config.n, config.eps, config.rng_seed)
        payload["phase_plate"] = {
            "n": phase.n,
            "identical": phase.identical,
            "mismatches": list(phase.mismatches),
        }
        passed = passed and phase.passed

    emit.line(
        f"scan n={summary.n} eps={summary.eps:g}: {summary.agreements} agree, "
        f"{summary.disagreements} disagree, {summary.indeterminate} indeterminate"
    )
    emit.artifact([case.asdict() for case in summary.cases], payload, "json")
    return 0 if passed else 1


def _run_ode(config: RunConfig, emit: _Emitter) -> int:
    init = ThreeWaveState.phase_matched(
        config.e0, config.e1, config.e2, config.w1, config.w2, config.gamma
    )
    traj = integrate(init, config.t_end, config.dt, stride=config.stride)
    mr1, mr2, mr3 = manley_rowe_residual(traj)

    emit.line(
        f"ode steps={traj.steps} alphaT={undepleted_gain(init, config.t_end):.6g} "
        f"manley_rowe=({mr1:.3e}, {mr2:.3e}, {mr3:.3e}) "
        f"energy={energy_residual(traj):.3e}"
    )
    rows = traj.to_rows()
    payload = {
        "steps": traj.steps,
        "dt": traj.dt,
        "manley_rowe_residual": [mr1, mr2, mr3],
        "rows": rows,
    }
    emit.artifact(rows, payload, "csv")
    return 0


def _run_report(config: RunConfig, emit: _Emitter) -> int:
    s = builtin(config.scenario)
    record = run_scenario(
        s,
        config.eps,
        gain_tol=config.gain_tol,
        zero_tol=config.zero_tol,
    )
    state = s.state
    entries = []

    for outcome, check in zip(s.outcomes, record.outcomes):
        slope = epsilon_slope(
            outcome.constraint(), state.a, state.b, _SLOPE_GRID, state.delta
        )
        try:
            ratio = outcome_ratio(outcome)
            ratio_pair: list[float] | None = [ratio.real, ratio.imag]
        except ZeroDivisionError:
            ratio_pair = None

        emit.line(_summary_line(s.name, check))
        entries.append(
            {
                "label": outcome.label,
                "expected_probability": str(outcome.expected_probability),
                "prob": check.prob,
                "agree": check.agree,
                "report": check.report.to_dict(),
                "eps_slope": slope,
                "scaling": "linear" if slope < _SLOPE_SPLIT else "quadratic",
                "field_ratio": ratio_pair,
            }
        )

    payload = {"scenario": s.name, "eps": config.eps, "outcomes": entries}
    rows = [
        {
            "label": entry["label"],
            "prob": entry["prob"],
            "lambda_max": entry["report"]["lambda_max"],
            "eps_slope": entry["eps_slope"],
        }
        for entry in entries
    ]
    emit.artifact(rows, payload, "json")
    return 0 if record.passed else 1


_DISPATCH = {
    "verify": _run_verify,
    "sweep": _run_sweep,
    "scan": _run_scan,
    "ode": _run_ode,
    "report": _run_report,
}


def run(config: RunConfig) -> int:
    """
    Validate and dispatch one command, returning its exit status.

    Raises:
        DomainError: When the configuration is invalid
        UnknownScenarioError: When the scenario is not a builtin
    """
    config.validate()
    logger.debug("Running %s", config)
    return _DISPATCH[config.command](config, _Emitter(config))


def _load_config(ctx: click.Context, _: click.Parameter, value: str | None) -> None:
    if value is None:
        return

    try:
        values = read_config_file(value)
    except DomainError as err:
        raise click.BadParameter(str(err)) from err

    values = {_CONFIG_ALIASES.get(key, key): item for key, item in values.items()}
    accepted = {
        name: {param.name for param in command.params}
        for name, command in cli.commands.items()
    }
    unknown = sorted(set(values).difference(*accepted.values()))
    if unknown:
        raise click.BadParameter(f"{value}: unknown key(s) {', '.join(unknown)}")

    ctx.default_map = {
        name: {key: item for key, item in values.items() if key in params}
        for name, params in accepted.items()
    }
    ctx.meta[_INPUTS_KEY] = (value,)



def _setup_logging(verbose: int) -> None:
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(verbose, 2)]
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _execute(ctx: click.Context, command: Command, **options: Any) -> None:
    grid = options.pop("beta", None)
    try:
        if grid is not None:
            options["beta"] = parse_grid(grid)
        inputs = ctx.meta.get(_INPUTS_KEY, ())
        config = RunConfig(command=command, inputs=inputs, **options)
        code = run(config)
    except UnknownScenarioError as err:
        raise click.UsageError(f"Unknown scenario: {err.args[0]}", ctx) from err
    except (DomainError, ResourceLimitError) as err:
        raise click.UsageError(str(err), ctx) from err

    ctx.exit(code)


_scenario_option = click.option(
    "--scenario",
    type=click.Choice(BUILTIN_NAMES),
    default="max-entangled-diagonal",
    show_default=True,
)
_eps_option = click.option("--eps", type=float, default=0.01, show_default=True)
_output_option = click.option(
    "--output",
    type=click.Path(dir_okay=False, writable=True),
    default=None,
    help="Write the artifact here (atomically) instead of stdout.",
)
_threads_option = click.option(
    "--threads",
    type=click.IntRange(min=1),
    default=1,
    envvar=THREADS_ENV,
    show_default=True,
    help=f"Worker threads for independent rows (env {THREADS_ENV}).",
)
_gain_tol_option = click.option(
    "--gain-tol",
    type=float,
    default=FORBIDDEN_GAIN_TOL,
    show_default=True,
    help="lambda_max at or below this is classically forbidden.",
)
_zero_tol_option = click.option(
    "--zero-tol",
    type=float,
    default=ZERO_PROBABILITY_TOL,
    show_default=True,
    help="Quantum probabilities below this are zeros.",
)


def _format_option(default: OutputFormat | None) -> Any:
    return click.option(
        "--format",
        "fmt",
        type=click.Choice(["csv", "json"]),
        default=default,
        show_default=True,
    )


@click.group()
@click.option(
    "--config",
    type=click.Path(exists=True, dir_okay=False),
    callback=_load_config,
    is_eager=True,
    expose_value=False,
    help="key = value file presetting any option; explicit flags win.",
)
@click.option("-v", "--verbose", count=True, help="-v for info, -vv for debug.")
def cli(verbose: int) -> None:
    """Classical parametric down-conversion and joint-outcome gain checks."""
    _setup_logging(verbose)


@cli.command()
@_scenario_option
@_eps_option
@_gain_tol_option
@_zero_tol_option
@_format_option(None)
@_output_option
@click.pass_context
def verify(ctx: click.Context, **options: Any) -> None:
    """
    Check every outcome of a scenario; one summary line per outcome.

    \b
    CSV columns: scenario, eps, label, prob, lambda_max, verdict, agree
    """
    _execute(ctx, "verify", **options)


@cli.command()
@_scenario_option
@click.option("--wing", type=click.Choice(["1", "2"]), default="2", show_default=True)
@click.option("--beta", required=True, help="Angles as start:stop:count (radians).")
@click.option("--label", default=None, help="Outcome to sweep [first forbidden].")
@_eps_option
@_threads_option
@_format_option("csv")
@_output_option
@click.pass_context
def sweep(ctx: click.Context, wing: str, **options: Any) -> None:
    """
    Sweep one wing's analyzer angle.

    \b
    CSV columns: beta, prob, lambda_max
    """
    _execute(ctx, "sweep", wing=int(wing), **options)


@cli.command()
@click.option("--n", type=int, default=1000, show_default=True)
@click.option("--eps", type=float, default=1e-3, show_default=True)
@click.option("--rng-seed", type=click.IntRange(min=0), default=0, show_default=True)
@click.option(
    "--phase-check/--no-phase-check",
    default=False,
    help="Also run the phase-plate cancellation check.",
)
@_threads_option
@_gain_tol_option
@_zero_tol_option
@_format_option("json")
@_output_option
@click.pass_context
def scan(ctx: click.Context, **options: Any) -> None:
    """
    Random state/setting correspondence scan with forced exact zeros.

    With --format csv, one row per case.

    \b
    CSV columns: index, forced_zero, a, b, prob, lambda_max, status
    """
    _execute(ctx, "scan", **options)


@cli.command()
@click.option("--e0", type=complex, default=1.0, show_default=True, help="Pump.")
@click.option("--e1", type=complex, default=0.1, show_default=True)
@click.option("--e2", type=complex, default=0.0, show_default=True)
@click.option("--w1", type=float, default=1.0, show_default=True)
@click.option("--w2", type=float, default=1.0, show_default=True)
@click.option("--gamma", type=float, default=1.0, show_default=True)
@click.option("--t-end", type=float, default=1.0, show_default=True)
@click.option("--dt", type=float, default=1e-3, show_default=True)
@click.option("--stride", type=int, default=ODE_SNAPSHOT_STRIDE, show_default=True)
@_format_option("csv")
@_output_option
@click.pass_context
def ode(ctx: click.Context, **options: Any) -> None:
    """
    Integrate three-wave mixing and report conservation residuals.

    \b
    CSV columns: t, e0_re, e0_im, e1_re, e1_im, e2_re, e2_im,
                 mr_1, mr_2, mr_3
    """
    _execute(ctx, "ode", **options)


@cli.command()
@_scenario_option
@_eps_option
@_gain_tol_option
@_zero_tol_option
@_format_option("json")
@_output_option
@click.pass_context
def report(ctx: click.Context, **options: Any) -> None:
    """
    Full gain report and eps-scaling for every outcome of a scenario.

    \b
    CSV columns: label, prob, lambda_max, eps_slope
    """
    _execute(ctx, "report", **options)