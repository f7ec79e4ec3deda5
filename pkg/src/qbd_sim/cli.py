"""Command-line front end.

Four commands share one flag set:

* ``steady``      stationary photon distribution and its statistics
* ``sweep``       stationary mean and Fano factor over a phase grid
* ``trajectory``  seeded Monte-Carlo detection record with observer filter
* ``passage``     per-level atom outcome probabilities at one phase

Values resolve as flags > config file > built-in defaults.  The config
file (``--config`` or the ``QBD_SIM_CONFIG`` environment variable) is
flat ``key = value`` text with ``#`` comments; keys equal the long flag
names without the leading dashes.  Every output starts with comment lines
echoing the fully resolved configuration, so a result file documents how
to reproduce itself.

Exit status: 0 success, 1 I/O failure, 2 usage error, 3 physics/numerics
error (e.g. a truncation breach).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .errors import ParameterError, QbdSimError, UsageError
from .master_equation import build_generator, statistics, steady_state_analytic
from .output import (
    fmt,
    passage_csv,
    steady_csv,
    svg_line_plot,
    sweep_csv,
    trajectory_csv,
)
from .physics import DerivedRates, PhysicalParams, passage_weight_table
from .sweep import PhaseSweepSpec, run_sweep
from .trajectory import TrajectoryConfig, simulate

ENV_CONFIG_VAR = "QBD_SIM_CONFIG"

COMMANDS = ("steady", "sweep", "trajectory", "passage")

# key -> (type tag, default); order defines the echo-header layout.
_KEY_SPEC: dict[str, tuple[str, object]] = {
    "frequency-hz": ("float", 21.456e9),
    "q-factor": ("float", 2e9),
    "temperature-k": ("float", 1.4),
    "atom-rate": ("float", 3000.0),
    "phi": ("float", math.pi / 2),
    "n-max": ("int", 40),
    "phi-min": ("float", 0.05),
    "phi-max": ("float", 3.0),
    "steps": ("int", 600),
    "duration-s": ("float", 10.0),
    "seed": ("int", 0),
    "arrival": ("choice:poisson,regular", "poisson"),
    "initial-n": ("int", 0),
    "record-stride": ("int", 1),
    "output": ("str", "-"),
    "format": ("choice:csv,csv+svg", "csv"),
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    frequency_hz: float
    q_factor: float
    temperature_k: float
    atom_rate: float
    phi: float
    n_max: int
    phi_min: float
    phi_max: float
    steps: int
    duration_s: float
    seed: int
    arrival: str
    initial_n: int
    record_stride: int
    output: str
    output_format: str

    def physical_params(self) -> PhysicalParams:
        return PhysicalParams(frequency=self.frequency_hz, q_factor=self.q_factor,
                              temperature=self.temperature_k,
                              atom_rate=self.atom_rate, phase=self.phi)

    def trajectory_config(self) -> TrajectoryConfig:
        return TrajectoryConfig(params=self.physical_params(),
                                duration=self.duration_s, seed=self.seed,
                                n_max=self.n_max, arrival_model=self.arrival,
                                initial_n=self.initial_n,
                                record_stride=self.record_stride)

    def sweep_spec(self) -> PhaseSweepSpec:
        return PhaseSweepSpec(params=self.physical_params(), phi_min=self.phi_min,
                              phi_max=self.phi_max, steps=self.steps,
                              n_max=self.n_max)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would call sys.exit(2)
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="qbd-sim", add_help=True,
                     description="Cavity qubit-detector simulator")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", metavar="FILE")
    for key, (kind, _default) in _KEY_SPEC.items():
        flag = f"--{key}"
        if kind == "float":
            parser.add_argument(flag, type=float, default=argparse.SUPPRESS)
        elif kind == "int":
            parser.add_argument(flag, type=int, default=argparse.SUPPRESS)
        elif kind.startswith("choice:"):
            parser.add_argument(flag, choices=kind.split(":", 1)[1].split(","),
                                default=argparse.SUPPRESS)
        else:
            parser.add_argument(flag, default=argparse.SUPPRESS)
    return parser


def _convert(key: str, raw: str) -> object:
    kind = _KEY_SPEC[key][0]
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            return int(raw)
    except ValueError:
        raise UsageError(f"config key '{key}': invalid {kind} value: '{raw}'") from None
    if kind.startswith("choice:"):
        choices = kind.split(":", 1)[1].split(",")
        if raw not in choices:
            raise UsageError(f"config key '{key}': invalid choice: '{raw}' "
                             f"(choose from {', '.join(choices)})")
    return raw


def parse_config_text(text: str) -> dict[str, object]:
    """Parse flat ``key = value`` config text; unknown keys are rejected."""
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise UsageError(f"config line {lineno}: expected 'key = value', "
                             f"got '{stripped}'")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in _KEY_SPEC:
            raise UsageError(f"config line {lineno}: unknown key '{key}'")
        values[key] = _convert(key, raw.strip())
    return values


def parse_config(argv: list[str], config_text: str | None = None) -> RunConfig:
    """Resolve argv (plus optional config text) into a validated RunConfig.

    Flags override config-file values, which override built-in defaults.
    When ``config_text`` is None the file named by ``--config`` (or by
    the QBD_SIM_CONFIG environment variable) is read instead.
    """
    namespace = _build_parser().parse_args(argv)
    if config_text is None:
        path = getattr(namespace, "config", None) or os.environ.get(ENV_CONFIG_VAR)
        if path:
            config_text = Path(path).read_text()
    file_values = parse_config_text(config_text) if config_text else {}

    merged = {key: default for key, (_kind, default) in _KEY_SPEC.items()}
    merged.update(file_values)
    for key in _KEY_SPEC:
        attr = key.replace("-", "_")
        if hasattr(namespace, attr):
            merged[key] = getattr(namespace, attr)

    config = RunConfig(
        command=namespace.command,
        frequency_hz=merged["frequency-hz"],
        q_factor=merged["q-factor"],
        temperature_k=merged["temperature-k"],
        atom_rate=merged["atom-rate"],
        phi=merged["phi"],
        n_max=merged["n-max"],
        phi_min=merged["phi-min"],
        phi_max=merged["phi-max"],
        steps=merged["steps"],
        duration_s=merged["duration-s"],
        seed=merged["seed"],
        arrival=merged["arrival"],
        initial_n=merged["initial-n"],
        record_stride=merged["record-stride"],
        output=merged["output"],
        output_format=merged["format"],
    )
    try:
        # Validate every override through the library constructors before
        # dispatch, whichever command was requested.
        config.physical_params()
        config.trajectory_config()
        config.sweep_spec()
    except ParameterError as exc:
        raise UsageError(str(exc)) from exc
    if config.output_format == "csv+svg" and config.output == "-":
        raise UsageError("--format csv+svg requires --output FILE")
    return config


def build_header(config: RunConfig) -> list[str]:
    """Comment lines echoing the resolved config.

    Applying ``line.removeprefix('# ')`` to each line yields valid
    config-file text (the '## qbd-sim ...' version line keeps its leading
    '#' and parses as a comment), so a result file can be replayed:
    ``parse_config([command], config_text=stripped_header)``.
    """
    values = {
        "frequency-hz": config.frequency_hz,
        "q-factor": config.q_factor,
        "temperature-k": config.temperature_k,
        "atom-rate": config.atom_rate,
        "phi": config.phi,
        "n-max": config.n_max,
        "phi-min": config.phi_min,
        "phi-max": config.phi_max,
        "steps": config.steps,
        "duration-s": config.duration_s,
        "seed": config.seed,
        "arrival": config.arrival,
        "initial-n": config.initial_n,
        "record-stride": config.record_stride,
        "output": config.output,
        "format": config.output_format,
    }
    lines = [f"## qbd-sim {__version__} command = {config.command}"]
    for key, (kind, _default) in _KEY_SPEC.items():
        value = values[key]
        text = fmt(value) if kind == "float" else str(value)
        lines.append(f"# {key} = {text}")
    return lines


def _render(config: RunConfig) -> tuple[str, str | None]:
    """Produce (csv text, svg text or None) for the configured command."""
    header = build_header(config)
    params = config.physical_params()
    rates = DerivedRates.from_params(params)
    want_svg = config.output_format == "csv+svg"

    if config.command == "steady":
        dist = steady_state_analytic(build_generator(params, rates, config.n_max))
        stats = statistics(dist)
        csv_text = steady_csv(header, dist, stats)
        svg = None
        if want_svg:
            levels = list(range(dist.probs.size))
            svg = svg_line_plot([("p(n)", [(levels, dist.probs)])], "photon number n",
                                title="stationary photon distribution")
        return csv_text, svg

    if config.command == "sweep":
        rows = run_sweep(config.sweep_spec())
        csv_text = sweep_csv(header, rows)
        svg = None
        if want_svg:
            phis = [row.phi for row in rows]
            means = [row.mean_n for row in rows]
            fanos = [row.fano if row.fano is not None else math.nan for row in rows]
            svg = svg_line_plot([("mean photon number", [(phis, means)]),
                                 ("Fano factor", [(phis, fanos)])],
                                "Rabi phase (rad)", title="stationary phase sweep")
        return csv_text, svg

    if config.command == "trajectory":
        record = simulate(config.trajectory_config())
        csv_text = trajectory_csv(header, record)
        svg = None
        if want_svg:
            times = record.sample_times
            codes = record.sample_outcomes.astype(float)
            codes[record.sample_outcomes == 255] = math.nan  # "no outcome yet"
            svg = svg_line_plot(
                [("detected state", [(times, codes)]),
                 ("filter mean", [(times, record.sample_filter_mean)]),
                 ("filter std", [(times, record.sample_filter_std)])],
                "time (s)", title="qubit detection record")
        return csv_text, svg

    # passage
    csv_text = passage_csv(header, config.n_max, config.phi)
    svg = None
    if want_svg:
        table = passage_weight_table(config.n_max, config.phi)
        levels = list(range(config.n_max + 1))
        svg = svg_line_plot([("outcome probability",
                              [(levels, table[:, 0]), (levels, table[:, 1]),
                               (levels, table[:, 2])])],
                            "photon number n", title="passage outcome weights")
    return csv_text, svg


def run(config: RunConfig) -> int:
    """Execute a validated RunConfig; returns 0 (errors propagate)."""
    csv_text, svg_text = _render(config)
    if config.output == "-":
        sys.stdout.write(csv_text)
    else:
        with open(config.output, "w", newline="") as handle:
            handle.write(csv_text)
    if svg_text is not None:
        svg_path = str(Path(config.output).with_suffix(".svg"))
        with open(svg_path, "w", newline="") as handle:
            handle.write(svg_text)
    return 0


def main(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    try:
        config = parse_config(argv)
        return run(config)
    except UsageError as exc:
        print(f"qbd-sim: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"qbd-sim: I/O error: {exc}", file=sys.stderr)
        return 1
    except QbdSimError as exc:
        print(f"qbd-sim: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
