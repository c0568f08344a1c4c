"""Config-driven command line front end.

Experiments are described by a TOML file with a ``[params]`` section, exactly
one payload section naming the command, and an optional ``[output]`` section:

    [params]
    N = 50
    eps0 = 4.0
    eps = 2.0
    delta = 1.0
    omega = 1.0
    chi = 0.0
    g = 0.01
    T = 1.0
    boundary = "periodic"

    [qfi-time]
    estimator = "Temperature"
    modes = ["PulseCorrelated", "PulseUncorrelated"]
    t_min = 0.0
    t_max = 20.0
    t_points = 2001
    values = [0.5, 1.0, 2.0]

    [output]
    path = "fig1.csv"

Payload sections: ``[trajectory]``, ``[qfi-time]``, ``[opt-sweep]``,
``[compare]``, ``[oracle-check]``.  Each run writes one CSV whose comment
header embeds the fully resolved configuration, so the file documents the
experiment that produced it; re-running a config reproduces the CSV byte for
byte.

Exit codes: 0 success, 2 configuration error, 3 numeric-domain error.
Diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, fields, replace

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import estimation, oracle, qfi
from .dynamics import (ALL_MODES, PreparationMode, bloch_trajectory,
                       dynamics_points, prepare, trajectory_to_csv)
from .estimation import SweepSpec, compare_preparations, sweep_parameter
from .model import DomainError, ModelParams, ParameterError, validate_params
from .qfi import Estimator, QfiRoute
from .util import read_comment_header, write_csv_atomic


class ConfigError(Exception):
    """Malformed or inconsistent experiment configuration."""


# -- job payloads --------------------------------------------------------------

@dataclass(frozen=True)
class TrajectoryJob:
    mode: PreparationMode
    t_min: float = 0.0
    t_max: float = 10.0
    t_points: int = 101


@dataclass(frozen=True)
class QfiTimeJob:
    estimator: Estimator
    modes: tuple[PreparationMode, ...]
    t_min: float = 0.0
    t_max: float = 20.0
    t_points: int = 2001
    values: tuple[float, ...] = ()
    route: QfiRoute = QfiRoute.BLOCH
    rel_step: float = 1e-5


@dataclass(frozen=True)
class OptSweepJob:
    variable: Estimator
    values: tuple[float, ...]
    modes: tuple[PreparationMode, ...]
    t_min: float = 0.0
    t_max: float = 20.0
    grid_points: int = 2001
    refine_tol: float = 1e-6


@dataclass(frozen=True)
class CompareJob:
    estimator: Estimator
    x_value: float
    t_min: float = 0.0
    t_max: float = 20.0
    grid_points: int = 2001
    refine_tol: float = 1e-6


@dataclass(frozen=True)
class OracleCheckJob:
    N: tuple[int, ...] = (2, 4, 6)
    t_max: float = 10.0
    t_points: int = 101
    qfi_points: int = 0
    estimator: Estimator = Estimator.TEMPERATURE
    bloch_tol: float = 1e-9
    qfi_tol: float = 1e-6


_JOB_SECTIONS = {
    "trajectory": TrajectoryJob,
    "qfi-time": QfiTimeJob,
    "opt-sweep": OptSweepJob,
    "compare": CompareJob,
    "oracle-check": OracleCheckJob,
}


@dataclass(frozen=True)
class ExperimentConfig:
    params: ModelParams
    command: str
    job: object
    output_path: str | None = None


# -- parsing -------------------------------------------------------------------

def _parse_params(section: dict) -> ModelParams:
    known = {"N", "eps0", "eps", "delta", "omega", "chi", "g", "T", "boundary"}
    unknown = set(section) - known
    if unknown:
        raise ConfigError(f"unknown keys in [params]: {sorted(unknown)}")
    missing = {"N", "eps0", "eps", "delta"} - set(section)
    if missing:
        raise ConfigError(f"[params] is missing required keys: {sorted(missing)}")

    def seq_or_scalar(v):
        return tuple(float(x) for x in v) if isinstance(v, list) else float(v)

    try:
        return validate_params(ModelParams(
            n=section["N"],
            eps0=section["eps0"],
            eps=section["eps"],
            delta=section["delta"],
            omega=seq_or_scalar(section.get("omega", 1.0)),
            chi=seq_or_scalar(section.get("chi", 0.0)),
            g=float(section.get("g", 0.01)),
            T=float(section.get("T", 1.0)),
            boundary=section.get("boundary", "periodic"),
        ))
    except (ParameterError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid [params]: {exc}") from exc


def _parse_mode(value) -> PreparationMode:
    try:
        return PreparationMode(value)
    except ValueError as exc:
        raise ConfigError(
            f"unknown preparation mode {value!r}; expected one of "
            f"{[m.value for m in ALL_MODES]}") from exc


def _parse_modes(values) -> tuple[PreparationMode, ...]:
    if not isinstance(values, list) or not values:
        raise ConfigError("modes must be a non-empty list of preparation modes")
    return tuple(_parse_mode(v) for v in values)


def _parse_estimator(value) -> Estimator:
    try:
        return Estimator(value)
    except ValueError as exc:
        raise ConfigError(f"unknown estimator {value!r}; expected "
                          f"'Temperature' or 'Coupling'") from exc


def _check_keys(section: dict, allowed: set[str], name: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in [{name}]: {sorted(unknown)}")


def _parse_job(command: str, section: dict):
    if command == "trajectory":
        _check_keys(section, {"mode", "t_min", "t_max", "t_points"}, command)
        if "mode" not in section:
            raise ConfigError("[trajectory] requires a 'mode' key")
        return TrajectoryJob(mode=_parse_mode(section["mode"]),
                             t_min=float(section.get("t_min", 0.0)),
                             t_max=float(section.get("t_max", 10.0)),
                             t_points=int(section.get("t_points", 101)))
    if command == "qfi-time":
        _check_keys(section, {"estimator", "modes", "t_min", "t_max", "t_points",
                              "values", "route", "rel_step"}, command)
        if "estimator" not in section or "modes" not in section:
            raise ConfigError("[qfi-time] requires 'estimator' and 'modes'")
        try:
            route = QfiRoute(section.get("route", "bloch"))
        except ValueError as exc:
            raise ConfigError(f"unknown route {section.get('route')!r}") from exc
        return QfiTimeJob(estimator=_parse_estimator(section["estimator"]),
                          modes=_parse_modes(section["modes"]),
                          t_min=float(section.get("t_min", 0.0)),
                          t_max=float(section.get("t_max", 20.0)),
                          t_points=int(section.get("t_points", 2001)),
                          values=tuple(float(v) for v in section.get("values", [])),
                          route=route,
                          rel_step=float(section.get("rel_step", 1e-5)))
    if command == "opt-sweep":
        _check_keys(section, {"variable", "values", "modes", "t_min", "t_max",
                              "grid_points", "refine_tol"}, command)
        for key in ("variable", "values", "modes"):
            if key not in section:
                raise ConfigError(f"[opt-sweep] requires {key!r}")
        values = section["values"]
        if not isinstance(values, list) or not values:
            raise ConfigError("[opt-sweep] 'values' must be a non-empty list")
        return OptSweepJob(variable=_parse_estimator(section["variable"]),
                           values=tuple(float(v) for v in values),
                           modes=_parse_modes(section["modes"]),
                           t_min=float(section.get("t_min", 0.0)),
                           t_max=float(section.get("t_max", 20.0)),
                           grid_points=int(section.get("grid_points", 2001)),
                           refine_tol=float(section.get("refine_tol", 1e-6)))
    if command == "compare":
        _check_keys(section, {"estimator", "x_value", "t_min", "t_max",
                              "grid_points", "refine_tol"}, command)
        for key in ("estimator", "x_value"):
            if key not in section:
                raise ConfigError(f"[compare] requires {key!r}")
        return CompareJob(estimator=_parse_estimator(section["estimator"]),
                          x_value=float(section["x_value"]),
                          t_min=float(section.get("t_min", 0.0)),
                          t_max=float(section.get("t_max", 20.0)),
                          grid_points=int(section.get("grid_points", 2001)),
                          refine_tol=float(section.get("refine_tol", 1e-6)))
    if command == "oracle-check":
        _check_keys(section, {"N", "t_max", "t_points", "qfi_points", "estimator",
                              "bloch_tol", "qfi_tol"}, command)
        n_list = section.get("N", [2, 4, 6])
        if not isinstance(n_list, list) or not n_list:
            raise ConfigError("[oracle-check] 'N' must be a non-empty list")
        return OracleCheckJob(N=tuple(int(n) for n in n_list),
                              t_max=float(section.get("t_max", 10.0)),
                              t_points=int(section.get("t_points", 101)),
                              qfi_points=int(section.get("qfi_points", 0)),
                              estimator=_parse_estimator(section.get("estimator",
                                                                     "Temperature")),
                              bloch_tol=float(section.get("bloch_tol", 1e-9)),
                              qfi_tol=float(section.get("qfi_tol", 1e-6)))
    raise ConfigError(f"unknown command section [{command}]")  # pragma: no cover


def parse_config_text(text: str) -> ExperimentConfig:
    """Parse a TOML experiment description into a validated config."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"TOML syntax error: {exc}") from exc
    if "params" not in data:
        raise ConfigError("config needs a [params] section")
    payload_names = [name for name in _JOB_SECTIONS if name in data]
    if len(payload_names) != 1:
        raise ConfigError(
            f"config needs exactly one payload section out of "
            f"{sorted(_JOB_SECTIONS)}; found {payload_names or 'none'}")
    extra = set(data) - set(_JOB_SECTIONS) - {"params", "output"}
    if extra:
        raise ConfigError(f"unknown sections: {sorted(extra)}")
    command = payload_names[0]
    params = _parse_params(data["params"])
    job = _parse_job(command, data[command])
    output_path = None
    if "output" in data:
        _check_keys(data["output"], {"path"}, "output")
        output_path = str(data["output"]["path"])
    return ExperimentConfig(params=params, command=command, job=job,
                            output_path=output_path)


def load_config(path: str) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read())


# -- emission (config echo) ------------------------------------------------------

def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if value != value or math.isinf(value):
            raise ConfigError(f"cannot serialize non-finite float {value}")
        return repr(value)
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, (tuple, list)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    if isinstance(value, (PreparationMode, Estimator, QfiRoute)):
        return _toml_value(value.value)
    raise ConfigError(f"cannot serialize {value!r}")  # pragma: no cover


def config_to_toml(cfg: ExperimentConfig) -> str:
    """Serialize a resolved config back to its TOML form (deterministic)."""
    p = cfg.params
    lines = ["[params]"]
    for key, value in (("N", p.n), ("eps0", p.eps0), ("eps", p.eps),
                       ("delta", p.delta), ("omega", p.omega), ("chi", p.chi),
                       ("g", p.g), ("T", p.T), ("boundary", p.boundary)):
        lines.append(f"{key} = {_toml_value(value)}")
    lines.append("")
    lines.append(f"[{cfg.command}]")
    for f in fields(cfg.job):
        value = getattr(cfg.job, f.name)
        if isinstance(value, (PreparationMode, Estimator, QfiRoute)):
            value = value.value
        elif isinstance(value, tuple):
            value = [v.value if isinstance(v, (PreparationMode, Estimator)) else v
                     for v in value]
        lines.append(f"{f.name} = {_toml_value(value)}")
    if cfg.output_path is not None:
        lines.append("")
        lines.append("[output]")
        lines.append(f"path = {_toml_value(cfg.output_path)}")
    return "\n".join(lines) + "\n"


CONFIG_ECHO_BEGIN = "--- config ---"
CONFIG_ECHO_END = "--- end config ---"


def _echo_lines(cfg: ExperimentConfig) -> list[str]:
    # the echo records the experiment definition; the output location is
    # self-evident from the file and would break byte-reproducibility
    echoed = replace(cfg, output_path=None)
    lines = [CONFIG_ECHO_BEGIN]
    lines.extend(config_to_toml(echoed).rstrip("\n").split("\n"))
    lines.append(CONFIG_ECHO_END)
    return lines


def read_config_echo(csv_path: str) -> ExperimentConfig:
    """Recover the experiment config embedded in a result CSV header."""
    lines = read_comment_header(csv_path)
    try:
        start = lines.index(CONFIG_ECHO_BEGIN) + 1
        stop = lines.index(CONFIG_ECHO_END)
    except ValueError as exc:
        raise ConfigError(f"{csv_path} carries no config echo") from exc
    return parse_config_text("\n".join(lines[start:stop]))


# -- presets ---------------------------------------------------------------------

def _fig_base_params(**overrides) -> ModelParams:
    base = dict(n=50, eps0=4.0, eps=2.0, delta=1.0, omega=1.0, chi=0.0,
                g=0.01, T=1.0, boundary="periodic")
    base.update(overrides)
    return validate_params(ModelParams(**base))


_SWEEP_TEMPERATURES = tuple(round(0.2 * k, 10) for k in range(1, 16))  # 0.2 .. 3.0


def builtin_presets() -> dict[str, ExperimentConfig]:
    """The canonical experiment set: fig1 .. fig6 plus oracle-check.

    fig1   QFI vs time for temperature estimation at weak coupling (N = 50,
           g = 0.01), pulse preparation with and without correlations, at
           T in {0.5, 1, 2}.
    fig2   optimized QFI vs temperature, all four modes, same parameters.
    fig3   as fig2 at strong coupling g = 1.
    fig4   as fig2 with interacting bath spins (chi = 0.1) and N = 10.
    fig5   QFI vs time for coupling estimation at g = 0.1, T = 1.
    fig6   as fig5 at g = 0.5, T = 0.5.
    oracle-check   dense-oracle agreement report for small baths.
    """
    pulse_modes = (PreparationMode.PULSE_CORRELATED, PreparationMode.PULSE_UNCORRELATED)
    presets = {
        "fig1": ExperimentConfig(
            params=_fig_base_params(T=0.5),
            command="qfi-time",
            job=QfiTimeJob(estimator=Estimator.TEMPERATURE, modes=pulse_modes,
                           t_min=0.0, t_max=20.0, t_points=2001,
                           values=(0.5, 1.0, 2.0)),
            output_path="fig1.csv"),
        "fig2": ExperimentConfig(
            params=_fig_base_params(),
            command="opt-sweep",
            job=OptSweepJob(variable=Estimator.TEMPERATURE,
                            values=_SWEEP_TEMPERATURES, modes=ALL_MODES,
                            t_min=0.0, t_max=20.0),
            output_path="fig2.csv"),
        "fig3": ExperimentConfig(
            params=_fig_base_params(g=1.0),
            command="opt-sweep",
            job=OptSweepJob(variable=Estimator.TEMPERATURE,
                            values=_SWEEP_TEMPERATURES, modes=ALL_MODES,
                            t_min=0.0, t_max=20.0),
            output_path="fig3.csv"),
        "fig4": ExperimentConfig(
            params=_fig_base_params(n=10, chi=0.1),
            command="opt-sweep",
            job=OptSweepJob(variable=Estimator.TEMPERATURE,
                            values=_SWEEP_TEMPERATURES, modes=ALL_MODES,
                            t_min=0.0, t_max=20.0),
            output_path="fig4.csv"),
        "fig5": ExperimentConfig(
            params=_fig_base_params(g=0.1, T=1.0),
            command="qfi-time",
            job=QfiTimeJob(estimator=Estimator.COUPLING, modes=ALL_MODES,
                           t_min=0.0, t_max=10.0, t_points=2001),
            output_path="fig5.csv"),
        "fig6": ExperimentConfig(
            params=_fig_base_params(g=0.5, T=0.5),
            command="qfi-time",
            job=QfiTimeJob(estimator=Estimator.COUPLING, modes=ALL_MODES,
                           t_min=0.0, t_max=10.0, t_points=2001),
            output_path="fig6.csv"),
        "oracle-check": ExperimentConfig(
            params=validate_params(ModelParams(n=6, eps0=4.0, eps=2.0, delta=1.0,
                                               omega=1.0, chi=0.1, g=0.5, T=1.0)),
            command="oracle-check",
            job=OracleCheckJob(N=(2, 4, 6), t_max=10.0, t_points=101,
                               qfi_points=2, estimator=Estimator.TEMPERATURE),
            output_path="oracle-check.csv"),
    }
    return presets


# -- execution ---------------------------------------------------------------------

def _run_trajectory(cfg: ExperimentConfig, path: str) -> None:
    job: TrajectoryJob = cfg.job
    ts = np.linspace(job.t_min, job.t_max, job.t_points)
    points = dynamics_points(prepare(cfg.params, job.mode), ts)
    trajectory_to_csv(points, path, cfg.params, job.mode,
                      header_lines=tuple(_echo_lines(cfg)))


def _run_qfi_time(cfg: ExperimentConfig, path: str) -> None:
    job: QfiTimeJob = cfg.job
    ts = np.linspace(job.t_min, job.t_max, job.t_points)
    values = job.values or ((cfg.params.T,) if job.estimator is Estimator.TEMPERATURE
                            else (cfg.params.g,))
    records = []
    for value in values:
        px = replace(cfg.params, **{job.estimator.param_name: float(value)})
        for mode in job.modes:
            records.extend(qfi.qfi_trace(px, mode, ts, job.estimator,
                                         route=job.route, rel_step=job.rel_step))
    qfi.records_to_csv(records, path, cfg.params,
                       header_lines=tuple(_echo_lines(cfg)))


def _run_opt_sweep(cfg: ExperimentConfig, path: str) -> None:
    job: OptSweepJob = cfg.job
    spec = SweepSpec(variable=job.variable, values=job.values,
                     t_window=(job.t_min, job.t_max), grid_points=job.grid_points,
                     refine_tol=job.refine_tol, modes=job.modes)
    records = sweep_parameter(spec, cfg.params)
    for rec in records:
        if rec.error is not None:
            print(f"sweep cell failed: x={rec.x_value} mode={rec.mode.value}: "
                  f"{rec.error}", file=sys.stderr)
    estimation.sweep_to_csv(records, path, cfg.params, job.variable,
                            header_lines=tuple(_echo_lines(cfg)))


def _run_compare(cfg: ExperimentConfig, path: str) -> None:
    job: CompareJob = cfg.job
    result = compare_preparations(cfg.params, job.estimator, job.x_value,
                                  (job.t_min, job.t_max), job.grid_points,
                                  job.refine_tol)
    estimation.comparison_to_csv(result, path, cfg.params, job.estimator,
                                 header_lines=tuple(_echo_lines(cfg)))


def _run_oracle_check(cfg: ExperimentConfig, path: str) -> None:
    job: OracleCheckJob = cfg.job
    rows = []
    any_fail = False
    for n in job.N:
        if n > oracle.MAX_ORACLE_SPINS:
            raise ConfigError(f"oracle-check N={n} exceeds the dense limit "
                              f"{oracle.MAX_ORACLE_SPINS}")
        p = replace(cfg.params, n=n)
        ts = np.linspace(0.0, job.t_max, job.t_points)
        model = oracle.DenseModel(p)
        for mode in ALL_MODES:
            reference = model.bloch_trajectory(mode, ts)
            analytic = bloch_trajectory(prepare(p, mode), ts)
            bloch_dev = float(np.max(np.linalg.norm(analytic - reference, axis=1)))
            qfi_dev = math.nan
            if job.qfi_points > 0:
                t_checks = np.linspace(job.t_max / 4.0, job.t_max * 0.75, job.qfi_points)
                devs = []
                for t in t_checks:
                    f_fast = qfi.qfi_at(p, mode, float(t), job.estimator).F
                    f_ref = oracle.oracle_qfi(p, mode, float(t), job.estimator)
                    devs.append(abs(f_fast - f_ref) / max(abs(f_ref), 1e-300))
                qfi_dev = float(max(devs))
            ok = bloch_dev <= job.bloch_tol and (
                math.isnan(qfi_dev) or qfi_dev <= job.qfi_tol)
            any_fail = any_fail or not ok
            rows.append((n, mode.value, bloch_dev, qfi_dev, ok))
    if any_fail:
        print("oracle-check: some deviations exceed their thresholds", file=sys.stderr)
    write_csv_atomic(path, ("N", "mode", "max_bloch_dev", "max_qfi_rel_dev", "pass"),
                     rows, header_lines=tuple(_echo_lines(cfg)))


_RUNNERS = {
    "trajectory": _run_trajectory,
    "qfi-time": _run_qfi_time,
    "opt-sweep": _run_opt_sweep,
    "compare": _run_compare,
    "oracle-check": _run_oracle_check,
}


def run(cfg: ExperimentConfig, output_path: str | None = None) -> str:
    """Execute a config and return the path of the CSV it wrote."""
    path = output_path or cfg.output_path or f"{cfg.command}.csv"
    _RUNNERS[cfg.command](cfg, path)
    return path


# -- entry point --------------------------------------------------------------------

def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="spinprobe",
        description="Reduced spin-probe dynamics and Fisher-information experiments")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_run = sub.add_parser("run", help="execute a TOML experiment config")
    p_run.add_argument("config", help="path to the TOML config file")
    p_run.add_argument("--output", help="override the output CSV path")

    p_preset = sub.add_parser("preset", help="execute a builtin preset")
    p_preset.add_argument("name", help="preset name (see 'presets')")
    p_preset.add_argument("--output", help="override the output CSV path")

    sub.add_parser("presets", help="list builtin preset names")

    p_dump = sub.add_parser("dump-preset", help="print a preset as TOML")
    p_dump.add_argument("name", help="preset name")

    args = parser.parse_args(argv)

    try:
        if args.subcommand == "presets":
            for name in builtin_presets():
                print(name)
            return 0
        if args.subcommand == "dump-preset":
            presets = builtin_presets()
            if args.name not in presets:
                raise ConfigError(f"unknown preset {args.name!r}; "
                                  f"available: {', '.join(presets)}")
            sys.stdout.write(config_to_toml(presets[args.name]))
            return 0
        if args.subcommand == "preset":
            presets = builtin_presets()
            if args.name not in presets:
                raise ConfigError(f"unknown preset {args.name!r}; "
                                  f"available: {', '.join(presets)}")
            path = run(presets[args.name], output_path=args.output)
            print(f"wrote {path}", file=sys.stderr)
            return 0
        cfg = load_config(args.config)
        path = run(cfg, output_path=args.output)
        print(f"wrote {path}", file=sys.stderr)
        return 0
    except (ConfigError, ParameterError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"numeric-domain error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
