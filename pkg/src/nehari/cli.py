"""Configuration parsing, experiment orchestration, and report emission.

Config files are plain ``key = value`` lines grouped under ``[section]``
headers (sections: mesh, params, solver, output). The CLI is

    nehari <command> --config <path> [--out <dir>]

with commands solve, fibering, thresholds, sobolev, verify. Exit codes:
0 success, 1 numerical failure, 2 configuration or I/O error. Identical
configs produce byte-identical output files; wall time is printed to
stdout only, never written into artifacts.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from .descent import (
    SolverOptions,
    SolverReport,
    find_two_solutions,
    verify_solution,
)
from .energy import NehariClass, ProblemParams, nehari_quantities
from .errors import (
    ConfigInvalid,
    ConfigNotFound,
    DistinctnessFailure,
    InvalidParams,
    IoFailure,
    MeshMismatch,
    NehariError,
    NonConvergence,
    UnknownPreset,
)
from .fibering import fibering_phi, find_nehari_scalings, m0_empty_certificate
from .mesh import build_mesh, read_field_csv, sample_weight, write_field_csv
from .sobolev import best_sobolev_constant

COMMANDS = ("solve", "fibering", "thresholds", "sobolev", "verify")

_MESH_KEYS = {"dimension", "extents", "nodes"}
_PARAMS_KEYS = {"p", "q", "r", "s", "lambda", "mu", "f", "g", "h"}
_SOLVER_KEYS = {
    "max_iterations",
    "step_initial",
    "armijo_factor",
    "armijo_slope",
    "tol_residual",
    "tol_energy",
    "seed_strategy",
    "positivity_floor",
}
_OUTPUT_KEYS = {"directory", "emit_fields"}
_SECTIONS = {
    "mesh": _MESH_KEYS,
    "params": _PARAMS_KEYS,
    "solver": _SOLVER_KEYS,
    "output": _OUTPUT_KEYS,
}


@dataclass
class RunConfig:
    """Fully validated run configuration."""

    mesh: object
    params: ProblemParams
    options: SolverOptions
    output_directory: str
    emit_fields: bool
    echo: list


@dataclass
class RunSummary:
    """One summary per invocation, emitted even on failure.

    Wall time is carried here for stdout reporting but is never written
    into summary.txt, keeping identical runs byte-identical.
    """

    command: str
    echo: list
    lines: list
    exit_status: int
    wall_time: float = 0.0


def _parse_sections(path):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = handle.readlines()
    except OSError as exc:
        raise ConfigNotFound(f"cannot read config {path}: {exc}") from None
    sections = {}
    current = None
    for lineno, line in enumerate(raw, start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if text.startswith("[") and text.endswith("]"):
            current = text[1:-1].strip().lower()
            if current not in _SECTIONS:
                raise ConfigInvalid(current, "unknown section", lineno)
            sections.setdefault(current, {})
            continue
        if "=" not in text:
            raise ConfigInvalid(text, "expected key = value", lineno)
        if current is None:
            raise ConfigInvalid(text.split("=")[0].strip(), "entry outside any section", lineno)
        key, _, value = text.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if key not in _SECTIONS[current]:
            raise ConfigInvalid(key, f"unknown key in [{current}]", lineno)
        if key in sections[current]:
            raise ConfigInvalid(key, "duplicate key", lineno)
        sections[current][key] = (value, lineno)
    return sections


def _require(sections, section, key):
    try:
        return sections[section][key]
    except KeyError:
        raise ConfigInvalid(key, f"missing required key in [{section}]", None) from None


def _as_float(key, value, lineno):
    try:
        return float(value)
    except ValueError:
        raise ConfigInvalid(key, f"not a number: {value!r}", lineno) from None


def _as_int(key, value, lineno):
    try:
        return int(value)
    except ValueError:
        raise ConfigInvalid(key, f"not an integer: {value!r}", lineno) from None


def _as_bool(key, value, lineno):
    low = value.strip().lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ConfigInvalid(key, f"not a boolean: {value!r}", lineno)


def load_config(path):
    """Parse and fully validate a config file into a RunConfig.

    Solver keys default when omitted; unknown keys and sections are
    rejected with the offending line number.
    """
    if not os.path.isfile(path):
        raise ConfigNotFound(f"config file not found: {path}")
    sections = _parse_sections(path)
    for required in ("mesh", "params"):
        if required not in sections:
            raise ConfigInvalid(required, "missing required section", None)

    value, lineno = _require(sections, "mesh", "dimension")
    dimension = _as_int("dimension", value, lineno)
    if dimension not in (1, 2):
        raise ConfigInvalid("dimension", "must be 1 or 2", lineno)
    value, lineno = _require(sections, "mesh", "extents")
    try:
        axis_specs = [part.strip() for part in value.split(";")]
        extents = tuple(
            tuple(float(x) for x in spec.split(",")) for spec in axis_specs
        )
        if any(len(pair) != 2 for pair in extents):
            raise ValueError
    except ValueError:
        raise ConfigInvalid("extents", f"expected lo,hi per axis: {value!r}", lineno) from None
    value, lineno = _require(sections, "mesh", "nodes")
    try:
        nodes = tuple(int(x) for x in value.split(","))
    except ValueError:
        raise ConfigInvalid("nodes", f"expected integers: {value!r}", lineno) from None
    if dimension == 1:
        if len(extents) != 1 or len(nodes) != 1:
            raise ConfigInvalid("extents", "one axis expected for dimension 1", lineno)
        mesh_extents, mesh_nodes = extents[0], nodes[0]
    else:
        if len(extents) != 2 or len(nodes) != 2:
            raise ConfigInvalid("extents", "two axes expected for dimension 2", lineno)
        mesh_extents, mesh_nodes = extents, nodes
    try:
        mesh = build_mesh(dimension, mesh_extents, mesh_nodes)
    except NehariError as exc:
        raise ConfigInvalid("nodes", str(exc), lineno) from None

    numbers = {}
    for key in ("p", "q", "r", "s", "lambda", "mu"):
        value, lineno = _require(sections, "params", key)
        numbers[key] = (_as_float(key, value, lineno), lineno)
    p, p_line = numbers["p"]
    q, q_line = numbers["q"]
    if q >= p:
        raise ConfigInvalid("q", "requires q < p", q_line)
    weights = {}
    for key in ("f", "g", "h"):
        value, lineno = _require(sections, "params", key)
        try:
            weights[key] = sample_weight(mesh, value)
        except (UnknownPreset, MeshMismatch) as exc:
            raise ConfigInvalid(key, str(exc), lineno) from None
    try:
        params = ProblemParams(
            p=p,
            q=q,
            r=numbers["r"][0],
            s=numbers["s"][0],
            lam=numbers["lambda"][0],
            mu=numbers["mu"][0],
            f=weights["f"],
            g=weights["g"],
            h=weights["h"],
        )
    except InvalidParams as exc:
        raise ConfigInvalid("params", str(exc), None) from None

    solver_kwargs = {}
    solver_section = sections.get("solver", {})
    for key, (value, lineno) in solver_section.items():
        if key == "max_iterations":
            solver_kwargs[key] = _as_int(key, value, lineno)
        elif key == "seed_strategy":
            solver_kwargs[key] = value
        else:
            solver_kwargs[key] = _as_float(key, value, lineno)
    try:
        options = SolverOptions(**solver_kwargs)
    except InvalidParams as exc:
        raise ConfigInvalid("solver", str(exc), None) from None

    output_section = sections.get("output", {})
    directory = output_section.get("directory", ("out", None))[0]
    emit_value, emit_line = output_section.get("emit_fields", ("true", None))
    emit_fields = _as_bool("emit_fields", emit_value, emit_line)

    echo = ["[config]"]
    echo.append(f"mesh.dimension = {dimension}")
    echo.append("mesh.extents = " + " ; ".join(f"{lo!r},{hi!r}" for lo, hi in mesh.extents))
    echo.append("mesh.nodes = " + ",".join(str(n) for n in mesh.nodes_per_axis))
    for key in ("p", "q", "r", "s"):
        echo.append(f"params.{key} = {numbers[key][0]!r}")
    echo.append(f"params.lambda = {numbers['lambda'][0]!r}")
    echo.append(f"params.mu = {numbers['mu'][0]!r}")
    for key in ("f", "g", "h"):
        echo.append(f"params.{key} = {sections['params'][key][0]}")
    for key in sorted(_SOLVER_KEYS):
        echo.append(f"solver.{key} = {getattr(options, key)}")
    echo.append(f"output.directory = {directory}")
    echo.append(f"output.emit_fields = {str(emit_fields).lower()}")

    return RunConfig(mesh, params, options, directory, emit_fields, echo)


def _report_lines(label, report: SolverReport):
    return [
        f"{label}.converged = {str(report.converged).lower()}",
        f"{label}.iterations = {report.iterations}",
        f"{label}.energy = {report.energy!r}",
        f"{label}.residual_max = {report.residual_max!r}",
        f"{label}.constraint_residual = {report.constraint_residual!r}",
        f"{label}.min_interior_u = {report.min_interior_u!r}",
        f"{label}.min_interior_v = {report.min_interior_v!r}",
    ]


def _history_csv(report: SolverReport):
    lines = ["iteration,energy"]
    for i, value in enumerate(report.energy_history):
        lines.append(f"{i},{value!r}")
    return "\n".join(lines) + "\n"


def _run_solve(config):
    lines = []
    artifacts = {}
    params, mesh, options = config.params, config.mesh, config.options
    rs = params.rs
    lines.append(f"coupling_coefficients = {params.r / rs!r},{params.s / rs!r}")
    status = 0
    try:
        import warnings as _warnings

        with _warnings.catch_warnings(record=True) as caught:
            _warnings.simplefilter("always")
            plus, minus, distinctness = find_two_solutions(params, mesh, options)
        for warning in caught:
            lines.append(f"warning = {warning.message}")
    except DistinctnessFailure as exc:
        plus = getattr(exc, "plus", None)
        minus = getattr(exc, "minus", None)
        distinctness = exc.distinctness
        lines.append(f"error = {exc}")
        status = 1
    except (NonConvergence, NehariError) as exc:
        report = getattr(exc, "report", None)
        lines.append(f"error = {exc}")
        if report is not None:
            lines.extend(_report_lines(str(report.branch).lower(), report))
        return lines, artifacts, 1
    lines.append(f"distinctness = {distinctness!r}")
    for label, report in (("plus", plus), ("minus", minus)):
        if report is None:
            continue
        lines.extend(_report_lines(label, report))
        artifacts[f"energy_history_{label}.csv"] = _history_csv(report)
        if config.emit_fields:
            artifacts[f"u_{label}.csv"] = report.solution.u
            artifacts[f"v_{label}.csv"] = report.solution.v
        if not report.converged:
            status = 1
        if not (
            report.min_interior_u > options.positivity_floor
            and report.min_interior_v > options.positivity_floor
        ):
            lines.append(f"{label}.positivity_violation = true")
            status = 1
    return lines, artifacts, status


def _run_fibering(config):
    from .descent import _seed_candidates

    params, mesh = config.params, config.mesh
    seed = _seed_candidates(params, config.options)[0]
    diag = nehari_quantities(params, seed)
    analysis = find_nehari_scalings(params, diag)
    lines = [
        f"seed = {config.options.seed_strategy}",
        f"K = {analysis.K!r}",
        f"A = {analysis.A!r}",
        f"B = {analysis.B!r}",
        f"t_max = {'none' if analysis.t_max is None else repr(analysis.t_max)}",
        f"root_count = {len(analysis.roots)}",
    ]
    for i, root in enumerate(analysis.roots):
        lines.append(f"root_{i}.t = {root.t!r}")
        lines.append(f"root_{i}.phi = {root.phi!r}")
        lines.append(f"root_{i}.branch = {root.branch}")
    t_ref = analysis.t_max if analysis.t_max is not None else 1.0
    if analysis.roots:
        t_ref = max(t_ref, max(root.t for root in analysis.roots))
    grid = np.geomspace(t_ref * 1e-3, t_ref * 1e1, 512)
    rows = ["t,phi,dphi"]
    for t in grid:
        phi, dphi = fibering_phi(params, diag, float(t))
        rows.append(f"{float(t)!r},{phi!r},{dphi!r}")
    return lines, {"fibering.csv": "\n".join(rows) + "\n"}, 0


def _run_thresholds(config):
    params, mesh = config.params, config.mesh
    s_q = best_sobolev_constant(mesh, params.p, params.q)
    s_rs = best_sobolev_constant(mesh, params.p, params.rs)
    certificate = m0_empty_certificate(params, s_rs.value, s_q.value, params.lam, params.mu)
    lines = [
        f"mesh_nodes = {','.join(str(n) for n in certificate.mesh_nodes)}",
        f"S_q = {s_q.value!r}",
        f"S_rs = {s_rs.value!r}",
        f"lower_bound = {certificate.lower_bound!r}",
        f"upper_coefficient = {certificate.upper_coefficient!r}",
        f"upper_exponent = {certificate.upper_exponent!r}",
        f"upper_value = {certificate.upper_value!r}",
        f"lambda0 = {certificate.lambda0!r}",
        f"mu0 = {certificate.mu0!r}",
        f"certified = {str(certificate.certified).lower()}",
    ]
    return lines, {}, 0


def _run_sobolev(config):
    params, mesh = config.params, config.mesh
    lines = []
    for label, l_value in (("q", params.q), ("rs", params.rs), ("p", params.p)):
        constant = best_sobolev_constant(mesh, params.p, l_value)
        lines.append(f"S_{label}.l = {l_value!r}")
        lines.append(f"S_{label}.value = {constant.value!r}")
        lines.append(f"S_{label}.pair_reduction_factor = {constant.pair_reduction_factor!r}")
        lines.append(f"S_{label}.iterations = {constant.iterations}")
    return lines, {}, 0


def _run_verify(config, directory):
    from .mesh import PairField

    params, mesh, options = config.params, config.mesh, config.options
    lines = []
    status = 0
    for label, expected in (("plus", NehariClass.PLUS), ("minus", NehariClass.MINUS)):
        try:
            u = read_field_csv(mesh, os.path.join(directory, f"u_{label}.csv"), dirichlet=True)
            v = read_field_csv(mesh, os.path.join(directory, f"v_{label}.csv"), dirichlet=True)
        except OSError as exc:
            raise IoFailure(f"cannot read solution fields from {directory}: {exc}") from None
        record = verify_solution(params, PairField(u, v), tol=options.tol_residual)
        lines.append(f"{label}.residual_max = {record.residual_max!r}")
        lines.append(f"{label}.constraint_residual = {record.constraint_residual!r}")
        lines.append(f"{label}.positivity = {record.positivity!r}")
        lines.append(f"{label}.branch = {record.branch}")
        ok = (
            record.residual_max <= options.tol_residual
            and record.branch is expected
            and record.positivity > options.positivity_floor
        )
        lines.append(f"{label}.verified = {str(ok).lower()}")
        if not ok:
            status = 1
    return lines, {}, status


def run_command(command, config, out_dir=None):
    """Dispatch one CLI command; returns (RunSummary, artifacts dict)."""
    if command not in COMMANDS:
        raise ConfigInvalid("command", f"unknown command {command!r}", None)
    directory = out_dir if out_dir is not None else config.output_directory
    started = time.perf_counter()
    if command == "solve":
        lines, artifacts, status = _run_solve(config)
    elif command == "fibering":
        lines, artifacts, status = _run_fibering(config)
    elif command == "thresholds":
        lines, artifacts, status = _run_thresholds(config)
    elif command == "sobolev":
        lines, artifacts, status = _run_sobolev(config)
    else:
        lines, artifacts, status = _run_verify(config, directory)
    wall = time.perf_counter() - started
    summary = RunSummary(command, list(config.echo), lines, status, wall)
    return summary, artifacts


def write_report(summary, artifacts, directory):
    """Write summary.txt plus artifact files; byte-identical for identical inputs."""
    try:
        os.makedirs(directory, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create output directory {directory}: {exc}") from None
    body = [f"command = {summary.command}", f"exit_status = {summary.exit_status}"]
    body.extend(summary.echo)
    body.append("[results]")
    body.extend(summary.lines)
    try:
        with open(os.path.join(directory, "summary.txt"), "w", encoding="utf-8") as handle:
            handle.write("\n".join(body) + "\n")
        for name, payload in sorted(artifacts.items()):
            path = os.path.join(directory, name)
            if isinstance(payload, str):
                with open(path, "w", encoding="utf-8") as handle:
                    handle.write(payload)
            else:
                write_field_csv(payload, path)
    except OSError as exc:
        raise IoFailure(f"cannot write outputs to {directory}: {exc}") from None


def main(argv=None):
    """CLI entry point; returns the process exit code."""
    parser = argparse.ArgumentParser(
        prog="nehari",
        description="Two-branch constrained minimization experiments for a "
        "concave-convex elliptic system.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="path to the run configuration")
    parser.add_argument("--out", default=None, help="output directory (overrides config)")
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config)
        directory = args.out if args.out is not None else config.output_directory
        summary, artifacts = run_command(args.command, config, directory)
        write_report(summary, artifacts, directory)
    except (ConfigNotFound, ConfigInvalid, IoFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NehariError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for line in summary.lines:
        print(line)
    print(f"wall_time_seconds = {summary.wall_time:.3f}")
    print(f"exit_status = {summary.exit_status}")
    return summary.exit_status


if __name__ == "__main__":
    sys.exit(main())
