"""Command-line front end.

Subcommands: norm, success, phase-diagram, centering, simulate.  Each takes
--config (INI or JSON), optional --output / --format / --seed.  Exit codes:
0 success, 2 config/validation errors, 3 capacity errors, 4 numeric-domain
errors.  Parallelism is controlled by the PECBENCH_WORKERS environment
variable (default: all cores); output bytes are independent of the worker
count.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import centering, hubbard
from .advantage import classify, pec_success_proxy, raw_success, sweep, worker_count
from .config import RunConfig, config_hash, load_config
from .errors import CapacityError, ConfigError, NumericDomainError, ValidationError
from .report import (
    centering_artifact,
    grid_to_csv,
    grid_to_json,
    grid_to_svg,
    make_provenance,
    phase_artifact,
    report_to_json,
)
from .simulator import simulate_report

_GRID_FORMATS = ("csv", "json", "svg")


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _seeded(config: RunConfig, override: int | None) -> int:
    return config.seed() if override is None else override


def _check_format(fmt: str, allowed) -> str:
    if fmt not in allowed:
        raise ConfigError(f"--format must be one of {'/'.join(allowed)}, got {fmt!r}")
    return fmt


def cmd_norm(config: RunConfig, args) -> str:
    _check_format(args.format or "json", ("json",))
    spec = config.hubbard_spec()
    if spec is None:
        norm2sq, trace_over_d = config._norm_quantities()
        report = {"norm2_squared": norm2sq, "trace_over_d": trace_over_d,
                  "term_count": None, "source": "explicit"}
    else:
        decomp = hubbard.build_hubbard_pauli(spec)
        report = {
            "norm2_squared": hubbard.norm2_squared(decomp),
            "trace_over_d": decomp.identity_coefficient,
            "term_count": len(decomp.terms),
            "qubits": decomp.n,
            "source": "model",
        }
    report["config_hash"] = config_hash(config)
    return report_to_json(report)


def cmd_success(config: RunConfig, args) -> str:
    _check_format(args.format or "json", ("json",))
    prob = config.advantage_problem()
    p = config.p_layer()
    n_shots = config.shots()
    report = {
        "p": p,
        "n_shots": n_shots,
        "threshold": prob.threshold,
        "pec_success": pec_success_proxy(prob, n_shots, p=p),
        "raw_success": raw_success(prob, n_shots, p=p),
        "label": classify(prob, p, n_shots),
        "config_hash": config_hash(config),
    }
    return report_to_json(report)


def cmd_phase_diagram(config: RunConfig, args) -> str:
    fmt = _check_format(args.format or "csv", _GRID_FORMATS)
    prob = config.advantage_problem()
    grid = sweep(prob, config.p_axis(), config.shot_axis(), workers=worker_count())
    artifact = phase_artifact(
        grid, make_provenance(config_hash(config), _seeded(config, args.seed)))
    if fmt == "csv":
        return grid_to_csv(artifact)
    if fmt == "json":
        return grid_to_json(artifact)
    return grid_to_svg(artifact)


def cmd_centering(config: RunConfig, args) -> str:
    fmt = _check_format(args.format or "csv", _GRID_FORMATS)
    n_shift, n_width = config.centering_axes()
    shift_axis = centering.default_shift_axis(n_shift)
    width_axis = centering.default_width_axis(n_width)
    true_grid = np.empty((len(shift_axis), len(width_axis)))
    proxy_grid = np.empty_like(true_grid)
    for i, shift in enumerate(shift_axis):
        for j, width in enumerate(width_axis):
            point = centering.CenteringPoint(rel_shift=shift, rel_width=width)
            true_grid[i, j] = centering.true_success(point)
            proxy_grid[i, j] = centering.proxy_success(width)
    error_grid = centering.relative_error_map(shift_axis, width_axis)

    region = np.ix_(shift_axis <= 0.8, width_axis < 0.1)
    region_max = float(np.nanmax(error_grid[region]))
    provenance = make_provenance(config_hash(config), _seeded(config, args.seed))
    provenance["region_max"] = f"{region_max:.11e}"

    artifact = centering_artifact(shift_axis, width_axis, true_grid, proxy_grid,
                                  error_grid, provenance)
    if fmt == "csv":
        return grid_to_csv(artifact)
    if fmt == "json":
        return grid_to_json(artifact)
    return grid_to_svg(artifact)


def cmd_simulate(config: RunConfig, args) -> str:
    _check_format(args.format or "json", ("json",))
    spec = config.hubbard_spec()
    if spec is None:
        raise ConfigError("simulate requires a [model] section (an explicit "
                          "[hamiltonian] summary cannot be simulated)")
    seed = _seeded(config, args.seed)
    report = simulate_report(spec, config.noise_spec(),
                             n_shots=config.simulate_shots(), seed=seed,
                             batch=config.simulate_batch(),
                             workers=worker_count())
    report["provenance"] = make_provenance(config_hash(config), seed)
    return report_to_json(report)


_COMMANDS = {
    "norm": cmd_norm,
    "success": cmd_success,
    "phase-diagram": cmd_phase_diagram,
    "centering": cmd_centering,
    "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pecbench",
        description="Shot-budget-aware quantum-advantage benchmarking with "
                    "probabilistic error cancellation.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func in _COMMANDS.items():
        cmd = sub.add_parser(name, help=func.__doc__)
        cmd.add_argument("--config", required=True, help="INI or JSON config file")
        cmd.add_argument("--output", default=None, help="write here instead of stdout")
        cmd.add_argument("--format", default=None, choices=_GRID_FORMATS,
                         help="artifact format (default: csv for grids, json for reports)")
        cmd.add_argument("--seed", type=int, default=None,
                         help="override the config seed")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        text = _COMMANDS[args.command](config, args)
        _emit(text, args.output)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except NumericDomainError as exc:
        print(f"numeric-domain error: {exc}", file=sys.stderr)
        return 4
    except ValidationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
