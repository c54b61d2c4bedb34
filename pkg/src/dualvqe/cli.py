"""Command-line entry point.

Subcommands map to the experiment runners (tfim, xyz, spin1, sweep-ni,
all2all, compare); `validate` runs the built-in oracle and invariant
checks. Exit codes: 0 success, 1 configuration error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys

import numpy as np

from . import ansatz as anz
from . import experiments as exp
from . import trainer as trn
from .hamiltonians import (
    build_spin1_heisenberg,
    build_tfim,
    build_xyz,
    ground_state,
    spin1_direct_ed,
    spin1_intra_pair_offset,
)
from .schmidt import schmidt_rank
from .statevector import ConfigurationError, ValidationError

logger = logging.getLogger("dualvqe")

_SUBCOMMANDS = {
    "tfim": "tfim_scan",
    "xyz": "xyz_grid",
    "spin1": "spin1_scan",
    "sweep-ni": "interconnect_sweep",
    "all2all": "all_to_all_sweep",
    "compare": "compare_architectures",
}

_TRAINING_KEYS = {f.name for f in dataclasses.fields(trn.TrainingConfig)}
_CONFIG_KEYS = {f.name for f in dataclasses.fields(exp.ExperimentConfig)}


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage errors as exit-code-1 config errors."""

    def error(self, message: str):
        raise _ArgumentError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="dualvqe", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="command")
    for name, experiment in _SUBCOMMANDS.items():
        p = sub.add_parser(name, help=f"run the {experiment} experiment")
        p.set_defaults(experiment=experiment)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", help="output file path")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--seed", type=int)
        p.add_argument("--restarts", type=int)
        p.add_argument("--threads", type=int)
        p.add_argument("--quiet", action="store_true", default=None)
    v = sub.add_parser("validate", help="run oracle and invariant checks")
    v.add_argument("--quiet", action="store_true", default=None)
    return parser


def _load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read config {path!r}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError("config file must hold a JSON object")
    return data


def _tuplify(value):
    return tuple(value) if isinstance(value, list) else value


def _merge_config(experiment: str, file_data: dict, args) -> exp.ExperimentConfig:
    cfg = exp.default_config(experiment)
    training = cfg.training
    exp_kwargs: dict = {}

    file_experiment = file_data.pop("experiment", None)
    if file_experiment is not None and file_experiment != experiment:
        raise ConfigurationError(
            f"config file targets {file_experiment!r}, subcommand runs "
            f"{experiment!r}"
        )
    nested = file_data.pop("training", None)
    if nested is not None:
        if not isinstance(nested, dict):
            raise ConfigurationError("'training' must be a JSON object")
        file_data.update(nested)
    for key, value in file_data.items():
        if key in _TRAINING_KEYS:
            training = dataclasses.replace(training, **{key: value})
        elif key in _CONFIG_KEYS:
            if key == "sizes":
                value = tuple(int(v) for v in value)
            exp_kwargs[key] = _tuplify(value)
        else:
            raise ConfigurationError(f"unknown config key {key!r}")

    if args.seed is not None:
        training = dataclasses.replace(training, rng_seed=args.seed)
    if args.restarts is not None:
        training = dataclasses.replace(training, restarts=args.restarts)
    if args.out is not None:
        exp_kwargs["out"] = args.out
    if args.format is not None:
        exp_kwargs["format"] = args.format
    if args.threads is not None:
        exp_kwargs["threads"] = args.threads
    if args.quiet is not None:
        exp_kwargs["quiet"] = args.quiet
    exp_kwargs["training"] = training

    cfg = dataclasses.replace(cfg, **exp_kwargs)
    if cfg.out is None:
        raise ConfigurationError(
            "no output path: pass --out or set 'out' in the config file"
        )
    return cfg


def _check(name: str, ok: bool, detail: str = "") -> bool:
    tag = "PASS" if ok else "FAIL"
    suffix = f": {detail}" if (detail and not ok) else ""
    print(f"{tag} {name}{suffix}")
    return ok


def run_validation() -> int:
    """Oracle and invariant checks; exit 0 when everything passes."""
    ok = True
    g = ground_state(build_tfim(2, 1, 1))
    ok &= _check(
        "tfim_n2_ground_energy",
        abs(g.energy + np.sqrt(5)) < 1e-10,
        f"E={g.energy!r}",
    )
    g6 = ground_state(build_tfim(6, 1, 0))
    ok &= _check(
        "tfim_classical_limit",
        abs(g6.energy + 5.0) < 1e-9 and g6.degeneracy_flag,
        f"E={g6.energy!r} degenerate={g6.degeneracy_flag}",
    )
    gx = ground_state(build_xyz(2, 1, 1, 1, 0))
    ok &= _check(
        "xyz_two_site_singlet", abs(gx.energy + 0.75) < 1e-10, f"E={gx.energy!r}"
    )
    for n_pairs in (2, 3):
        mapped = ground_state(build_spin1_heisenberg(n_pairs, 1.0, 10.0))
        shifted = mapped.energy - spin1_intra_pair_offset(n_pairs, 10.0)
        direct = spin1_direct_ed(n_pairs, 1.0)
        ok &= _check(
            f"spin1_mapping_{n_pairs}_sites",
            abs(shifted - direct) < 1e-9,
            f"mapped={shifted!r} direct={direct!r}",
        )

    rng = np.random.default_rng(99)
    for arch, spec in (
        ("dual_core", anz.build_dual_core(4, 2, 2)),
        ("all_to_all", anz.build_all_to_all(4, 2)),
    ):
        circuit = anz.compile_ansatz(spec)
        params = rng.uniform(-np.pi, np.pi, anz.param_count(spec))
        target = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        target /= np.linalg.norm(target)
        _, grad = circuit.fidelity_and_grad(params, target)
        step = 1e-5
        worst = 0.0
        for i in range(len(params)):
            params[i] += step
            fp = float(circuit.fidelity(params, target))
            params[i] -= 2 * step
            fm = float(circuit.fidelity(params, target))
            params[i] += step
            fd = (fp - fm) / (2 * step)
            worst = max(worst, abs(fd - grad[i]) / max(1.0, abs(fd)))
        ok &= _check(f"gradient_vs_fd_{arch}", worst < 1e-6, f"dev={worst:.2e}")

    violations = 0
    for n_i in range(3):
        spec = anz.build_dual_core(6, n_i, 2)
        circuit = anz.compile_ansatz(spec)
        for draw in range(30):
            p = np.random.default_rng((n_i, draw)).uniform(
                -np.pi, np.pi, anz.param_count(spec)
            )
            psi = anz.evaluate(spec, p)
            if schmidt_rank(psi, 3, 1e-10) > (1 << n_i):
                violations += 1
    ok &= _check("interconnect_rank_law", violations == 0, f"{violations} violations")
    return 0 if ok else 2


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _ArgumentError as exc:
        print(f"dualvqe: error: {exc}", file=sys.stderr)
        return 1
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1

    quiet = bool(getattr(args, "quiet", False))
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.WARNING if quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )

    if args.command == "validate":
        try:
            return run_validation()
        except Exception as exc:  # noqa: BLE001 - report and set exit code
            logger.error("validation crashed: %s", exc)
            return 2

    try:
        file_data = _load_config_file(args.config) if args.config else {}
        config = _merge_config(args.experiment, file_data, args)
    except (ConfigurationError, ValidationError, TypeError, ValueError) as exc:
        print(f"dualvqe: config error: {exc}", file=sys.stderr)
        return 1
    try:
        exp.run_experiment(config)
    except Exception as exc:  # noqa: BLE001 - runtime failure -> exit 2
        logger.error("experiment failed: %s", exc)
        return 2
    return 0


def cli_main(argv: list[str] | None = None) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
