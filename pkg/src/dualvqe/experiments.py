"""Experiment harness: reproduces the benchmark scans as machine-readable
rows (CSV or JSON).

Experiments: TFIM transverse-field scan, XYZ coupling grid, spin-1 size
scan, interconnect sweep, all-to-all layer sweep, and the dual-core vs
all-to-all comparison. Each (model point, architecture) yields one row;
per-point failures become error rows and the run continues. Fixed seeds
give byte-identical output files.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, replace

import numpy as np

from . import ansatz as anz
from . import trainer as trn
from .hamiltonians import (
    Hamiltonian,
    build_spin1_heisenberg,
    build_tfim,
    build_xyz,
    ground_state,
)
from .schmidt import discarded_weight, schmidt_decompose
from .statevector import ConfigurationError

logger = logging.getLogger(__name__)

EXPERIMENTS = (
    "tfim_scan",
    "xyz_grid",
    "spin1_scan",
    "interconnect_sweep",
    "all_to_all_sweep",
    "compare_architectures",
)

# Columns of every output row, in order. wall_time is tracked per row in
# memory and reported on stderr, but kept out of files so a fixed seed
# yields byte-identical output.
CSV_COLUMNS = (
    "experiment",
    "model",
    "model_params",
    "architecture",
    "n_i",
    "num_layers",
    "param_count",
    "seed",
    "e_gs",
    "e_var",
    "epsilon_signed",
    "epsilon_abs",
    "infidelity",
    "discarded_weight",
    "status",
)


def _default_h_grid() -> tuple[float, ...]:
    grid = [round(0.1 * k, 10) for k in range(21)]
    grid.append(0.73)
    return tuple(sorted(set(grid)))


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    # model grids
    h_values: tuple[float, ...] = _default_h_grid()
    jy_values: tuple[float, ...] = (-1.0, -0.5, 0.0, 0.5, 1.0)
    jz_values: tuple[float, ...] = (-1.0, -0.5, 0.0, 0.5, 1.0)
    hx_values: tuple[float, ...] = (0.0, 0.5, 1.0)
    sizes: tuple[int, ...] = (4, 6, 8, 10, 12)
    num_qubits: int = 12
    coupling_j: float = 1.0
    j_fm: float = 10.0
    # circuit structure
    architectures: tuple[str, ...] = ("separable", "dual_core")
    n_interconnect: int = 3
    layers_per_block: int = 3
    all_to_all_layers: int = 7
    spin1_extra_layer_sizes: tuple[int, ...] = (10,)
    compare_models: tuple[str, ...] = ("tfim", "spin1")
    # training
    training: trn.TrainingConfig = trn.TrainingConfig()
    # output
    out: str | None = None
    format: str = "csv"
    threads: int = 1  # accepted for CLI compatibility; computation is
    # vectorized in-process, so this never affects results
    quiet: bool = False

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigurationError(f"unknown experiment {self.experiment!r}")
        if self.format not in ("csv", "json"):
            raise ConfigurationError(f"unknown output format {self.format!r}")
        for grid_name in ("h_values", "jy_values", "jz_values", "hx_values", "sizes"):
            if not len(getattr(self, grid_name)):
                raise ConfigurationError(f"{grid_name} must be non-empty")
        for n in self.sizes:
            if n % 2 or n > 12:
                raise ConfigurationError(
                    f"sizes must be even and <= 12 by default, got {n}"
                )
        if self.threads < 1:
            raise ConfigurationError("threads must be >= 1")


# Training budgets sized so each experiment converges at desk scale within
# its runtime budget; every field remains overridable via config/CLI.
TRAINING_PRESETS: dict[str, trn.TrainingConfig] = {
    "tfim_scan": trn.TrainingConfig(
        restarts=4, max_iterations=600, tolerance=1e-11, step_size=0.03
    ),
    "xyz_grid": trn.TrainingConfig(
        restarts=4, max_iterations=700, tolerance=1e-11, step_size=0.03
    ),
    "spin1_scan": trn.TrainingConfig(
        restarts=8, max_iterations=900, tolerance=1e-11, step_size=0.03
    ),
    "interconnect_sweep": trn.TrainingConfig(
        restarts=8, max_iterations=900, tolerance=1e-11, step_size=0.03
    ),
    "all_to_all_sweep": trn.TrainingConfig(
        restarts=4, max_iterations=600, tolerance=1e-11, step_size=0.03
    ),
    "compare_architectures": trn.TrainingConfig(
        restarts=8, max_iterations=900, tolerance=1e-11, step_size=0.03
    ),
}


def default_config(experiment: str, **overrides) -> ExperimentConfig:
    """Experiment config with its tuned training preset applied."""
    cfg = ExperimentConfig(
        experiment=experiment, training=TRAINING_PRESETS[experiment]
    )
    return replace(cfg, **overrides) if overrides else cfg


@dataclass
class ResultRow:
    experiment: str
    model: str
    model_params: str
    architecture: str
    n_i: int
    num_layers: int
    param_count: int
    seed: int
    e_gs: float = float("nan")
    e_var: float = float("nan")
    epsilon_signed: float = float("nan")
    epsilon_abs: float = float("nan")
    infidelity: float = float("nan")
    discarded_weight: float = float("nan")
    status: str = "ok"
    wall_time: float = 0.0

    def cells(self) -> list[str]:
        out = []
        for col in CSV_COLUMNS:
            val = getattr(self, col)
            out.append(_fmt(val))
        return out

    def as_dict(self) -> dict:
        return {col: getattr(self, col) for col in CSV_COLUMNS}


def _fmt(val) -> str:
    if isinstance(val, float):
        return "" if np.isnan(val) else f"{val:.12g}"
    return str(val)


def _params_str(**kv) -> str:
    return ";".join(f"{k}={_fmt(float(v)) if isinstance(v, float) else v}"
                    for k, v in kv.items())


def write_rows(rows: list[ResultRow], path: str, fmt: str) -> None:
    try:
        if fmt == "csv":
            lines = [",".join(CSV_COLUMNS)]
            lines += [",".join(r.cells()) for r in rows]
            text = "\n".join(lines) + "\n"
        else:
            payload = [
                {k: (None if isinstance(v, float) and np.isnan(v) else v)
                 for k, v in r.as_dict().items()}
                for r in rows
            ]
            text = json.dumps(payload, indent=2) + "\n"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"failed to write results to {path!r}: {exc}") from exc


def _row_from_training(
    row: ResultRow, result: trn.TrainingResult
) -> ResultRow:
    row.e_gs = result.e_gs
    row.e_var = result.e_var
    row.epsilon_signed = result.epsilon_signed
    row.epsilon_abs = result.epsilon
    row.infidelity = result.infidelity_to_exact_gs
    row.discarded_weight = result.discarded_weight_at_d
    row.wall_time = result.wall_time
    return row


def _log_row(row: ResultRow, quiet: bool) -> None:
    if quiet:
        return
    logger.info(
        "%s %s [%s] eps=%s infid=%s (%.1fs)",
        row.model,
        row.model_params,
        row.architecture,
        _fmt(row.epsilon_abs) or "-",
        _fmt(row.infidelity) or "-",
        row.wall_time,
    )


def _build_arch_spec(config: ExperimentConfig, arch: str, num_qubits: int,
                     extra_layer: bool = False) -> anz.AnsatzSpec:
    m = config.layers_per_block
    if arch == "dual_core":
        return anz.build_dual_core(
            num_qubits, config.n_interconnect, m,
            extra_layer_after_last_remote=extra_layer,
        )
    if arch == "separable":
        # Depth parity with the staged dual-core circuit: one block with
        # the same total layer count per module.
        return anz.build_dual_core(num_qubits, 0, m * (config.n_interconnect + 1))
    raise ConfigurationError(f"unknown architecture {arch!r}")


def _train_point(
    config: ExperimentConfig,
    experiment: str,
    model: Hamiltonian,
    model_params: str,
    arch: str,
    extra_layer: bool = False,
) -> ResultRow:
    spec = _build_arch_spec(config, arch, model.num_qubits, extra_layer)
    row = ResultRow(
        experiment=experiment,
        model=model.name,
        model_params=model_params,
        architecture=arch,
        n_i=spec.n_interconnect,
        num_layers=sum(spec.layers_in_stage(s) for s in range(spec.num_stages)),
        param_count=anz.param_count(spec),
        seed=config.training.rng_seed,
    )
    try:
        result = trn.train_full(model, spec, config.training)
        _row_from_training(row, result)
    except Exception as exc:  # per-point failures become error rows
        logger.error("point failed: %s %s [%s]: %s", model.name, model_params, arch, exc)
        row.status = f"error: {exc}"
    _log_row(row, config.quiet)
    return row


def run_tfim_scan(config: ExperimentConfig) -> list[ResultRow]:
    """Field scan of the N-qubit TFIM for each requested architecture."""
    rows = []
    for hx in config.h_values:
        model = build_tfim(config.num_qubits, config.coupling_j, hx)
        params = _params_str(J=config.coupling_j, h_x=float(hx))
        for arch in config.architectures:
            rows.append(_train_point(config, "tfim_scan", model, params, arch))
    _finish(config, rows)
    return rows


def run_xyz_grid(config: ExperimentConfig) -> list[ResultRow]:
    """(J_y, J_z) grid at each field value; dual-core n_i=3 by default."""
    rows = []
    archs = tuple(a for a in config.architectures if a != "separable") or (
        "dual_core",
    )
    for hx in config.hx_values:
        for jy in config.jy_values:
            for jz in config.jz_values:
                model = build_xyz(
                    config.num_qubits, config.coupling_j, jy, jz, hx
                )
                params = _params_str(
                    J_x=config.coupling_j, J_y=float(jy), J_z=float(jz),
                    h_x=float(hx),
                )
                for arch in archs:
                    rows.append(
                        _train_point(config, "xyz_grid", model, params, arch)
                    )
    worst = max(
        (r for r in rows if r.status == "ok" and np.isfinite(r.epsilon_abs)),
        key=lambda r: r.epsilon_abs,
        default=None,
    )
    if worst is not None and not config.quiet:
        logger.info(
            "worst grid point: %s eps=%s", worst.model_params,
            _fmt(worst.epsilon_abs),
        )
    _finish(config, rows)
    return rows


def run_spin1_scan(config: ExperimentConfig) -> list[ResultRow]:
    """Size scan of the mapped spin-1 chain; optional 13th layer per size."""
    rows = []
    for n in config.sizes:
        model = build_spin1_heisenberg(n // 2, config.coupling_j, config.j_fm)
        params = _params_str(
            n_qubits=n, J=config.coupling_j, J_FM=config.j_fm
        )
        for arch in config.architectures:
            rows.append(_train_point(config, "spin1_scan", model, params, arch))
            if arch == "dual_core" and n in config.spin1_extra_layer_sizes:
                rows.append(
                    _train_point(
                        config, "spin1_scan", model, params, arch,
                        extra_layer=True,
                    )
                )
    _finish(config, rows)
    return rows


def _sweep_models(config: ExperimentConfig) -> list[tuple[Hamiltonian, str]]:
    """The three models at their sweep operating points."""
    return [
        (build_tfim(config.num_qubits, config.coupling_j, 0.73),
         _params_str(J=config.coupling_j, h_x=0.73)),
        (build_xyz(config.num_qubits, 1.0, -1.0, 0.5, 1.0),
         _params_str(J_x=1.0, J_y=-1.0, J_z=0.5, h_x=1.0)),
        (build_spin1_heisenberg(config.num_qubits // 2, config.coupling_j,
                                config.j_fm),
         _params_str(n_qubits=config.num_qubits, J=config.coupling_j,
                     J_FM=config.j_fm)),
    ]


def run_interconnect_sweep(config: ExperimentConfig) -> list[ResultRow]:
    """Infidelity and epsilon vs n_i in 0..n_interconnect for three models.

    One staged training run per model supplies every row: with per-stage
    restart seeding, the n_i = k circuit trained alone is identical to the
    first k stages of the n_i = 3 run, so stage snapshots are exact.
    """
    from .hamiltonians import expectation
    from .statevector import fidelity as state_fidelity

    rows = []
    for model, params in _sweep_models(config):
        spec = _build_arch_spec(config, "dual_core", model.num_qubits)
        gs = ground_state(model)
        decomp = schmidt_decompose(gs.state, model.num_qubits // 2)
        t0 = time.perf_counter()
        try:
            result = trn.train_full(model, spec, config.training, ground=gs)
        except Exception as exc:
            logger.error("sweep failed for %s: %s", model.name, exc)
            for k in range(config.n_interconnect + 1):
                prefix = anz.stage_prefix(spec, k)
                rows.append(ResultRow(
                    experiment="interconnect_sweep", model=model.name,
                    model_params=params, architecture=prefix.architecture,
                    n_i=k, num_layers=config.layers_per_block * (k + 1),
                    param_count=anz.param_count(prefix),
                    seed=config.training.rng_seed,
                    status=f"error: {exc}",
                ))
            continue
        for k, stage in enumerate(result.stages):
            prefix = anz.stage_prefix(spec, k)
            psi = anz.evaluate(prefix, stage.optimized_params)
            e_var = expectation(model, psi)
            d = min(1 << k, decomp.rank)
            row = ResultRow(
                experiment="interconnect_sweep", model=model.name,
                model_params=params, architecture=prefix.architecture,
                n_i=k, num_layers=config.layers_per_block * (k + 1),
                param_count=anz.param_count(prefix),
                seed=config.training.rng_seed,
                e_gs=gs.energy, e_var=e_var,
                epsilon_signed=e_var / gs.energy - 1.0,
                epsilon_abs=trn.epsilon(e_var, gs.energy),
                infidelity=1.0 - state_fidelity(psi, gs.state),
                discarded_weight=discarded_weight(decomp, d),
                wall_time=(time.perf_counter() - t0) if k == len(result.stages) - 1 else 0.0,
            )
            rows.append(row)
            _log_row(row, config.quiet)
    _finish(config, rows)
    return rows


def _all_to_all_rows(
    config: ExperimentConfig,
    experiment: str,
    model: Hamiltonian,
    params: str,
) -> list[ResultRow]:
    from .hamiltonians import expectation
    from .statevector import fidelity as state_fidelity

    gs = ground_state(model)
    decomp = schmidt_decompose(gs.state, model.num_qubits // 2)
    dw_full = discarded_weight(decomp, min(1 << config.n_interconnect, decomp.rank))
    rows = []
    t0 = time.perf_counter()
    try:
        stages = trn.train_all_to_all_sweep(
            model, config.all_to_all_layers, config.training, ground=gs
        )
    except Exception as exc:
        logger.error("all-to-all sweep failed for %s: %s", model.name, exc)
        return [ResultRow(
            experiment=experiment, model=model.name, model_params=params,
            architecture="all_to_all", n_i=0, num_layers=m,
            param_count=anz.param_count(
                anz.build_all_to_all(model.num_qubits, m)
            ),
            seed=config.training.rng_seed, status=f"error: {exc}",
        ) for m in range(1, config.all_to_all_layers + 1)]
    for spec, stage in stages:
        psi = anz.evaluate(spec, stage.optimized_params)
        e_var = expectation(model, psi)
        row = ResultRow(
            experiment=experiment, model=model.name, model_params=params,
            architecture="all_to_all", n_i=0,
            num_layers=spec.layers_per_block,
            param_count=anz.param_count(spec),
            seed=config.training.rng_seed,
            e_gs=gs.energy, e_var=e_var,
            epsilon_signed=e_var / gs.energy - 1.0,
            epsilon_abs=trn.epsilon(e_var, gs.energy),
            infidelity=1.0 - state_fidelity(psi, gs.state),
            discarded_weight=dw_full,
            wall_time=(time.perf_counter() - t0) if spec.layers_per_block == config.all_to_all_layers else 0.0,
        )
        rows.append(row)
        _log_row(row, config.quiet)
    return rows


def _compare_models(config: ExperimentConfig) -> list[tuple[Hamiltonian, str]]:
    models = {
        "tfim": lambda: (
            build_tfim(config.num_qubits, config.coupling_j, 0.73),
            _params_str(J=config.coupling_j, h_x=0.73),
        ),
        "spin1": lambda: (
            build_spin1_heisenberg(
                config.num_qubits // 2, config.coupling_j, config.j_fm
            ),
            _params_str(n_qubits=config.num_qubits, J=config.coupling_j,
                        J_FM=config.j_fm),
        ),
    }
    unknown = set(config.compare_models) - set(models)
    if unknown:
        raise ConfigurationError(f"unknown compare models {sorted(unknown)}")
    return [models[name]() for name in config.compare_models]


def run_all_to_all_sweep(config: ExperimentConfig) -> list[ResultRow]:
    """epsilon/infidelity vs layer count for the monolithic ansatz."""
    rows = []
    for model, params in _compare_models(config):
        rows.extend(_all_to_all_rows(config, "all_to_all_sweep", model, params))
    _finish(config, rows)
    return rows


def run_compare_architectures(config: ExperimentConfig) -> list[ResultRow]:
    """Dual-core n_i=3 vs all-to-all (every depth) on the two hard models."""
    rows = []
    for model, params in _compare_models(config):
        rows.append(
            _train_point(config, "compare_architectures", model, params,
                         "dual_core")
        )
        rows.extend(
            _all_to_all_rows(config, "compare_architectures", model, params)
        )
    _finish(config, rows)
    return rows


def _finish(config: ExperimentConfig, rows: list[ResultRow]) -> None:
    total = sum(r.wall_time for r in rows)
    if not config.quiet:
        logger.info("%d rows, %.1fs training time", len(rows), total)
    if config.out is not None:
        write_rows(rows, config.out, config.format)


RUNNERS = {
    "tfim_scan": run_tfim_scan,
    "xyz_grid": run_xyz_grid,
    "spin1_scan": run_spin1_scan,
    "interconnect_sweep": run_interconnect_sweep,
    "all_to_all_sweep": run_all_to_all_sweep,
    "compare_architectures": run_compare_architectures,
}


def run_experiment(config: ExperimentConfig) -> list[ResultRow]:
    return RUNNERS[config.experiment](config)
