"""Staged Schmidt-target training of the dual-core ansatz.

Stage k trains the circuit prefix holding k remote gates against the rank
2**k truncation of the exact ground state, maximizing state fidelity with
Adam. Parameters shared with the previous stage start from their trained
values; new parameters are drawn uniformly at random, over a configurable
number of restarts, and the best restart wins. Restart 0 always initializes
the new parameters at zero so the previous stage's optimum stays reachable.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass

import numpy as np

from . import ansatz as anz
from .ansatz import AnsatzSpec, ParameterVector
from .hamiltonians import GroundStateSolution, Hamiltonian, expectation, ground_state
from .schmidt import discarded_weight, schmidt_decompose, truncate_to_state
from .statevector import StateVector, ValidationError, fidelity

logger = logging.getLogger(__name__)


class UndefinedMeasureError(ValueError):
    """epsilon is undefined when the exact ground energy is zero."""


@dataclass(frozen=True)
class TrainingConfig:
    """Multi-restart Adam settings for one training run."""

    restarts: int = 200
    step_size: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps_adam: float = 1e-8
    max_iterations: int = 2000
    tolerance: float = 1e-10  # on cost change over a `window`-iteration span
    window: int = 25
    rng_seed: int = 0
    init_range: float = float(np.pi)
    batch_size: int = 4  # restarts evaluated together; no effect on results

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise ValidationError("restarts must be >= 1")
        if self.step_size <= 0 or self.tolerance <= 0:
            raise ValidationError("step_size and tolerance must be positive")


@dataclass
class StageResult:
    stage: int
    d_target: int
    optimized_params: ParameterVector
    fidelity_to_stage_target: float
    restart_index_selected: int
    iterations: tuple[int, ...] = ()


@dataclass
class TrainingResult:
    stages: list[StageResult]
    final_state: StateVector
    e_gs: float
    e_var: float
    epsilon: float
    epsilon_signed: float
    infidelity_to_exact_gs: float
    discarded_weight_at_d: float
    wall_time: float
    warnings: tuple[str, ...] = ()

    @property
    def final_params(self) -> ParameterVector:
        return self.stages[-1].optimized_params


def epsilon(e_var: float, e_gs: float) -> float:
    """|E_var / E_GS - 1|; the signed value is e_var / e_gs - 1."""
    if e_gs == 0.0:
        raise UndefinedMeasureError("epsilon undefined for E_GS = 0")
    return abs(e_var / e_gs - 1.0)


def stage_targets(gs: StateVector, cut: int, n_i: int) -> list[StateVector]:
    """Truncated-ground-state targets at d = 1, 2, 4, ..., 2**n_i.

    Requested ranks above the state's Schmidt rank saturate at full rank
    (a product ground state yields identical targets at every stage).
    """
    decomp = schmidt_decompose(gs, cut)
    targets = []
    for stage in range(n_i + 1):
        d = min(1 << stage, decomp.rank)
        targets.append(truncate_to_state(decomp, d))
    return targets


def _restart_init(
    spec: AnsatzSpec,
    warm: np.ndarray | None,
    config: TrainingConfig,
    stage: int,
    restart: int,
) -> np.ndarray:
    n_params = anz.param_count(spec)
    params = np.zeros(n_params)
    n_warm = 0
    if warm is not None:
        warm = np.asarray(warm, dtype=float)
        n_warm = warm.size
        if n_warm > n_params:
            raise ValidationError(
                f"warm parameters ({n_warm}) exceed the stage layout ({n_params})"
            )
        params[:n_warm] = warm
    if restart > 0:
        rng = np.random.default_rng(
            np.random.SeedSequence((config.rng_seed, stage, restart))
        )
        params[n_warm:] = rng.uniform(
            -config.init_range, config.init_range, n_params - n_warm
        )
    return params


def _adam_maximize(
    circuit, params: np.ndarray, target: np.ndarray, config: TrainingConfig
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Adam on a batch of independent restart rows; returns per-row bests.

    Each row follows its own trajectory and stops on its own criterion, so
    batching (and `batch_size`) cannot change any row's result.
    """
    rows, n_params = params.shape
    m = np.zeros_like(params)
    v = np.zeros_like(params)
    best_f = np.full(rows, -np.inf)
    best_params = params.copy()
    active = np.ones(rows, dtype=bool)
    cost_hist = np.full((config.window, rows), np.inf)
    iters = np.zeros(rows, dtype=int)
    for t in range(1, config.max_iterations + 1):
        f, grad = circuit.fidelity_and_grad(params, target)
        bad = ~np.isfinite(f)
        if bad.any():
            logger.warning(
                "discarding %d restart(s) with non-finite cost", int(bad.sum())
            )
            active &= ~bad
            f = np.where(bad, -np.inf, f)
        improved = f > best_f
        if improved.any():
            best_f = np.where(improved, f, best_f)
            best_params[improved] = params[improved]
        cost = 1.0 - f
        prev = cost_hist[t % config.window]
        done = active & (
            (np.abs(cost - prev) < config.tolerance) | (cost < 1e-14)
        )
        cost_hist[t % config.window] = cost
        iters[active] = t
        active &= ~done
        if not active.any():
            break
        g = -grad  # minimize infidelity
        m = config.beta1 * m + (1 - config.beta1) * g
        v = config.beta2 * v + (1 - config.beta2) * g * g
        m_hat = m / (1 - config.beta1**t)
        v_hat = v / (1 - config.beta2**t)
        step = config.step_size * m_hat / (np.sqrt(v_hat) + config.eps_adam)
        params = params - np.where(active[:, None], step, 0.0)
    return best_f, best_params, iters


def train_stage(
    spec_prefix: AnsatzSpec,
    target: StateVector,
    warm_params: ParameterVector | np.ndarray | None,
    config: TrainingConfig,
    stage: int | None = None,
) -> StageResult:
    """Multi-restart fidelity maximization of one circuit prefix."""
    if target.num_qubits != spec_prefix.num_qubits:
        raise ValidationError("target size does not match the circuit prefix")
    if stage is None:
        stage = spec_prefix.n_interconnect
    warm = None
    if warm_params is not None:
        warm = np.asarray(
            warm_params.values
            if isinstance(warm_params, ParameterVector)
            else warm_params,
            dtype=float,
        )
    circuit = anz.compile_ansatz(spec_prefix)
    inits = np.stack(
        [
            _restart_init(spec_prefix, warm, config, stage, r)
            for r in range(config.restarts)
        ]
    )
    best_f = np.empty(config.restarts)
    best_params = np.empty_like(inits)
    iters: list[int] = []
    for lo in range(0, config.restarts, config.batch_size):
        hi = min(lo + config.batch_size, config.restarts)
        f, p, it = _adam_maximize(
            circuit, inits[lo:hi], target.amplitudes, config
        )
        best_f[lo:hi] = f
        best_params[lo:hi] = p
        iters.extend(int(x) for x in it)
    winner = int(np.argmax(best_f))  # ties resolve to the lowest index
    layout = anz.parameter_layout(spec_prefix)
    return StageResult(
        stage=stage,
        d_target=0,  # filled by callers that know the target rank
        optimized_params=ParameterVector(best_params[winner], layout),
        fidelity_to_stage_target=float(min(1.0, best_f[winner])),
        restart_index_selected=winner,
        iterations=tuple(iters),
    )


def train_full(
    model: Hamiltonian,
    spec: AnsatzSpec,
    config: TrainingConfig,
    ground: GroundStateSolution | None = None,
) -> TrainingResult:
    """Run the staged protocol end to end and score the final state."""
    if model.num_qubits != spec.num_qubits:
        raise ValidationError("model and ansatz qubit counts differ")
    t_start = time.perf_counter()
    warnings: list[str] = []
    gs = ground if ground is not None else ground_state(model)
    if gs.degeneracy_flag:
        warnings.append(
            f"degenerate ground state (gap {gs.gap:.3e}); "
            "targets follow the solver's returned vector"
        )
    decomp = schmidt_decompose(gs.state, spec.cut)
    targets = stage_targets(gs.state, spec.cut, spec.n_interconnect)
    stages: list[StageResult] = []
    warm: np.ndarray | None = None
    for stage, target in enumerate(targets):
        prefix = anz.stage_prefix(spec, stage)
        result = train_stage(prefix, target, warm, config, stage=stage)
        result.d_target = min(1 << stage, decomp.rank)
        stages.append(result)
        warm = result.optimized_params.values
        logger.info(
            "stage %d (d=%d): fidelity %.6f from restart %d",
            stage,
            result.d_target,
            result.fidelity_to_stage_target,
            result.restart_index_selected,
        )
    final_state = anz.evaluate(spec, stages[-1].optimized_params)
    e_var = expectation(model, final_state)
    eps_signed = e_var / gs.energy - 1.0 if gs.energy != 0.0 else float("nan")
    infid = 1.0 - fidelity(final_state, gs.state)
    d_final = min(1 << spec.n_interconnect, decomp.rank)
    return TrainingResult(
        stages=stages,
        final_state=final_state,
        e_gs=gs.energy,
        e_var=e_var,
        epsilon=epsilon(e_var, gs.energy),
        epsilon_signed=eps_signed,
        infidelity_to_exact_gs=infid,
        discarded_weight_at_d=discarded_weight(decomp, d_final),
        wall_time=time.perf_counter() - t_start,
        warnings=tuple(warnings),
    )


def train_all_to_all_sweep(
    model: Hamiltonian,
    max_layers: int,
    config: TrainingConfig,
    layer_template=anz.DEFAULT_TEMPLATE,
    ground: GroundStateSolution | None = None,
) -> list[tuple[AnsatzSpec, StageResult]]:
    """Layer-by-layer warm-started training of the monolithic ansatz.

    The target is the exact ground state at every depth; layouts are
    prefix-consistent across layer counts, so depth m warm-starts from the
    depth m-1 optimum exactly like the staged dual-core protocol.
    """
    gs = ground if ground is not None else ground_state(model)
    results: list[tuple[AnsatzSpec, StageResult]] = []
    warm: np.ndarray | None = None
    for m in range(1, max_layers + 1):
        spec = anz.build_all_to_all(model.num_qubits, m, layer_template)
        result = train_stage(spec, gs.state, warm, config, stage=m)
        result.d_target = 1 << (model.num_qubits // 2)
        warm = result.optimized_params.values
        results.append((spec, result))
        logger.info(
            "all-to-all m=%d: fidelity %.6f", m, result.fidelity_to_stage_target
        )
    return results
