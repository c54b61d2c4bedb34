"""Parameterized circuits for the dual-core, separable, and all-to-all
architectures, with their flat parameter layout and fidelity gradients.

A dual-core circuit alternates per-module unitary blocks with remote ZZ
gates straddling the cut: block stage 0 on each module, then n_i repeats of
(remote ZZ, block stage). Each block holds `layers_per_block` template
layers; the default template applies one Ry and one Rz per qubit followed
by parameterized ZZ entanglers on every intra-module pair.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, replace

import numpy as np

from . import engine
from .statevector import (
    ConfigurationError,
    StateVector,
    ValidationError,
    z_signs,
)

ARCHITECTURES = ("dual_core", "separable", "all_to_all")


@dataclass(frozen=True)
class LayerTemplate:
    """Per-layer structure: rotation axes per qubit, then entangler pattern."""

    rotation_axes: tuple[str, ...] = ("y", "z")
    entangler: str = "all"  # "all" | "chain" | "none"

    def __post_init__(self) -> None:
        axes = tuple(a.lower() for a in self.rotation_axes)
        if any(a not in "xyz" for a in axes):
            raise ConfigurationError(f"bad rotation axes {self.rotation_axes}")
        if self.entangler not in ("all", "chain", "none"):
            raise ConfigurationError(f"bad entangler pattern {self.entangler!r}")
        object.__setattr__(self, "rotation_axes", axes)

    def pairs(self, k: int) -> tuple[tuple[int, int], ...]:
        if self.entangler == "all":
            return tuple(itertools.combinations(range(k), 2))
        if self.entangler == "chain":
            return tuple((i, i + 1) for i in range(k - 1))
        return ()

    def params_per_layer(self, k: int) -> int:
        return len(self.rotation_axes) * k + len(self.pairs(k))


DEFAULT_TEMPLATE = LayerTemplate()


@dataclass(frozen=True)
class AnsatzSpec:
    """Circuit topology; immutable and hashable so compilations can be cached."""

    architecture: str
    num_qubits: int
    n_interconnect: int = 0
    layers_per_block: int = 3
    layer_template: LayerTemplate = DEFAULT_TEMPLATE
    remote_pairs: tuple[tuple[int, int], ...] = ()
    extra_layer_after_last_remote: bool = False

    def __post_init__(self) -> None:
        if self.architecture not in ARCHITECTURES:
            raise ConfigurationError(f"unknown architecture {self.architecture!r}")
        if not 2 <= self.num_qubits <= 16:
            raise ConfigurationError(f"num_qubits out of range: {self.num_qubits}")
        if self.layers_per_block < 1:
            raise ConfigurationError("layers_per_block must be >= 1")
        if self.n_interconnect < 0:
            raise ConfigurationError("n_interconnect must be >= 0")
        if self.architecture in ("dual_core", "separable"):
            if self.num_qubits % 2:
                raise ConfigurationError("modular architectures need even N")
            if self.architecture == "separable" and self.n_interconnect != 0:
                raise ConfigurationError("separable circuits have no remote gates")
            if len(self.remote_pairs) != self.n_interconnect:
                raise ConfigurationError(
                    "need one remote pair per interconnect use"
                )
            cut = self.num_qubits // 2
            for a, b in self.remote_pairs:
                lo, hi = min(a, b), max(a, b)
                if not (0 <= lo < cut <= hi < self.num_qubits):
                    raise ConfigurationError(
                        f"remote pair ({a}, {b}) does not straddle the cut"
                    )
        else:
            if self.n_interconnect or self.remote_pairs:
                raise ConfigurationError("all_to_all has no remote gates")

    @property
    def cut(self) -> int:
        return self.num_qubits // 2

    @property
    def num_stages(self) -> int:
        return self.n_interconnect + 1

    def module_blocks(self) -> tuple[tuple[int, int], ...]:
        """(start, size) of each contiguous qubit module."""
        if self.architecture == "all_to_all":
            return ((0, self.num_qubits),)
        return ((0, self.cut), (self.cut, self.num_qubits - self.cut))

    def layers_in_stage(self, stage: int) -> int:
        m = self.layers_per_block
        if self.extra_layer_after_last_remote and stage == self.n_interconnect:
            m += 1
        return m


def default_remote_pair(num_qubits: int) -> tuple[int, int]:
    return (num_qubits // 2 - 1, num_qubits // 2)


def build_dual_core(
    num_qubits: int,
    n_i: int,
    m: int,
    layer_template: LayerTemplate = DEFAULT_TEMPLATE,
    remote_pairs: tuple[tuple[int, int], ...] | None = None,
    extra_layer_after_last_remote: bool = False,
) -> AnsatzSpec:
    """Dual-core circuit with n_i remote gates; n_i = 0 is the separable case."""
    if remote_pairs is None:
        remote_pairs = (default_remote_pair(num_qubits),) * n_i
    return AnsatzSpec(
        architecture="dual_core" if n_i > 0 else "separable",
        num_qubits=num_qubits,
        n_interconnect=n_i,
        layers_per_block=m,
        layer_template=layer_template,
        remote_pairs=tuple(remote_pairs),
        extra_layer_after_last_remote=extra_layer_after_last_remote,
    )


def build_all_to_all(
    num_qubits: int,
    num_layers: int,
    layer_template: LayerTemplate = DEFAULT_TEMPLATE,
) -> AnsatzSpec:
    """Single monolithic module; every qubit pair may entangle directly."""
    return AnsatzSpec(
        architecture="all_to_all",
        num_qubits=num_qubits,
        layers_per_block=num_layers,
        layer_template=layer_template,
    )


class ParameterLayout:
    """Bijection between structured gate slots and flat parameter indices.

    Labels are ("rot", stage, module, layer, axis, qubit),
    ("ent", stage, module, layer, qubit_a, qubit_b) or ("remote", stage),
    listed in circuit order so a stage prefix owns a contiguous prefix of
    the flat vector.
    """

    def __init__(self, labels: tuple[tuple, ...], num_stages: int):
        self.labels = labels
        self._index = {lab: i for i, lab in enumerate(labels)}
        counts = [0] * num_stages
        for lab in labels:
            counts[lab[1]] += 1
        self.stage_boundaries = tuple(itertools.accumulate(counts))

    def __len__(self) -> int:
        return len(self.labels)

    def index_of(self, label: tuple) -> int:
        return self._index[label]

    def prefix_count(self, stage: int) -> int:
        """Parameters owned by stages 0..stage."""
        return self.stage_boundaries[stage]


@dataclass
class ParameterVector:
    """Flat trainable angles plus the layout describing each slot."""

    values: np.ndarray
    layout: ParameterLayout

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (len(self.layout),):
            raise ValidationError(
                f"expected {len(self.layout)} parameter values, "
                f"got shape {self.values.shape}"
            )

    @classmethod
    def zeros(cls, spec: AnsatzSpec) -> "ParameterVector":
        layout = parameter_layout(spec)
        return cls(np.zeros(len(layout)), layout)


def _as_values(params) -> np.ndarray:
    if isinstance(params, ParameterVector):
        return params.values
    return np.asarray(params, dtype=float)


def _local_z(k: int, local_qubit: int) -> np.ndarray:
    return z_signs(k, local_qubit)


def _walk(spec: AnsatzSpec):
    """Yield ('remote', stage, (a, b)) and ('layer', stage, module, layer,
    (start, size)) records in circuit order."""
    for stage in range(spec.num_stages):
        if stage >= 1:
            yield ("remote", stage, spec.remote_pairs[stage - 1])
        for module, block in enumerate(spec.module_blocks()):
            for layer in range(spec.layers_in_stage(stage)):
                yield ("layer", stage, module, layer, block)


@functools.lru_cache(maxsize=128)
def _compile(spec: AnsatzSpec) -> tuple[engine.CompiledCircuit, ParameterLayout]:
    ops: list = []
    labels: list[tuple] = []
    template = spec.layer_template
    n = spec.num_qubits

    def emit_layer(stage: int, module: int, layer: int, start: int, k: int):
        qubits = range(start, start + k)
        pending: list[tuple[np.ndarray, tuple]] = []

        def flush():
            if not pending:
                return
            pstart = len(labels)
            labels.extend(lab for _, lab in pending)
            coeffs = np.array([row for row, _ in pending])
            ops.append(
                engine.DiagLayer(coeffs, pstart, 1 << (n - start - k), 1 << start)
            )
            pending.clear()

        for axis in template.rotation_axes:
            if axis == "z":
                # Diagonal; defer so it fuses with adjacent diagonal gates.
                pending.extend(
                    (-0.5 * _local_z(k, q - start),
                     ("rot", stage, module, layer, "z", q))
                    for q in qubits
                )
                continue
            flush()
            ops.append(engine.RotSweep(axis, tuple(qubits), len(labels)))
            labels.extend(("rot", stage, module, layer, axis, q) for q in qubits)
        pending.extend(
            (0.5 * _local_z(k, la) * _local_z(k, lb),
             ("ent", stage, module, layer, start + la, start + lb))
            for la, lb in template.pairs(k)
        )
        flush()

    for rec in _walk(spec):
        if rec[0] == "remote":
            _, stage, (a, b) = rec
            ops.append(engine.RemoteZZ(a, b, len(labels), n))
            labels.append(("remote", stage))
        else:
            _, stage, module, layer, (start, k) = rec
            emit_layer(stage, module, layer, start, k)

    layout = ParameterLayout(tuple(labels), spec.num_stages)
    circuit = engine.CompiledCircuit(n, ops, len(labels))
    return circuit, layout


def compile_ansatz(spec: AnsatzSpec) -> engine.CompiledCircuit:
    return _compile(spec)[0]


def parameter_layout(spec: AnsatzSpec) -> ParameterLayout:
    return _compile(spec)[1]


def param_count(spec: AnsatzSpec) -> int:
    """Total trainable angles (rotations, entanglers, remote phases)."""
    per_block = {
        (start, k): spec.layer_template.params_per_layer(k)
        for start, k in spec.module_blocks()
    }
    total = spec.n_interconnect
    for stage in range(spec.num_stages):
        for block in spec.module_blocks():
            total += spec.layers_in_stage(stage) * per_block[block]
    return total


def stage_prefix(spec: AnsatzSpec, stage: int) -> AnsatzSpec:
    """Circuit up to (and including) the `stage`-th remote gate's block.

    Stage 0 is the prefix before the first remote gate; stage n_i is the
    full circuit. Parameter layouts are prefix-consistent, so warm-started
    values map by identity.
    """
    if not 0 <= stage <= spec.n_interconnect:
        raise ValidationError(
            f"stage must be in 0..{spec.n_interconnect}, got {stage}"
        )
    if stage == spec.n_interconnect:
        return spec
    return replace(
        spec,
        architecture="dual_core" if stage > 0 else "separable",
        n_interconnect=stage,
        remote_pairs=spec.remote_pairs[:stage],
        extra_layer_after_last_remote=False,
    )


def evaluate(spec: AnsatzSpec, params) -> StateVector:
    """Run the circuit on |0...0>."""
    values = _as_values(params)
    circuit = compile_ansatz(spec)
    return StateVector(spec.num_qubits, circuit.evaluate(values))


def fidelity_gradient(spec: AnsatzSpec, params, target: StateVector) -> np.ndarray:
    """dF/dp for F = |<target|psi(p)>|^2, by adjoint accumulation."""
    if target.num_qubits != spec.num_qubits:
        raise ValidationError("target size does not match the circuit")
    values = _as_values(params)
    circuit = compile_ansatz(spec)
    _, grad = circuit.fidelity_and_grad(values, target.amplitudes)
    return grad
