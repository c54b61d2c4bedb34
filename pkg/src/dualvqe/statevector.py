"""Dense statevector representation of N-qubit pure states.

Basis convention is little-endian: bit q of an amplitude index is the
computational-basis value of qubit q, so qubit 0 is the least-significant
bit. Rotation gates follow R_a(theta) = exp(-i theta sigma_a / 2) for
a in {x, y, z}, and ZZ(phi) = exp(+i phi/2 sigma_z x sigma_z).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

MIN_QUBITS = 2
MAX_QUBITS = 16

_PAULI = {
    "i": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class ConfigurationError(ValueError):
    """Raised for out-of-range sizes or inconsistent build parameters."""


class ValidationError(ValueError):
    """Raised for invalid runtime arguments (mismatched sizes, bad gates)."""


@dataclass
class StateVector:
    """N-qubit pure state as a dense array of 2**N complex amplitudes."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise ValidationError(
                f"expected {1 << self.num_qubits} amplitudes for "
                f"{self.num_qubits} qubits, got shape {self.amplitudes.shape}"
            )

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())


@dataclass(frozen=True)
class SingleQubitGate:
    """2x2 unitary, optionally tagged with its rotation (axis, angle) form."""

    matrix: np.ndarray
    axis: str | None = None
    angle: float | None = None
    _tol: float = field(default=1e-12, repr=False)

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValidationError(f"gate matrix must be 2x2, got {m.shape}")
        if not np.allclose(m.conj().T @ m, np.eye(2), atol=self._tol):
            raise ValidationError("gate matrix is not unitary within 1e-12")
        object.__setattr__(self, "matrix", m)


def rotation_gate(axis: str, angle: float) -> SingleQubitGate:
    """R_a(theta) = exp(-i theta sigma_a / 2)."""
    axis = axis.lower()
    if axis not in ("x", "y", "z"):
        raise ValidationError(f"unknown rotation axis {axis!r}")
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    if axis == "x":
        m = np.array([[c, -1j * s], [-1j * s, c]])
    elif axis == "y":
        m = np.array([[c, -s], [s, c]], dtype=complex)
    else:
        m = np.array([[c - 1j * s, 0], [0, c + 1j * s]])
    return SingleQubitGate(m, axis=axis, angle=angle)


def pauli_matrix(label: str) -> np.ndarray:
    return _PAULI[label.lower()].copy()


def zero_state(num_qubits: int) -> StateVector:
    """The all-polarized state |0...0>."""
    if not MIN_QUBITS <= num_qubits <= MAX_QUBITS:
        raise ConfigurationError(
            f"num_qubits must be in [{MIN_QUBITS}, {MAX_QUBITS}], got {num_qubits}"
        )
    amps = np.zeros(1 << num_qubits, dtype=complex)
    amps[0] = 1.0
    return StateVector(num_qubits, amps)


def basis_state(num_qubits: int, index: int) -> StateVector:
    """Computational basis state |index> under the little-endian convention."""
    if not MIN_QUBITS <= num_qubits <= MAX_QUBITS:
        raise ConfigurationError(f"num_qubits out of range: {num_qubits}")
    if not 0 <= index < (1 << num_qubits):
        raise ValidationError(f"basis index {index} out of range")
    amps = np.zeros(1 << num_qubits, dtype=complex)
    amps[index] = 1.0
    return StateVector(num_qubits, amps)


def _check_qubit(state: StateVector, qubit: int) -> None:
    if not 0 <= qubit < state.num_qubits:
        raise IndexError(
            f"qubit {qubit} out of range for {state.num_qubits}-qubit state"
        )


def apply_single_qubit(
    state: StateVector, qubit: int, gate: SingleQubitGate
) -> StateVector:
    """Apply a 2x2 unitary to one qubit; returns a new StateVector."""
    _check_qubit(state, qubit)
    u = gate.matrix
    v = state.amplitudes.reshape(-1, 2, 1 << qubit)
    out = np.empty_like(v)
    out[:, 0, :] = u[0, 0] * v[:, 0, :] + u[0, 1] * v[:, 1, :]
    out[:, 1, :] = u[1, 0] * v[:, 0, :] + u[1, 1] * v[:, 1, :]
    return StateVector(state.num_qubits, out.reshape(-1))


def apply_zz(
    state: StateVector, qubit_a: int, qubit_b: int, phi: float
) -> StateVector:
    """ZZ(phi) = exp(+i phi/2 Z_a Z_b): phase +phi/2 where bits a,b agree."""
    if qubit_a == qubit_b:
        raise ValidationError("apply_zz requires two distinct qubits")
    _check_qubit(state, qubit_a)
    _check_qubit(state, qubit_b)
    signs = zz_signs(state.num_qubits, qubit_a, qubit_b)
    phase = math.cos(phi / 2.0) + 1j * math.sin(phi / 2.0) * signs
    return StateVector(state.num_qubits, state.amplitudes * phase)


def z_signs(num_qubits: int, qubit: int) -> np.ndarray:
    """Diagonal of Z on `qubit`: +1 where the bit is 0, -1 where it is 1."""
    idx = np.arange(1 << num_qubits)
    return 1.0 - 2.0 * ((idx >> qubit) & 1)


def zz_signs(num_qubits: int, qubit_a: int, qubit_b: int) -> np.ndarray:
    """Diagonal of Z_a Z_b: +1 where bits agree, -1 where they differ."""
    idx = np.arange(1 << num_qubits)
    agree = ((idx >> qubit_a) & 1) == ((idx >> qubit_b) & 1)
    return np.where(agree, 1.0, -1.0)


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in `a`."""
    if a.num_qubits != b.num_qubits:
        raise ValidationError(
            f"qubit count mismatch: {a.num_qubits} vs {b.num_qubits}"
        )
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2, clipped into [0, 1] against roundoff."""
    ov = inner_product(a, b)
    return float(min(1.0, abs(ov) ** 2))
