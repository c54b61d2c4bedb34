"""Compiled-circuit execution: batched statevector forward pass and
adjoint-mode fidelity gradients.

A circuit compiles to a flat list of ops over a (batch, 2**N) amplitude
array. Rotations on distinct qubits are grouped into commuting sweeps;
Z rotations and ZZ entanglers are fused into diagonal layers whose phases
are computed on the module-local axis where the circuit structure allows.
The gradient walks the op list backward, reusing per-op forward outputs,
so only the bra state is propagated.

Every op is a single-parameter-per-gate exponential exp(i * c * p * G) with
G involutory, so the derivative inserts the generator after the op:
d<t|U...|0>/dp = <b| (i * c * G) |k> with bra/ket taken at the op's output.
"""

from __future__ import annotations

import numpy as np

from . import _kernels

_HALF = 0.5
_AXIS_CODE = {"x": 0, "y": 1, "z": 2}


def _rows_matmul(a: np.ndarray, m: np.ndarray) -> np.ndarray:
    """(B, n) @ (n, k), one row at a time.

    Row-wise calls keep each restart's reduction on the same BLAS path no
    matter how the batch is chunked, so results are independent of the
    batch width (a plain batched GEMM is not bit-stable against GEMV).
    """
    out = np.empty((a.shape[0], m.shape[1]), dtype=np.result_type(a, m))
    for r in range(a.shape[0]):
        out[r] = a[r] @ m
    return out


def _rows_dot(a: np.ndarray, v: np.ndarray) -> np.ndarray:
    """(B, n) @ (n,) -> (B,), one row at a time; see _rows_matmul."""
    out = np.empty(a.shape[0], dtype=np.result_type(a, v))
    for r in range(a.shape[0]):
        out[r] = a[r] @ v
    return out


class RotSweep:
    """Commuting single-qubit rotations on distinct qubits, one shared axis."""

    def __init__(self, axis: str, qubits: tuple[int, ...], pstart: int):
        if len(set(qubits)) != len(qubits):
            raise ValueError("rotation sweep qubits must be distinct")
        self.axis = axis
        self._code = _AXIS_CODE[axis]
        self.qubits = np.asarray(qubits, dtype=np.int64)
        self.pslice = slice(pstart, pstart + len(qubits))

    @property
    def n_params(self) -> int:
        return len(self.qubits)

    def _apply_inplace(self, buf: np.ndarray, angles: np.ndarray) -> None:
        half = _HALF * angles
        _kernels.rot_apply(buf, np.cos(half), np.sin(half), self.qubits, self._code)

    def forward(self, state: np.ndarray, params: np.ndarray):
        out = state.copy()
        self._apply_inplace(out, params[:, self.pslice])
        return out, None

    def backward(self, bra, ket_out, params, aux, dc) -> None:
        # All gates in the sweep commute, so each generator inserts at the
        # sweep output: dc_q = <b| -(i/2) sigma_q |k>.
        out = np.empty((bra.shape[0], len(self.qubits)), dtype=complex)
        _kernels.rot_grads(bra, ket_out, self.qubits, self._code, out)
        dc[:, self.pslice] = out
        self._apply_inplace(bra, -params[:, self.pslice])


class DiagLayer:
    """Fused diagonal block exp(i * diag(C^T p)) over a module-local axis.

    C has one row per parameter; row entries carry the +-1/2 sign pattern of
    the generator (Z rotations contribute -z_q/2, ZZ entanglers +z_a z_b/2).
    `hi`/`lo` describe the (batch, hi, axis, lo) view placing the local axis.
    """

    def __init__(self, coeffs: np.ndarray, pstart: int, hi: int, lo: int):
        self.coeffs = np.ascontiguousarray(coeffs)
        self.pslice = slice(pstart, pstart + coeffs.shape[0])
        self.hi = hi
        self.lo = lo

    @property
    def n_params(self) -> int:
        return self.coeffs.shape[0]

    def _view(self, state: np.ndarray) -> np.ndarray:
        r = state.shape[0]
        return state.reshape(r, self.hi, -1, self.lo)

    def forward(self, state: np.ndarray, params: np.ndarray):
        ang = _rows_matmul(params[:, self.pslice], self.coeffs)  # (R, dk)
        phase = np.exp(1j * ang)
        out = self._view(state) * phase[:, None, :, None]
        return out.reshape(state.shape), phase

    def backward(self, bra, ket_out, params, phase, dc) -> None:
        w = self._view(bra).conj() * self._view(ket_out)
        w = w.sum(axis=(1, 3))  # (R, dk)
        dc[:, self.pslice] = 1j * _rows_matmul(w, self.coeffs.T)
        vb = self._view(bra)
        vb *= phase.conj()[:, None, :, None]


class RemoteZZ:
    """exp(+i phi/2 Z_a Z_b); the interconnect-mediated entangler."""

    def __init__(self, qubit_a: int, qubit_b: int, pindex: int, num_qubits: int):
        idx = np.arange(1 << num_qubits)
        agree = ((idx >> qubit_a) & 1) == ((idx >> qubit_b) & 1)
        self.signs = np.where(agree, 1.0, -1.0)
        self.qubits = (qubit_a, qubit_b)
        self.pindex = pindex
        self.pslice = slice(pindex, pindex + 1)

    n_params = 1

    def forward(self, state: np.ndarray, params: np.ndarray):
        half = _HALF * params[:, self.pindex]
        c, s = np.cos(half), np.sin(half)
        phase = c[:, None] + 1j * s[:, None] * self.signs[None, :]
        return state * phase, phase

    def backward(self, bra, ket_out, params, phase, dc) -> None:
        w = _rows_dot(bra.conj() * ket_out, self.signs)
        dc[:, self.pindex] = _HALF * 1j * w
        bra *= phase.conj()


class CompiledCircuit:
    """Ordered op list acting on |0...0> with a flat parameter vector."""

    def __init__(self, num_qubits: int, ops: list, param_count: int):
        self.num_qubits = num_qubits
        self.dim = 1 << num_qubits
        self.ops = ops
        self.param_count = param_count

    def _batch(self, params: np.ndarray) -> tuple[np.ndarray, bool]:
        params = np.asarray(params, dtype=float)
        if params.ndim == 1:
            return params[None, :], True
        return params, False

    def evaluate(self, params: np.ndarray) -> np.ndarray:
        """Output statevector(s), shape (..., 2**N) matching the input batch."""
        p, single = self._batch(params)
        self._check(p)
        state = np.zeros((p.shape[0], self.dim), dtype=complex)
        state[:, 0] = 1.0
        for op in self.ops:
            state, _ = op.forward(state, p)
        return state[0] if single else state

    def fidelity(self, params: np.ndarray, target: np.ndarray) -> np.ndarray:
        p, single = self._batch(params)
        psi = self.evaluate(p)
        c = _rows_dot(psi, target.conj())
        f = np.abs(c) ** 2
        return f[0] if single else f

    def fidelity_and_grad(
        self, params: np.ndarray, target: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        """F = |<target|psi(p)>|^2 and dF/dp via reverse accumulation."""
        p, single = self._batch(params)
        self._check(p)
        r = p.shape[0]
        state = np.zeros((r, self.dim), dtype=complex)
        state[:, 0] = 1.0
        outs, auxs = [], []
        for op in self.ops:
            state, aux = op.forward(state, p)
            outs.append(state)
            auxs.append(aux)
        c = _rows_dot(state, target.conj())  # (R,)
        dc = np.zeros((r, self.param_count), dtype=complex)
        bra = np.broadcast_to(target, (r, self.dim)).copy()
        for i in range(len(self.ops) - 1, -1, -1):
            self.ops[i].backward(bra, outs[i], p, auxs[i], dc)
        grad = 2.0 * np.real(c.conj()[:, None] * dc)
        f = np.abs(c) ** 2
        if single:
            return f[0], grad[0]
        return f, grad

    def _check(self, p: np.ndarray) -> None:
        if p.shape[-1] != self.param_count:
            raise ValueError(
                f"expected {self.param_count} parameters, got {p.shape[-1]}"
            )
