"""Numba kernels for the per-qubit rotation sweeps.

These are the only inner loops hot enough to matter; diagonal layers and
remote gates stay in vectorized numpy. Axis codes: 0 = x, 1 = y, 2 = z.
fastmath stays off so results are bit-stable.
"""

import numba as nb
import numpy as np


@nb.njit(cache=True, fastmath=False)
def rot_apply(buf, cos_half, sin_half, qubits, axis):
    """Apply exp(-i theta/2 sigma_axis) on each listed qubit, in place.

    buf: (B, 2**N) complex, C-contiguous. cos_half/sin_half: (B, k).
    """
    n_rows, dim = buf.shape
    for j in range(qubits.shape[0]):
        lo = 1 << qubits[j]
        block = lo << 1
        for r in range(n_rows):
            c = cos_half[r, j]
            s = sin_half[r, j]
            if axis == 1:  # y
                for base in range(0, dim, block):
                    for i in range(base, base + lo):
                        a0 = buf[r, i]
                        a1 = buf[r, i + lo]
                        buf[r, i] = c * a0 - s * a1
                        buf[r, i + lo] = s * a0 + c * a1
            elif axis == 0:  # x
                for base in range(0, dim, block):
                    for i in range(base, base + lo):
                        a0 = buf[r, i]
                        a1 = buf[r, i + lo]
                        buf[r, i] = c * a0 - 1j * s * a1
                        buf[r, i + lo] = -1j * s * a0 + c * a1
            else:  # z
                p0 = c - 1j * s
                p1 = c + 1j * s
                for base in range(0, dim, block):
                    for i in range(base, base + lo):
                        buf[r, i] = p0 * buf[r, i]
                        buf[r, i + lo] = p1 * buf[r, i + lo]


@nb.njit(cache=True, fastmath=False)
def rot_grads(bra, ket, qubits, axis, out):
    """<bra| -(i/2) sigma_axis(q) |ket> for each listed qubit.

    Both states are taken at the sweep output; the sweep's gates commute, so
    every generator inserts at the same point.
    """
    n_rows, dim = bra.shape
    for j in range(qubits.shape[0]):
        lo = 1 << qubits[j]
        block = lo << 1
        for r in range(n_rows):
            s_a = 0.0 + 0.0j  # <b0|k1> (x, y) or <b0|k0> (z)
            s_b = 0.0 + 0.0j  # <b1|k0> (x, y) or <b1|k1> (z)
            if axis == 2:
                for base in range(0, dim, block):
                    for i in range(base, base + lo):
                        s_a += np.conj(bra[r, i]) * ket[r, i]
                        s_b += np.conj(bra[r, i + lo]) * ket[r, i + lo]
                out[r, j] = -0.5j * (s_a - s_b)
            else:
                for base in range(0, dim, block):
                    for i in range(base, base + lo):
                        s_a += np.conj(bra[r, i]) * ket[r, i + lo]
                        s_b += np.conj(bra[r, i + lo]) * ket[r, i]
                if axis == 1:
                    out[r, j] = -0.5 * (s_a - s_b)
                else:
                    out[r, j] = -0.5j * (s_a + s_b)
