"""Bipartite Schmidt decomposition across the module cut.

The state is reshaped so qubits [0, cut) form the left factor and the rest
the right factor, then an SVD of the resulting matrix gives the Schmidt
values and paired orthonormal factor states. Rank-d truncation renormalizes
the kept terms; the dropped weight sum(lambda_i^2, i > d) lower-bounds the
infidelity any rank-d ansatz can reach.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .statevector import StateVector, ValidationError

# Singular values below this are clamped to zero to stabilize rank counting.
_CLAMP = 1e-14


@dataclass(frozen=True)
class SchmidtDecomposition:
    cut: int
    values: np.ndarray
    left_states: tuple[StateVector, ...]
    right_states: tuple[StateVector, ...]

    @property
    def rank(self) -> int:
        return len(self.values)


def _as_matrix(state: StateVector, cut: int) -> np.ndarray:
    """Amplitudes as a (2**cut, 2**(N-cut)) matrix, rows = left qubits."""
    n = state.num_qubits
    return state.amplitudes.reshape(1 << (n - cut), 1 << cut).T


def schmidt_decompose(state: StateVector, cut: int) -> SchmidtDecomposition:
    if not 1 <= cut < state.num_qubits:
        raise ValidationError(
            f"cut must lie strictly inside 1..{state.num_qubits - 1}, got {cut}"
        )
    mat = _as_matrix(state, cut)
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    s = np.where(s < _CLAMP, 0.0, s)
    keep = int(np.count_nonzero(s))
    keep = max(keep, 1)
    left = tuple(StateVector(cut, u[:, i]) for i in range(keep))
    right = tuple(
        StateVector(state.num_qubits - cut, vh[i, :]) for i in range(keep)
    )
    return SchmidtDecomposition(cut, s[:keep].copy(), left, right)


def reconstruct(decomp: SchmidtDecomposition, num_terms: int | None = None) -> StateVector:
    """Sum of the first `num_terms` Schmidt terms, without renormalization."""
    k = decomp.rank if num_terms is None else num_terms
    n_left = decomp.cut
    n_right = decomp.right_states[0].num_qubits
    amps = np.zeros((1 << n_right, 1 << n_left), dtype=complex)
    for i in range(k):
        amps += decomp.values[i] * np.outer(
            decomp.right_states[i].amplitudes, decomp.left_states[i].amplitudes
        )
    return StateVector(n_left + n_right, amps.reshape(-1))


def truncate_to_state(decomp: SchmidtDecomposition, d: int) -> StateVector:
    """Keep the d most significant Schmidt terms, renormalized to unit norm."""
    if not 1 <= d <= decomp.rank:
        raise ValidationError(f"d must be in 1..{decomp.rank}, got {d}")
    state = reconstruct(decomp, d)
    state.amplitudes /= np.linalg.norm(state.amplitudes)
    return state


def discarded_weight(decomp: SchmidtDecomposition, d: int) -> float:
    """sum(lambda_i^2) over the terms dropped by a rank-d truncation."""
    if not 0 <= d <= decomp.rank:
        raise ValidationError(f"d must be in 0..{decomp.rank}, got {d}")
    return float(np.sum(decomp.values[d:] ** 2))


def schmidt_rank(state: StateVector, cut: int, tol: float = 1e-10) -> int:
    """Number of Schmidt values above `tol` across the cut."""
    if tol <= 0:
        raise ValidationError("tol must be positive")
    s = np.linalg.svd(_as_matrix(state, cut), compute_uv=False)
    return int(np.count_nonzero(s > tol))
