"""Benchmark spin-chain Hamiltonians as sums of Pauli strings.

Three open-chain models: the transverse-field Ising model, the anisotropic
(XYZ) spin-half Heisenberg model, and a spin-1 Heisenberg chain cast onto
pairs of qubits with a strong ferromagnetic intra-pair bond selecting the
triplet sector. Exact minimal eigenpairs come from dense diagonalization
at small sizes and Lanczos (ARPACK) above that.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .statevector import ConfigurationError, StateVector, ValidationError

# Dense eigensolver below this qubit count, Lanczos at or above.
_DENSE_LIMIT = 10
_MAX_GROUND_QUBITS = 14
_DEGENERACY_GAP = 1e-10


@dataclass(frozen=True)
class PauliString:
    """One weighted Pauli word, e.g. 0.5 * 'ZZIII...'.

    `paulis` holds one label from {I, X, Y, Z} per qubit; index 0 is qubit 0.
    """

    coefficient: float
    paulis: str

    def __post_init__(self) -> None:
        if not np.isfinite(self.coefficient):
            raise ValidationError("Pauli coefficient must be finite")
        word = self.paulis.upper()
        if set(word) - set("IXYZ"):
            raise ValidationError(f"invalid Pauli labels in {self.paulis!r}")
        object.__setattr__(self, "paulis", word)

    @property
    def num_qubits(self) -> int:
        return len(self.paulis)

    def masks(self) -> tuple[int, int, int]:
        """(flip mask, z-phase mask, Y count) for bitwise application."""
        flip = zmask = ny = 0
        for q, p in enumerate(self.paulis):
            if p in "XY":
                flip |= 1 << q
            if p in "ZY":
                zmask |= 1 << q
            if p == "Y":
                ny += 1
        return flip, zmask, ny


def _single(n: int, q: int, label: str, coeff: float) -> PauliString:
    word = ["I"] * n
    word[q] = label
    return PauliString(coeff, "".join(word))


def _pair(n: int, qa: int, qb: int, label: str, coeff: float) -> PauliString:
    word = ["I"] * n
    word[qa] = label
    word[qb] = label
    return PauliString(coeff, "".join(word))


@dataclass(frozen=True)
class Hamiltonian:
    name: str
    num_qubits: int
    terms: tuple[PauliString, ...]

    def __post_init__(self) -> None:
        for t in self.terms:
            if t.num_qubits != self.num_qubits:
                raise ValidationError(
                    f"term length {t.num_qubits} != {self.num_qubits} qubits"
                )

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits


@dataclass(frozen=True)
class GroundStateSolution:
    energy: float
    state: StateVector
    degeneracy_flag: bool
    gap: float


def build_tfim(n_qubits: int, J: float, h_x: float) -> Hamiltonian:
    """H = -J sum Z_i Z_{i+1} - h_x sum X_i on an open chain."""
    if n_qubits < 2:
        raise ConfigurationError("TFIM needs at least 2 qubits")
    terms = [_pair(n_qubits, i, i + 1, "Z", -J) for i in range(n_qubits - 1)]
    terms += [_single(n_qubits, i, "X", -h_x) for i in range(n_qubits)]
    return Hamiltonian("tfim", n_qubits, tuple(terms))


def build_xyz(
    n_qubits: int, J_x: float, J_y: float, J_z: float, h_x: float
) -> Hamiltonian:
    """Anisotropic Heisenberg chain in spin-half operators S = sigma/2.

    H = sum_i (J_x S^x_i S^x_{i+1} + J_y S^y_i S^y_{i+1} + J_z S^z_i S^z_{i+1})
        + h_x sum_i S^x_i,
    so Pauli-string coefficients carry J_a/4 and h_x/2.
    """
    if n_qubits < 2:
        raise ConfigurationError("XYZ chain needs at least 2 qubits")
    terms: list[PauliString] = []
    for i in range(n_qubits - 1):
        for label, coupling in (("X", J_x), ("Y", J_y), ("Z", J_z)):
            if coupling != 0.0:
                terms.append(_pair(n_qubits, i, i + 1, label, coupling / 4.0))
    if h_x != 0.0:
        terms += [_single(n_qubits, i, "X", h_x / 2.0) for i in range(n_qubits)]
    return Hamiltonian("xyz", n_qubits, tuple(terms))


def build_spin1_heisenberg(
    n_pairs: int, J: float, J_fm_magnitude: float
) -> Hamiltonian:
    """Spin-1 Heisenberg chain mapped onto 2*n_pairs qubits.

    Site i of the spin-1 chain becomes qubit pair (2i, 2i+1). Inter-pair
    bonds carry (J/4)(sigma_a + sigma_b).(sigma_c + sigma_d); each pair gets
    a ferromagnetic -|J_fm_magnitude| sigma.sigma bond that selects the
    triplet sector (the printed sign would select singlets instead).
    """
    if n_pairs < 2:
        raise ConfigurationError("spin-1 chain needs at least 2 pairs")
    n = 2 * n_pairs
    j_fm = -abs(J_fm_magnitude)
    terms: list[PauliString] = []
    for i in range(n_pairs - 1):
        a, b = 2 * i, 2 * i + 1
        c, d = 2 * i + 2, 2 * i + 3
        for label in "XYZ":
            for qa in (a, b):
                for qb in (c, d):
                    terms.append(_pair(n, qa, qb, label, J / 4.0))
    for i in range(n_pairs):
        for label in "XYZ":
            terms.append(_pair(n, 2 * i, 2 * i + 1, label, j_fm))
    return Hamiltonian("spin1", n, tuple(terms))


def spin1_intra_pair_offset(n_pairs: int, J_fm_magnitude: float) -> float:
    """Constant energy the triplet-selection bonds add in the triplet sector."""
    return -abs(J_fm_magnitude) * n_pairs


_SPIN1_SZ = np.diag([1.0, 0.0, -1.0]).astype(complex)
_SPIN1_SP = np.sqrt(2.0) * np.diag([1.0, 1.0], k=1).astype(complex)
_SPIN1_SX = (_SPIN1_SP + _SPIN1_SP.T.conj()) / 2.0
_SPIN1_SY = (_SPIN1_SP - _SPIN1_SP.T.conj()) / 2.0j


def spin1_direct_ed(n_sites: int, J: float) -> float:
    """Exact ground energy of the open spin-1 chain H = J sum S_i.S_{i+1}.

    Validation oracle for the qubit mapping; dense in the 3**n_sites basis.
    """
    if not 2 <= n_sites <= 7:
        raise ConfigurationError("spin-1 direct ED supports 2..7 sites")
    dim = 3**n_sites
    ham = np.zeros((dim, dim), dtype=complex)
    eye = np.eye(3, dtype=complex)
    for i in range(n_sites - 1):
        for op in (_SPIN1_SX, _SPIN1_SY, _SPIN1_SZ):
            mats = [eye] * n_sites
            mats[i] = op
            mats[i + 1] = op
            term = mats[0]
            for m in mats[1:]:
                term = np.kron(term, m)
            ham += J * term
    return float(np.linalg.eigvalsh(ham)[0])


def _term_action(term: PauliString) -> tuple[np.ndarray, np.ndarray]:
    """(source permutation, per-source weights) so that out[perm] += w * psi."""
    flip, zmask, ny = term.masks()
    dim = 1 << term.num_qubits
    idx = np.arange(dim)
    parity = np.bitwise_count(idx & zmask) & 1
    phase = (1j**ny) * np.where(parity, -1.0, 1.0)
    return idx ^ flip, term.coefficient * phase


def matvec(h: Hamiltonian, state: StateVector) -> StateVector:
    """H|psi> by per-term Pauli-string action; result is not normalized."""
    if h.num_qubits != state.num_qubits:
        raise ValidationError(
            f"Hamiltonian on {h.num_qubits} qubits, state on {state.num_qubits}"
        )
    psi = state.amplitudes
    out = np.zeros_like(psi)
    for term in h.terms:
        perm, weights = _term_action(term)
        out[perm] += weights * psi
    return StateVector(h.num_qubits, out)


def sparse_matrix(h: Hamiltonian) -> sp.csr_matrix:
    dim = h.dim
    rows, cols, data = [], [], []
    for term in h.terms:
        perm, weights = _term_action(term)
        rows.append(perm)
        cols.append(np.arange(dim))
        data.append(weights)
    mat = sp.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    )
    return mat.tocsr()


def dense_matrix(h: Hamiltonian) -> np.ndarray:
    if h.num_qubits > 12:
        raise ConfigurationError("dense form limited to 12 qubits")
    return sparse_matrix(h).toarray()


def ground_state(h: Hamiltonian) -> GroundStateSolution:
    """Exact minimal eigenpair; degeneracy_flag set when the gap < 1e-10."""
    if h.num_qubits > _MAX_GROUND_QUBITS:
        raise ConfigurationError(
            f"ground_state limited to {_MAX_GROUND_QUBITS} qubits"
        )
    if h.num_qubits < _DENSE_LIMIT:
        mat = sparse_matrix(h).toarray()
        vals, vecs = np.linalg.eigh(mat)
        energy, vec, gap = vals[0], vecs[:, 0], float(vals[1] - vals[0])
    else:
        mat = sparse_matrix(h)
        # Deterministic start vector keeps ARPACK (and the returned vector
        # within a degenerate ground space) reproducible across runs.
        v0 = np.random.default_rng(1234).standard_normal(h.dim)
        vals, vecs = spla.eigsh(mat, k=4, which="SA", v0=v0, tol=0)
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
        energy, vec, gap = vals[0], vecs[:, 0], float(vals[1] - vals[0])
    vec = np.asarray(vec, dtype=complex)
    vec /= np.linalg.norm(vec)
    # Fix the global phase: largest-magnitude amplitude made real positive.
    pivot = int(np.argmax(np.abs(vec)))
    vec *= np.exp(-1j * np.angle(vec[pivot]))
    return GroundStateSolution(
        energy=float(energy),
        state=StateVector(h.num_qubits, vec),
        degeneracy_flag=gap < _DEGENERACY_GAP,
        gap=gap,
    )


def expectation(h: Hamiltonian, state: StateVector) -> float:
    """Real <psi|H|psi>; asserts the imaginary part is numerical noise."""
    hpsi = matvec(h, state)
    val = complex(np.vdot(state.amplitudes, hpsi.amplitudes))
    if abs(val.imag) > 1e-10:
        raise ValidationError(
            f"expectation has non-negligible imaginary part {val.imag:g}"
        )
    return float(val.real)
