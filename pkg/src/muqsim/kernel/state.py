"""Statevector and density-matrix storage plus gate application.

Amplitude arrays use big-endian indexing: qubit 0 is the most significant bit.
Pure states may carry a trailing batch axis, ``(2^Q, m)``, which lets the
same kernels act on many vectors (or a whole unitary) at once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from ..pauli import PauliString, index_masks
from .gates import Gate

NORM_TOL = 1e-10
PSD_TOL = -1e-9
MAX_PURE_QUBITS = 29
MAX_DENSITY_QUBITS = 11


class ResourceLimitError(RuntimeError):
    """Requested state does not fit the configured memory limits."""


def state_bytes(n_qubits: int, mode: str = "pure") -> int:
    dim = 2**n_qubits
    return 16 * (dim if mode == "pure" else dim * dim)


def preflight(n_qubits: int, mode: str = "pure", allow_large: bool = False) -> None:
    """Refuse states above the supported sizes unless explicitly allowed."""
    limit = MAX_PURE_QUBITS if mode == "pure" else MAX_DENSITY_QUBITS
    if n_qubits > limit:
        raise ResourceLimitError(f"{mode} mode supports at most {limit} qubits, got {n_qubits}")
    gib = state_bytes(n_qubits, mode) / 2**30
    if gib > 1.0 and not allow_large:
        raise ResourceLimitError(
            f"{n_qubits}-qubit {mode} state needs {gib:.1f} GiB; pass allow_large=True to proceed")


@dataclass
class QuantumState:
    mode: str
    data: np.ndarray
    n_qubits: int

    def __post_init__(self):
        if self.mode not in ("pure", "density"):
            raise ValueError("mode must be 'pure' or 'density'")
        dim = 2**self.n_qubits
        want = (dim,) if self.mode == "pure" else (dim, dim)
        if self.data.shape != want:
            raise ValueError(f"expected shape {want}, got {self.data.shape}")

    @classmethod
    def zero(cls, n_qubits: int, mode: str = "pure", allow_large: bool = False) -> "QuantumState":
        preflight(n_qubits, mode, allow_large)
        dim = 2**n_qubits
        data = np.zeros(dim if mode == "pure" else (dim, dim), dtype=complex)
        if mode == "pure":
            data[0] = 1.0
        else:
            data[0, 0] = 1.0
        return cls(mode, data, n_qubits)

    @classmethod
    def from_vector(cls, psi) -> "QuantumState":
        psi = np.asarray(psi, dtype=complex)
        n = int(round(np.log2(psi.size)))
        return cls("pure", psi.copy(), n)

    @classmethod
    def from_density(cls, rho) -> "QuantumState":
        rho = np.asarray(rho, dtype=complex)
        n = int(round(np.log2(rho.shape[0])))
        return cls("density", rho.copy(), n)

    def to_density(self) -> "QuantumState":
        if self.mode == "density":
            return self
        return QuantumState("density", np.outer(self.data, self.data.conj()), self.n_qubits)

    def copy(self) -> "QuantumState":
        return QuantumState(self.mode, self.data.copy(), self.n_qubits)

    def check(self) -> None:
        """Raise if the state violates normalisation / positivity."""
        if self.mode == "pure":
            nrm = np.vdot(self.data, self.data).real
            if abs(nrm - 1) > NORM_TOL:
                raise ValueError(f"state norm {nrm} != 1")
            return
        rho = self.data
        if np.abs(rho - rho.conj().T).max() > NORM_TOL:
            raise ValueError("density matrix not Hermitian")
        if abs(np.trace(rho).real - 1) > NORM_TOL:
            raise ValueError("density matrix trace != 1")
        if np.linalg.eigvalsh(rho).min() < PSD_TOL:
            raise ValueError("density matrix not positive semidefinite")


def apply_matrix(psi: np.ndarray, U: np.ndarray, qubits, n_qubits: int) -> np.ndarray:
    """Left-multiply ``psi`` (``(2^n,)`` or ``(2^n, m)``) by ``U`` on ``qubits``."""
    qubits = tuple(qubits)
    k = len(qubits)
    if any(not 0 <= q < n_qubits for q in qubits):
        raise IndexError(f"qubits {qubits} out of range for {n_qubits} qubits")
    rest = psi.shape[1:]
    t = psi.reshape((2,) * n_qubits + rest)
    Ut = np.asarray(U, dtype=complex).reshape((2,) * (2 * k))
    t = np.tensordot(Ut, t, axes=(list(range(k, 2 * k)), list(qubits)))
    t = np.moveaxis(t, list(range(k)), list(qubits))
    return np.ascontiguousarray(t).reshape(psi.shape)


def _conjugate(rho: np.ndarray, U: np.ndarray, qubits, n: int) -> np.ndarray:
    m = apply_matrix(rho, U, qubits, n)
    return apply_matrix(m.T, U.conj(), qubits, n).T


def apply_gate(state: QuantumState, gate: Gate) -> QuantumState:
    """Apply ``gate`` in place (density mode: ``U rho U^dagger``) and return the state."""
    U = gate.matrix()
    if state.mode == "pure":
        state.data = apply_matrix(state.data, U, gate.qubits, state.n_qubits)
    else:
        state.data = _conjugate(state.data, U, gate.qubits, state.n_qubits)
    return state


def apply_circuit(state: QuantumState, gates) -> QuantumState:
    for g in gates:
        apply_gate(state, g)
    return state


@numba.njit(cache=True)
def _parity(v):
    v ^= v >> 32
    v ^= v >> 16
    v ^= v >> 8
    v ^= v >> 4
    v ^= v >> 2
    v ^= v >> 1
    return v & 1


@numba.njit(cache=True)
def _rotate_inplace(a, xm, zm, yph, c, s):
    """``a <- (c I - i s P) a`` for the Pauli string given by index masks."""
    dim, m = a.shape
    if xm == 0:
        for i in range(dim):
            f = c - 1j * s * (1 - 2 * _parity(np.int64(i) & zm))
            for k in range(m):
                a[i, k] *= f
        return
    pivot = np.int64(1)
    while not (xm & pivot):
        pivot <<= 1
    for i in range(dim):
        if i & pivot:
            continue
        j = i ^ xm
        # P|j> = phi_j |i>,  P|i> = phi_i |j>
        phi_j = yph * (1 - 2 * _parity(np.int64(j) & zm))
        phi_i = yph * (1 - 2 * _parity(np.int64(i) & zm))
        for k in range(m):
            ai = a[i, k]
            aj = a[j, k]
            a[i, k] = c * ai - 1j * s * phi_j * aj
            a[j, k] = c * aj - 1j * s * phi_i * ai


def apply_pauli_rotation(psi: np.ndarray, ps: PauliString, theta: float, n_qubits: int) -> np.ndarray:
    """In place ``psi <- exp(-i theta/2 P) psi``; ``psi`` is ``(2^n,)`` or ``(2^n, m)``."""
    if not ps.ops:
        return psi  # global phase
    xm, zm, ny = index_masks(ps, n_qubits)
    view = psi.reshape(psi.shape[0], -1)
    if not view.flags.c_contiguous:
        raise ValueError("apply_pauli_rotation needs a C-contiguous array")
    _rotate_inplace(view, np.int64(xm), np.int64(zm), complex(1j**ny),
                    np.cos(theta / 2), np.sin(theta / 2))
    return psi


def apply_pauli_rotation_state(state: QuantumState, ps: PauliString, theta: float) -> QuantumState:
    n = state.n_qubits
    if state.mode == "pure":
        apply_pauli_rotation(state.data, ps, theta, n)
    else:
        m = np.ascontiguousarray(state.data)
        apply_pauli_rotation(m, ps, theta, n)
        m = np.ascontiguousarray(m.conj().T)
        apply_pauli_rotation(m, ps, theta, n)
        state.data = m.conj().T.copy()
    return state


def z_signs(n_qubits: int, qubit: int) -> np.ndarray:
    """``+1`` where ``qubit`` is 0, ``-1`` where it is 1."""
    idx = np.arange(2**n_qubits)
    return 1 - 2 * ((idx >> (n_qubits - 1 - qubit)) & 1)


def probabilities(state: QuantumState) -> np.ndarray:
    if state.mode == "pure":
        return np.abs(state.data) ** 2
    return np.real(np.diag(state.data)).copy()


def expectation_z(state: QuantumState, qubit: int) -> float:
    if not 0 <= qubit < state.n_qubits:
        raise IndexError(f"qubit {qubit} out of range")
    return float(np.dot(z_signs(state.n_qubits, qubit), probabilities(state)))


def standard_error(mean: float, shots: int) -> float:
    """Binomial standard error of a +-1 average."""
    return float(np.sqrt(max(0.0, 1.0 - mean * mean)) / np.sqrt(shots))


def sample_z(state: QuantumState, qubit: int, shots: int, rng: np.random.Generator):
    """Simulated projective ``Z`` measurements: ``(mean, standard error)``."""
    if shots < 1:
        raise ValueError("shots must be positive")
    p0 = 0.5 * (1.0 + expectation_z(state, qubit))
    zeros = rng.binomial(shots, min(max(p0, 0.0), 1.0))
    mean = (2 * zeros - shots) / shots
    return mean, standard_error(mean, shots)
