"""Gate definitions.

``Gate.qubits`` lists controls first and the target last.  Matrices act on
those qubits in that order, first listed qubit most significant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_T = np.diag([1, np.exp(1j * np.pi / 4)])

FIXED = {"I": _I2, "X": _X, "Y": _Y, "Z": _Z, "H": _H, "T": _T}
ROTATIONS = {"Rx", "Ry", "Rz"}
CONTROLLED = {"CNOT": 1, "CRy": 1, "CRz": 1, "CCRy": 2}
SINGLE_QUBIT = set(FIXED) | ROTATIONS | {"U"}
PAULI_MATRICES = {"X": _X, "Y": _Y, "Z": _Z}


def rotation(axis: str, theta: float) -> np.ndarray:
    """``exp(-i theta/2 P)`` for ``P`` in X, Y, Z."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return c * _I2 - 1j * s * PAULI_MATRICES[axis]


def controlled(U: np.ndarray, n_controls: int = 1) -> np.ndarray:
    """Block-diagonal ``diag(I, ..., I, U)``: ``U`` fires when all controls are 1."""
    d = U.shape[0]
    out = np.eye(d * 2**n_controls, dtype=complex)
    out[-d:, -d:] = U
    return out


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    theta: float | None = None
    matrix_: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        n = 1 + CONTROLLED.get(self.kind, 0)
        if self.kind not in SINGLE_QUBIT and self.kind not in CONTROLLED:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(self.qubits) != n:
            raise ValueError(f"{self.kind} acts on {n} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != n:
            raise ValueError(f"{self.kind}: control and target must differ, got {self.qubits}")
        needs_angle = self.kind in ROTATIONS or self.kind in {"CRy", "CRz", "CCRy"}
        if needs_angle and self.theta is None:
            raise ValueError(f"{self.kind} needs an angle")
        if self.kind == "U" and self.matrix_ is None:
            raise ValueError("generic single-qubit gate needs a matrix")

    @property
    def target(self) -> int:
        return self.qubits[-1]

    @property
    def n_qubits(self) -> int:
        return len(self.qubits)

    def matrix(self) -> np.ndarray:
        k = self.kind
        if k == "U":
            return np.asarray(self.matrix_, dtype=complex)
        if k in FIXED:
            return FIXED[k]
        if k in ROTATIONS:
            return rotation(k[1].upper(), self.theta)
        if k == "CNOT":
            return controlled(_X)
        if k == "CRy":
            return controlled(rotation("Y", self.theta))
        if k == "CRz":
            return controlled(rotation("Z", self.theta))
        return controlled(rotation("Y", self.theta), 2)

    def inverse(self) -> "Gate":
        if self.kind == "U":
            return Gate("U", self.qubits, matrix_=self.matrix().conj().T)
        if self.kind == "T":
            return Gate("U", self.qubits, matrix_=_T.conj())
        if self.theta is not None:
            return Gate(self.kind, self.qubits, -self.theta)
        return self


# short constructors
def H(q): return Gate("H", (q,))
def X(q): return Gate("X", (q,))
def Rx(q, theta): return Gate("Rx", (q,), theta)
def Ry(q, theta): return Gate("Ry", (q,), theta)
def Rz(q, theta): return Gate("Rz", (q,), theta)
def CNOT(c, t): return Gate("CNOT", (c, t))
def CRy(c, t, theta): return Gate("CRy", (c, t), theta)
def CRz(c, t, theta): return Gate("CRz", (c, t), theta)
def CCRy(c1, c2, t, theta): return Gate("CCRy", (c1, c2, t), theta)


def circuit_unitary(gates, n_qubits: int) -> np.ndarray:
    """Dense unitary of a gate list (test helper, small ``n`` only)."""
    from .state import apply_matrix

    U = np.eye(2**n_qubits, dtype=complex)
    for g in gates:
        U = apply_matrix(U, g.matrix(), g.qubits, n_qubits)
    return U
