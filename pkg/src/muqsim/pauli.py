"""Pauli strings and real-weighted sums of them.

A :class:`PauliString` stores only its non-identity factors, sorted by qubit.
Internally every string also has a symplectic form ``(x_bits, z_bits)`` with
bit ``q`` describing qubit ``q`` (``Y`` sets both bits), which is what the
commutation and product rules use.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np
import scipy.sparse as sp

_PAULI_BITS = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_PAULI = {(1, 0): "X", (1, 1): "Y", (0, 1): "Z"}

# single-qubit products: (a, b) -> (phase, c) with a*b = phase * c
_MUL = {
    ("X", "Y"): (1j, "Z"), ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"), ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"), ("X", "Z"): (-1j, "Y"),
}

COEFF_TOL = 1e-12


@dataclass(frozen=True, order=True)
class PauliString:
    ops: tuple[tuple[int, str], ...] = ()

    def __post_init__(self):
        ops = tuple(sorted((int(q), str(p)) for q, p in self.ops if p != "I"))
        qubits = [q for q, _ in ops]
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"repeated qubit in Pauli string {ops}")
        for q, p in ops:
            if p not in _PAULI_BITS or q < 0:
                raise ValueError(f"bad Pauli factor {(q, p)}")
        object.__setattr__(self, "ops", ops)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """``"XIZ"`` -> X on qubit 0, Z on qubit 2."""
        return cls(tuple((q, c) for q, c in enumerate(label.upper()) if c != "I"))

    @classmethod
    def from_bits(cls, x: int, z: int) -> "PauliString":
        ops = []
        q = 0
        while x >> q or z >> q:
            key = ((x >> q) & 1, (z >> q) & 1)
            if key != (0, 0):
                ops.append((q, _BITS_PAULI[key]))
            q += 1
        return cls(tuple(ops))

    @property
    def weight(self) -> int:
        return len(self.ops)

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.ops)

    @cached_property
    def bits(self) -> tuple[int, int]:
        x = z = 0
        for q, p in self.ops:
            bx, bz = _PAULI_BITS[p]
            x |= bx << q
            z |= bz << q
        return x, z

    def label(self, n_qubits: int) -> str:
        chars = ["I"] * n_qubits
        for q, p in self.ops:
            chars[q] = p
        return "".join(chars)

    def commutes_with(self, other: "PauliString") -> bool:
        x1, z1 = self.bits
        x2, z2 = other.bits
        return ((x1 & z2) ^ (z1 & x2)).bit_count() % 2 == 0

    def __mul__(self, other: "PauliString") -> tuple[complex, "PauliString"]:
        """Return ``(phase, string)`` with ``self * other = phase * string``."""
        a = dict(self.ops)
        phase = 1.0 + 0j
        for q, p in other.ops:
            if q not in a:
                a[q] = p
            elif a[q] == p:
                del a[q]
            else:
                ph, c = _MUL[(a[q], p)]
                phase *= ph
                a[q] = c
        return phase, PauliString(tuple(a.items()))

    def __str__(self):
        if not self.ops:
            return "I"
        return " ".join(f"{p}{q}" for q, p in self.ops)

    def to_sparse(self, n_qubits: int) -> sp.csr_matrix:
        """Sparse matrix; qubit 0 is the most significant bit of the index."""
        dim = 2**n_qubits
        xm, zm, ny = index_masks(self, n_qubits)
        cols = np.arange(dim)
        rows = cols ^ xm
        vals = (1j**ny) * parity_sign(cols & zm)
        return sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim))


def index_masks(ps: PauliString, n_qubits: int) -> tuple[int, int, int]:
    """Masks on basis indices (big-endian) plus the number of ``Y`` factors."""
    xm = zm = ny = 0
    for q, p in ps.ops:
        if q >= n_qubits:
            raise ValueError(f"qubit {q} out of range for {n_qubits} qubits")
        bit = 1 << (n_qubits - 1 - q)
        if p in "XY":
            xm |= bit
        if p in "YZ":
            zm |= bit
        if p == "Y":
            ny += 1
    return xm, zm, ny


def parity_sign(values: np.ndarray) -> np.ndarray:
    """(-1)^popcount for an integer array."""
    return 1 - 2 * (np.bitwise_count(np.asarray(values, dtype=np.uint64)) & 1).astype(np.int8)


@dataclass(frozen=True)
class PauliSum:
    """``sum_a h_a P_a`` with real coefficients, in canonical term order."""

    terms: tuple[tuple[PauliString, float], ...]
    n_qubits: int

    @classmethod
    def from_dict(cls, coeffs: Mapping[PauliString, complex], n_qubits: int,
                  tol: float = COEFF_TOL) -> "PauliSum":
        terms = []
        for ps, c in coeffs.items():
            c = complex(c)
            if abs(c.imag) > max(tol, 1e-9 * abs(c.real)):
                raise ValueError(f"non-real coefficient {c} on {ps}; operator not Hermitian")
            if abs(c.real) > tol:
                if ps.ops and ps.ops[-1][0] >= n_qubits:
                    raise ValueError(f"{ps} does not fit in {n_qubits} qubits")
                terms.append((ps, float(c.real)))
        terms.sort(key=lambda t: t[0])
        return cls(tuple(terms), n_qubits)

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliSum":
        return cls((), n_qubits)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def as_dict(self) -> dict[PauliString, float]:
        return dict(self.terms)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if other.n_qubits != self.n_qubits:
            raise ValueError("qubit counts differ")
        acc: dict[PauliString, complex] = dict(self.terms)
        for ps, c in other.terms:
            acc[ps] = acc.get(ps, 0.0) + c
        return PauliSum.from_dict(acc, self.n_qubits)

    def scale(self, factor: float) -> "PauliSum":
        return PauliSum.from_dict({ps: factor * c for ps, c in self.terms}, self.n_qubits)

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([c for _, c in self.terms])

    @property
    def one_norm(self) -> float:
        return float(np.abs(self.coefficients).sum()) if self.terms else 0.0

    def without_identity(self) -> "PauliSum":
        return PauliSum(tuple(t for t in self.terms if t[0].weight), self.n_qubits)

    def to_sparse(self) -> sp.csr_matrix:
        dim = 2**self.n_qubits
        out = sp.csr_matrix((dim, dim), dtype=complex)
        for ps, c in self.terms:
            out = out + c * ps.to_sparse(self.n_qubits)
        return out.tocsr()

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()

    def __str__(self):
        return " + ".join(f"{c:.6g}*[{ps}]" for ps, c in self.terms) or "0"


def accumulate(products: Iterable[tuple[complex, PauliString]], n_qubits: int) -> PauliSum:
    acc: dict[PauliString, complex] = {}
    for c, ps in products:
        acc[ps] = acc.get(ps, 0.0) + c
    return PauliSum.from_dict(acc, n_qubits)


def commutator(a: PauliString, b: PauliString) -> tuple[complex, PauliString] | None:
    """``[a, b] = coeff * P`` or ``None`` when the strings commute."""
    if a.commutes_with(b):
        return None
    phase, prod = a * b
    return 2 * phase, prod


def anticommutation_matrix(strings: Iterable[PauliString]) -> np.ndarray:
    """Boolean matrix ``A[i, j]`` = strings ``i`` and ``j`` anticommute."""
    bits = [ps.bits for ps in strings]
    n_words = max([max(x.bit_length(), z.bit_length()) for x, z in bits] + [1])
    # unpack into boolean qubit arrays to stay independent of integer width
    X = np.array([[(x >> q) & 1 for q in range(n_words)] for x, _ in bits], dtype=np.uint8)
    Z = np.array([[(z >> q) & 1 for q in range(n_words)] for _, z in bits], dtype=np.uint8)
    if len(bits) == 0:
        return np.zeros((0, 0), dtype=bool)
    sym = (X.astype(np.int64) @ Z.T.astype(np.int64) + Z.astype(np.int64) @ X.T.astype(np.int64))
    return (sym % 2).astype(bool)
