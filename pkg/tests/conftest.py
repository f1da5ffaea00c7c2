import numpy as np
import pytest

from muqsim.geometry import caf2_geometry
from muqsim.hamiltonians import dipolar_hamiltonian

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1.0 + 0j, -1.0]),
}


def kron_all(mats):
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def embed(op, q, n):
    """Single-qubit ``op`` on qubit ``q`` of ``n`` (qubit 0 most significant)."""
    return kron_all([op if k == q else PAULI["I"] for k in range(n)])


@pytest.fixture(scope="session")
def fmuf():
    s = caf2_geometry(1)
    return s, dipolar_hamiltonian(s)


@pytest.fixture(scope="session")
def caf2_11():
    s = caf2_geometry(2)
    return s, dipolar_hamiltonian(s)
