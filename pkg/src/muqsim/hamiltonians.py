"""Dipolar, quadrupolar and Zeeman Hamiltonians as Pauli sums.

All coefficients are angular frequencies in rad/us (the Hamiltonian divided
by hbar).  Positions are in Angstrom and fields in Tesla.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy import constants as sc

from .pauli import PauliString, PauliSum, accumulate
from .spins import AXES, SpinSystem, spin_operator

MU0_OVER_4PI = sc.mu_0 / (4 * np.pi)
HBAR = sc.hbar
ANGSTROM = 1e-10
BARN = 1e-28
PER_US = 1e-6  # rad/s -> rad/us


def _spin_terms(system: SpinSystem, index: int):
    """Per axis, the list of ``(coeff, PauliString)`` making up ``S^axis``."""
    out = []
    for axis in AXES:
        op = spin_operator(index, axis, system.layout)
        out.append([(c, PauliString(((q, p),))) for c, p, q in op.expansion])
    return out


def _bilinear(system: SpinSystem, i: int, j: int, M: np.ndarray):
    """Products for ``sum_ab M[a, b] S_i^a S_j^b`` (``i == j`` allowed)."""
    Si, Sj = _spin_terms(system, i), _spin_terms(system, j)
    for a, b in itertools.product(range(3), repeat=2):
        if M[a, b] == 0.0:
            continue
        for ca, pa in Si[a]:
            for cb, pb in Sj[b]:
                phase, prod = pa * pb
                yield M[a, b] * ca * cb * phase, prod


def dipolar_coupling(system: SpinSystem, i: int, j: int) -> float:
    """``mu0 hbar gamma_i gamma_j / (4 pi r^3)`` in rad/us."""
    pi, pj = system.particles[i], system.particles[j]
    r = np.linalg.norm(np.subtract(pj.position, pi.position)) * ANGSTROM
    if r <= 0:
        raise ValueError(f"particles {pi.label!r} and {pj.label!r} coincide")
    return MU0_OVER_4PI * HBAR * pi.gyromagnetic_ratio * pj.gyromagnetic_ratio / r**3 * PER_US


def dipolar_hamiltonian(system: SpinSystem, nuclear_nuclear: bool = True) -> PauliSum:
    """Magnetic dipole-dipole coupling, one term per unordered pair.

    With ``nuclear_nuclear=False`` only pairs involving the muon are kept.
    """
    n = len(system)
    products = []
    for i, j in itertools.combinations(range(n), 2):
        if not nuclear_nuclear and system.muon_index not in (i, j):
            continue
        w = dipolar_coupling(system, i, j)
        rhat = np.subtract(system.particles[j].position, system.particles[i].position)
        rhat = rhat / np.linalg.norm(rhat)
        M = w * (np.eye(3) - 3.0 * np.outer(rhat, rhat))
        products.extend(_bilinear(system, i, j, M))
    return accumulate(products, system.n_qubits)


def quadrupole_hamiltonian(system: SpinSystem, efg: dict[int, np.ndarray]) -> PauliSum:
    """Nuclear quadrupole coupling ``S^T G S`` for every nucleus in ``efg``.

    ``efg`` maps particle index to a symmetric 3x3 field-gradient tensor in
    V/Angstrom^2.  The particle needs ``quadrupole=(Q_barn, anti_shielding)``.
    """
    products = []
    for i, G in efg.items():
        G = np.asarray(G, dtype=float)
        p = system.particles[i]
        if G.shape != (3, 3) or not np.allclose(G, G.T):
            raise ValueError(f"EFG tensor for particle {i} must be a symmetric 3x3 matrix")
        if p.spin <= 0.5:
            raise ValueError(f"particle {p.label!r} has spin 1/2 and no quadrupole moment")
        if p.quadrupole is None:
            raise ValueError(f"particle {p.label!r} has no quadrupole parameters")
        Q, anti = p.quadrupole
        S = p.spin
        k = sc.e * Q * BARN * (1 + anti) / (2 * S * (2 * S - 1)) / HBAR * PER_US
        products.extend(_bilinear(system, i, i, k * G / ANGSTROM**2))
    return accumulate(products, system.n_qubits)


def zeeman_hamiltonian(system: SpinSystem, field) -> PauliSum:
    """``sum_i gamma_i S_i . B`` for a static field ``B`` (Tesla)."""
    B = np.asarray(field, dtype=float).reshape(3)
    products = []
    for i, p in enumerate(system.particles):
        g = p.gyromagnetic_ratio * PER_US
        for a, terms in enumerate(_spin_terms(system, i)):
            if B[a] == 0.0:
                continue
            products.extend((g * B[a] * c, ps) for c, ps in terms)
    return accumulate(products, system.n_qubits)


def system_hamiltonian(system: SpinSystem, field=None, efg=None,
                       nuclear_nuclear: bool = True) -> PauliSum:
    H = dipolar_hamiltonian(system, nuclear_nuclear=nuclear_nuclear)
    if field is not None:
        H = H + zeeman_hamiltonian(system, field)
    if efg:
        H = H + quadrupole_hamiltonian(system, efg)
    return H
