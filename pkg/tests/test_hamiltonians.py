import numpy as np
import pytest
import scipy.constants as sc
from scipy.linalg import expm

from muqsim.geometry import caf2_geometry
from muqsim.hamiltonians import (dipolar_coupling, dipolar_hamiltonian, quadrupole_hamiltonian,
                                 system_hamiltonian, zeeman_hamiltonian)
from muqsim.spins import GAMMA_FLUORINE, GAMMA_MUON, Particle, SpinSystem, dicke_isometry, muon
from conftest import kron_all

# values used for the CaF2 cluster, rad s^-1 T^-1
GM = 2 * np.pi * 1.355e8
GF = 2 * np.pi * 4.006e7


def ladder(s):
    m = np.arange(s, -s - 1, -1)
    Sp = np.diag(np.sqrt(s * (s + 1) - m[1:] * (m[1:] + 1)), 1)
    return [(Sp + Sp.T) / 2, (Sp - Sp.T) / 2j, np.diag(m).astype(complex)]


def spin_space_ops(spins):
    """Oracle ``S_i^a`` in the product of (2s+1)-dimensional spaces."""
    dims = [int(2 * s + 1) for s in spins]
    out = []
    for i, s in enumerate(spins):
        mats = ladder(s)
        out.append([kron_all([mats[a] if k == i else np.eye(d) for k, d in enumerate(dims)])
                    for a in range(3)])
    return out


def dipolar_oracle(system):
    spins = [p.spin for p in system.particles]
    S = spin_space_ops(spins)
    H = 0
    P = system.positions
    for i in range(len(spins)):
        for j in range(i + 1, len(spins)):
            r = (P[j] - P[i]) * 1e-10
            d = np.linalg.norm(r)
            n = r / d
            g = system.particles[i].gyromagnetic_ratio * system.particles[j].gyromagnetic_ratio
            w = sc.mu_0 * sc.hbar * g / (4 * np.pi * d**3) * 1e-6
            for a in range(3):
                for b in range(3):
                    H = H + w * ((a == b) - 3 * n[a] * n[b]) * S[i][a] @ S[j][b]
    return H


def test_gyromagnetic_ratios():
    assert GAMMA_MUON == GM and GAMMA_FLUORINE == GF
    # within rounding of the reference values 135.5388 and 40.0775 MHz/T
    assert GAMMA_MUON == pytest.approx(2 * np.pi * 135.5388e6, rel=1e-3)
    assert GAMMA_FLUORINE == pytest.approx(2 * np.pi * 40.0775e6, rel=1e-3)


def test_nn_coupling_value():
    s = caf2_geometry(1)
    assert np.linalg.norm(s.positions[1]) == pytest.approx(1.36)
    assert dipolar_coupling(s, 0, 1) == pytest.approx(0.898, abs=5e-4)


def test_dipolar_matches_spin_oracle_spin_half(fmuf):
    s, H = fmuf
    assert np.allclose(H.to_dense(), dipolar_oracle(s), atol=1e-12)


def test_dipolar_matches_oracle_with_spin_three_halves():
    ps = (muon(), Particle("Na", 1.5, 7.08e7, (1.1, 0.3, -1.4)), Particle("F", 0.5, GF, (0, 0, 1.36)))
    s = SpinSystem(ps)
    H = dipolar_hamiltonian(s).to_dense()
    V = kron_all([dicke_isometry(p.spin) for p in ps])
    assert np.allclose(V.T @ H @ V, dipolar_oracle(s), atol=1e-12)


def test_dipolar_without_nuclear_pairs(fmuf):
    s, H = fmuf
    Hmu = dipolar_hamiltonian(s, nuclear_nuclear=False)
    assert len(Hmu.terms) < len(H.terms)
    assert all(ps.ops[0][0] == 0 for ps, _ in Hmu.terms)


def test_eleven_qubit_term_count(caf2_11):
    assert len(caf2_11[1].terms) == 245


def test_zeeman_matches_oracle():
    ps = (muon(), Particle("N", 1, 1.93e7, (1, 0, 0)))
    s = SpinSystem(ps)
    B = np.array([0.01, -0.02, 0.03])
    H = zeeman_hamiltonian(s, B).to_dense()
    V = kron_all([dicke_isometry(p.spin) for p in ps])
    S = spin_space_ops([0.5, 1])
    ref = sum(p.gyromagnetic_ratio * 1e-6 * B[a] * S[i][a] for i, p in enumerate(ps) for a in range(3))
    assert np.allclose(V.T @ H @ V, ref, atol=1e-12)


def test_muon_precession_in_field():
    # Larmor oracle: P_x(t) = cos(gamma B t) for a transverse field
    s = SpinSystem((muon(),))
    H = zeeman_hamiltonian(s, (0, 0, 0.01)).to_dense()
    t = 0.7
    U = expm(-1j * H * t)
    plus = np.array([1, 1]) / np.sqrt(2)
    psi = U @ plus
    X = np.array([[0, 1], [1, 0]])
    assert np.real(psi.conj() @ X @ psi) == pytest.approx(np.cos(GM * 1e-6 * 0.01 * t), abs=1e-12)


def test_quadrupole_matches_oracle():
    Q, anti = 0.104, 0.3
    ps = (muon(), Particle("Na", 1.5, 7.08e7, (1.5, 0, 0), quadrupole=(Q, anti)))
    s = SpinSystem(ps)
    G = np.array([[0.5, 0.1, 0.0], [0.1, -0.2, 0.05], [0.0, 0.05, -0.3]])
    H = quadrupole_hamiltonian(s, {1: G}).to_dense()
    V = kron_all([dicke_isometry(p.spin) for p in ps])
    S = spin_space_ops([0.5, 1.5])[1]
    k = sc.e * Q * 1e-28 * (1 + anti) / (2 * 1.5 * 2.0) / sc.hbar * 1e20 * 1e-6
    ref = sum(k * G[a, b] * S[a] @ S[b] for a in range(3) for b in range(3))
    assert np.allclose(V.T @ H @ V, ref, atol=1e-10)


def test_quadrupole_errors():
    s = SpinSystem((muon(), Particle("N", 1, 1.9e7, (1, 0, 0))))
    G = np.eye(3)
    with pytest.raises(ValueError):
        quadrupole_hamiltonian(s, {1: G})  # no quadrupole parameters
    with pytest.raises(ValueError):
        quadrupole_hamiltonian(s, {0: G})  # spin 1/2
    s2 = SpinSystem((muon(), Particle("N", 1, 1.9e7, (1, 0, 0), quadrupole=(0.02, 0))))
    with pytest.raises(ValueError):
        quadrupole_hamiltonian(s2, {1: np.triu(np.ones((3, 3)))})


def test_system_hamiltonian_sums_parts():
    s = caf2_geometry(1)
    B = (0, 0, 0.005)
    total = system_hamiltonian(s, field=B).to_dense()
    assert np.allclose(total, dipolar_hamiltonian(s).to_dense() + zeeman_hamiltonian(s, B).to_dense())
