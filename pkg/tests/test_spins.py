from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from muqsim.spins import (GAMMA_MUON, Particle, dicke_basis_state, dicke_isometry, fluorine,
                          layout_system, muon, spin_matrices, spin_operator)
from conftest import PAULI, embed

half_spins = st.integers(1, 5).map(lambda k: k / 2)


def spin_op_dense(spin, axis, n_qubits, offset=0):
    layout = layout_system([Particle("p", spin, 1.0)])
    op = spin_operator(0, axis, layout)
    M = np.zeros((2**n_qubits,) * 2, dtype=complex)
    for c, p, q in op.expansion:
        M += c * embed(PAULI[p], q + offset, n_qubits)
    return M


def test_layout_examples():
    F = lambda: fluorine((1, 0, 0))
    assert layout_system([muon(), F(), F()]).total_qubits == 3
    big = [Particle(f"X{k}", 1.5, 1.0) for k in range(6)] + [muon()]
    assert layout_system(big).total_qubits == 19
    assert layout_system([muon()]).total_qubits == 1


def test_layout_ranges_are_contiguous_and_cover():
    ps = [Particle("a", 1.5, 1.0), muon(), Particle("b", 1, 1.0)]
    lay = layout_system(ps)
    assert [list(r) for r in lay.ranges] == [[0, 1, 2], [3], [4, 5]]


@pytest.mark.parametrize("spin", [0, 0.3, 1.25, -0.5])
def test_rejects_bad_spin(spin):
    with pytest.raises(ValueError):
        Particle("bad", spin, 1.0)


def test_layout_needs_a_particle():
    with pytest.raises(ValueError):
        layout_system([])


def test_quadrupole_only_above_half():
    with pytest.raises(ValueError):
        Particle("mu", 0.5, GAMMA_MUON, quadrupole=(0.1, 0.0))


def test_spin_operator_examples():
    lay = layout_system([muon(), Particle("d", 1, 1.0), Particle("n", 1.5, 1.0)])
    assert spin_operator(0, "x", lay).expansion == ((0.5, "X", 0),)
    assert spin_operator(1, "z", lay).expansion == ((0.5, "Z", 1), (0.5, "Z", 2))
    assert spin_operator(2, "x", lay).expansion == ((0.5, "X", 3), (0.5, "X", 4), (0.5, "X", 5))
    with pytest.raises(IndexError):
        spin_operator(3, "x", lay)
    with pytest.raises(ValueError):
        spin_operator(0, "w", lay)


def test_dicke_examples():
    a = 1 / np.sqrt(3)
    assert dicke_basis_state(1.5, -0.5) == pytest.approx({0b011: a, 0b101: a, 0b110: a})
    assert dicke_basis_state(0.5, 0.5) == {0: 1.0}
    assert dicke_basis_state(2, 2) == {0: 1.0}
    with pytest.raises(ValueError):
        dicke_basis_state(1, 2)


@given(half_spins, st.data())
def test_dicke_state_norm_and_weight(spin, data):
    n = int(2 * spin)
    h = data.draw(st.integers(0, n))
    amps = dicke_basis_state(spin, spin - h)
    assert sum(a * a for a in amps.values()) == pytest.approx(1.0)
    assert all(b.bit_count() == h for b in amps)
    assert len(amps) == comb(n, h)


@pytest.mark.parametrize("spin", [0.5, 1, 1.5, 2, 2.5])
def test_qubit_operators_restrict_to_spin_matrices(spin):
    # oracle: textbook ladder-operator matrices built here, not in the package
    n = int(2 * spin)
    m = np.arange(spin, -spin - 1, -1)
    Sp = np.diag(np.sqrt(spin * (spin + 1) - m[1:] * (m[1:] + 1)), 1)
    ref = {"x": (Sp + Sp.T) / 2, "y": (Sp - Sp.T) / 2j, "z": np.diag(m)}
    V = dicke_isometry(spin)
    for axis in "xyz":
        S = spin_op_dense(spin, axis, n)
        assert np.allclose(V.T @ S @ V, ref[axis], atol=1e-12)
        # the symmetric subspace is invariant
        P = V @ V.T
        assert np.allclose(P @ S @ P, S @ P, atol=1e-12)
        assert np.allclose(spin_matrices(spin)[axis], ref[axis], atol=1e-12)


@pytest.mark.parametrize("spin", [0.5, 1, 1.5, 2, 2.5])
def test_su2_commutation_on_dicke_subspace(spin):
    n = int(2 * spin)
    V = dicke_isometry(spin)
    Sx, Sy, Sz = (V.T @ spin_op_dense(spin, a, n) @ V for a in "xyz")
    assert np.allclose(Sx @ Sy - Sy @ Sx, 1j * Sz, atol=1e-12)
    assert np.allclose(Sy @ Sz - Sz @ Sy, 1j * Sx, atol=1e-12)
    casimir = Sx @ Sx + Sy @ Sy + Sz @ Sz
    assert np.allclose(casimir, spin * (spin + 1) * np.eye(n + 1), atol=1e-12)


def test_isometry_columns_orthonormal():
    for s in (0.5, 1, 1.5, 2, 2.5, 3):
        V = dicke_isometry(s)
        assert np.allclose(V.T @ V, np.eye(V.shape[1]))
