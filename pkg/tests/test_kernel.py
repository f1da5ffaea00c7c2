from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from muqsim.kernel.dicke import dicke_prep_circuit, dicke_superposition_circuit, dicke_unitary_circuit
from muqsim.kernel.gates import (CCRy, CNOT, CRy, Gate, H, Rx, Ry, Rz, X, circuit_unitary, rotation)
from muqsim.kernel.noise import NoiseChannel, apply_channel, apply_dephasing, apply_depolarizing
from muqsim.kernel.prep import (basis_sample_circuit, basis_sample_vector, mixed_initial_density,
                                prepare_dephasing_state, prepare_rpa_state, rpa_circuit, rpa_vector)
from muqsim.kernel.rng import task_rng
from muqsim.kernel.state import (QuantumState, ResourceLimitError, apply_circuit,
                                 apply_matrix, apply_pauli_rotation, expectation_z, preflight, sample_z,
                                 z_signs)
from muqsim.pauli import PauliString
from muqsim.spins import Particle, layout_system, muon
from conftest import PAULI, embed, kron_all


def random_state(n, rng):
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return v / np.linalg.norm(v)


# --- gates -------------------------------------------------------------------

@pytest.mark.parametrize("g", [H(0), X(0), Rx(0, 0.3), Ry(0, -1.1), Rz(0, 2.0), CNOT(0, 1),
                               CRy(1, 0, 0.7), CCRy(0, 2, 1, 0.4), Gate("T", (0,))])
def test_gates_unitary_and_inverse(g):
    U = g.matrix()
    assert np.allclose(U.conj().T @ U, np.eye(U.shape[0]))
    assert np.allclose(g.inverse().matrix() @ U, np.eye(U.shape[0]))


def test_rotation_is_exponential():
    for a in "XYZ":
        assert np.allclose(rotation(a, 0.9), expm(-0.45j * PAULI[a]))


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate("CNOT", (1, 1))
    with pytest.raises(ValueError):
        Gate("Rx", (0,))
    with pytest.raises(ValueError):
        Gate("SWAP", (0, 1))


def test_controlled_gate_ordering():
    # CNOT with control 2 and target 0 on three qubits
    U = circuit_unitary([CNOT(2, 0)], 3)
    ref = embed(np.diag([1, 0]), 2, 3) + embed(np.diag([0, 1]), 2, 3) @ embed(PAULI["X"], 0, 3)
    assert np.allclose(U, ref)


@given(st.integers(0, 3), st.integers(0, 2**31 - 1))
def test_apply_matrix_matches_kron(q, seed):
    rng = np.random.default_rng(seed)
    psi = random_state(4, rng)
    U = rotation("Y", rng.uniform(0, 6)) @ rotation("Z", rng.uniform(0, 6))
    assert np.allclose(apply_matrix(psi, U, (q,), 4), embed(U, q, 4) @ psi)


@settings(max_examples=40)
@given(st.text(alphabet="IXYZ", min_size=4, max_size=4), st.floats(-7, 7), st.integers(0, 2**31 - 1))
def test_pauli_rotation_matches_expm(label, theta, seed):
    rng = np.random.default_rng(seed)
    psi = np.stack([random_state(4, rng) for _ in range(3)], axis=1)
    P = kron_all([PAULI[c] for c in label])
    ref = expm(-0.5j * theta * P) @ psi
    out = apply_pauli_rotation(psi.copy(), PauliString.from_label(label), theta, 4)
    if label == "IIII":
        ref = psi  # identity rotations are dropped as a global phase
    assert np.allclose(out, ref)


def test_density_gate_matches_pure():
    rng = np.random.default_rng(1)
    psi = random_state(3, rng)
    gates = [H(0), CNOT(0, 2), Ry(1, 0.3), CRy(2, 1, 1.2)]
    pure = apply_circuit(QuantumState.from_vector(psi), gates)
    dens = apply_circuit(QuantumState.from_vector(psi).to_density(), gates)
    assert np.allclose(dens.data, np.outer(pure.data, pure.data.conj()))
    dens.check()


def test_expectation_and_sampling():
    s = QuantumState.from_vector(np.array([np.cos(0.3), np.sin(0.3)]))
    assert expectation_z(s, 0) == pytest.approx(np.cos(0.6))
    mean, err = sample_z(s, 0, 100_000, np.random.default_rng(0))
    assert abs(mean - np.cos(0.6)) < 5 * err
    assert list(z_signs(2, 0)) == [1, 1, -1, -1]


def test_preflight_limits():
    preflight(11, "density")
    with pytest.raises(ResourceLimitError):
        preflight(12, "density")
    with pytest.raises(ResourceLimitError):
        preflight(27, "pure")  # 2 GiB needs the opt-in
    preflight(26, "pure")
    with pytest.raises(ResourceLimitError):
        QuantumState.zero(30, allow_large=True)


# --- noise -------------------------------------------------------------------

def kraus_depolarize(rho, p, q, n):
    ops = [np.sqrt(1 - p) * PAULI["I"]] + [np.sqrt(p / 3) * PAULI[a] for a in "XYZ"]
    return sum(embed(K, q, n) @ rho @ embed(K, q, n).conj().T for K in ops)


@pytest.mark.parametrize("p", [0.0, 1e-3, 0.2, 0.75])
def test_depolarizing_matches_kraus(p):
    rng = np.random.default_rng(3)
    psi = random_state(3, rng)
    rho = np.outer(psi, psi.conj())
    s = apply_depolarizing(QuantumState.from_density(rho), p, (0, 2))
    ref = kraus_depolarize(kraus_depolarize(rho, p, 0, 3), p, 2, 3)
    assert np.allclose(s.data, ref)
    s.check()


def test_depolarizing_trajectories_average_to_channel():
    rng = np.random.default_rng(5)
    psi = random_state(2, rng)
    p = 0.3
    acc = np.zeros((4, 4), dtype=complex)
    M = 20_000
    for _ in range(M):
        s = apply_depolarizing(QuantumState.from_vector(psi), p, (1,), rng)
        acc += np.outer(s.data, s.data.conj())
    ref = kraus_depolarize(np.outer(psi, psi.conj()), p, 1, 2)
    assert np.abs(acc / M - ref).max() < 0.02


def test_dephasing_density_and_trajectory():
    psi = np.ones(4) / 2
    s = apply_dephasing(QuantumState.from_vector(psi).to_density(), (0,))
    rho = s.data
    assert rho[0, 2] == 0 and rho[1, 3] == 0 and rho[0, 1] == pytest.approx(0.25)
    rng = np.random.default_rng(0)
    avg = np.mean([np.outer(t.data, t.data.conj()) for t in
                   (apply_dephasing(QuantumState.from_vector(psi), (0,), rng) for _ in range(4000))], axis=0)
    assert np.abs(avg - rho).max() < 0.03


def test_noise_channel_validation():
    with pytest.raises(ValueError):
        NoiseChannel("amplitude", (0,))
    with pytest.raises(ValueError):
        NoiseChannel("depolarizing", (0,), 1.5)
    with pytest.raises(ValueError):
        apply_depolarizing(QuantumState.zero(1), 0.1, (0,))  # pure mode needs an rng
    s = apply_channel(QuantumState.zero(1, "density"), NoiseChannel("depolarizing", (0,), 0.75))
    assert np.allclose(s.data, np.eye(2) / 2)


# --- Dicke circuits ----------------------------------------------------------

def dicke_vector(n, h):
    v = np.zeros(2**n)
    for b in range(2**n):
        if bin(b).count("1") == h:
            v[b] = 1 / np.sqrt(comb(n, h))
    return v


@pytest.mark.parametrize("n", range(1, 7))
def test_dicke_prep_all_weights(n):
    for h in range(n + 1):
        psi = apply_circuit(QuantumState.zero(n), dicke_prep_circuit(n, h)).data
        assert np.allclose(psi, dicke_vector(n, h), atol=1e-10)


def test_dicke_unitary_maps_every_input_weight():
    n, k = 5, 3
    U = circuit_unitary(dicke_unitary_circuit(n, k), n)
    for h in range(k + 1):
        e = np.zeros(2**n)
        e[(1 << h) - 1] = 1  # |0..01..1> with h ones at the end
        assert np.allclose(U @ e, dicke_vector(n, h), atol=1e-10)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_dicke_superposition(n):
    psi = apply_circuit(QuantumState.zero(n), dicke_superposition_circuit(n)).data
    ref = sum(dicke_vector(n, h) for h in range(n + 1)) / np.sqrt(n + 1)
    assert np.allclose(psi, ref, atol=1e-10)


# --- state preparation -------------------------------------------------------

def mixed_layout():
    return layout_system([muon(), Particle("a", 1.5, 1.0), Particle("b", 0.5, 1.0)])


def test_rpa_circuit_matches_qubit_phase_model():
    lay = mixed_layout()
    vec = rpa_vector(lay, task_rng(4, 0, 0, 0), phases="qubit")
    rng = task_rng(4, 0, 0, 0)
    thetas = [rng.uniform(0, 2 * np.pi) for _ in range(2)]
    psi = apply_circuit(QuantumState.zero(lay.total_qubits), rpa_circuit(lay, thetas)).data
    overlap = abs(np.vdot(vec, psi))
    assert overlap == pytest.approx(1.0, abs=1e-10)  # equal up to a global phase


@pytest.mark.parametrize("phases", ["qubit", "basis"])
def test_rpa_vector_properties(phases):
    lay = mixed_layout()
    psi = rpa_vector(lay, np.random.default_rng(0), phases=phases)
    assert np.linalg.norm(psi) == pytest.approx(1)
    s = QuantumState.from_vector(psi)
    assert expectation_z(s, 0) == pytest.approx(1.0)
    # environment populations uniform over the 4 x 2 physical basis states
    V = kron_all([np.eye(2), _iso(1.5), np.eye(2)])
    pops = np.abs(V.T @ psi) ** 2
    assert np.allclose(pops[pops > 1e-12], 1 / 8)


def _iso(s):
    from muqsim.spins import dicke_isometry
    return dicke_isometry(s)


def test_rpa_average_reproduces_mixed_state():
    lay = layout_system([muon(), Particle("a", 0.5, 1.0), Particle("b", 0.5, 1.0)])
    rho = mixed_initial_density(lay).data
    rng = np.random.default_rng(2)
    avg = np.mean([np.outer(v, v.conj()) for v in (rpa_vector(lay, rng, phases="basis") for _ in range(4000))],
                  axis=0)
    assert np.abs(avg - rho).max() < 0.02
    assert np.trace(rho).real == pytest.approx(1)


def test_dephasing_state_signs():
    lay = layout_system([muon(), Particle("a", 0.5, 1.0), Particle("b", 0.5, 1.0)])
    psi = prepare_dephasing_state(lay, np.random.default_rng(0)).data
    assert np.allclose(np.abs(psi[:4]), 0.5) and np.allclose(psi[4:], 0)
    assert np.allclose(psi.imag, 0, atol=1e-12)


def test_basis_sample_circuit_matches_vector():
    lay = mixed_layout()
    psi = apply_circuit(QuantumState.zero(lay.total_qubits), basis_sample_circuit(lay, [2, 1])).data
    # weight 2 on the spin-3/2 register is m = -1/2; weight 1 on the spin-1/2 is m = -1/2
    assert np.allclose(np.abs(psi[np.abs(psi) > 1e-9]), 1 / np.sqrt(3))
    v = basis_sample_vector(lay, np.random.default_rng(0))
    assert np.linalg.norm(v) == pytest.approx(1)


def test_randomisation_layers_keep_muon_and_norm():
    lay = layout_system([muon()] + [Particle(f"f{k}", 0.5, 1.0) for k in range(3)])
    s = prepare_rpa_state(lay, np.random.default_rng(1), layers=2)
    s.check()
    assert expectation_z(s, 0) == pytest.approx(1)
    with pytest.raises(ValueError):
        prepare_rpa_state(mixed_layout(), np.random.default_rng(1), layers=1)


def test_task_rng_is_counter_based():
    a = task_rng(3, 1, 2, 0).random(4)
    b = task_rng(3, 1, 2, 0).random(4)
    c = task_rng(3, 2, 1, 0).random(4)
    assert np.array_equal(a, b) and not np.array_equal(a, c)
    with pytest.raises(ValueError):
        task_rng(None)
