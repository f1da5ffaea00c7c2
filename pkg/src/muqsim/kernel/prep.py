"""Initial states for polarisation runs.

The muon starts in ``|0>`` (spin up along z).  The environment is put in one of

* ``rpa``: equal superposition of its product Dicke basis with random phases,
* ``dephasing``: the same with phases restricted to ``{0, pi}``,
* ``basis-sample``: a single random product basis state.

For RPA there are two phase models.  ``phases="qubit"`` is the circuit form,
one ``exp(-i theta S_z)`` per environment particle.  ``phases="basis"`` gives
every environment basis state its own independent phase.
"""

from __future__ import annotations

from functools import reduce

import numpy as np

from ..spins import QubitLayout, dicke_isometry
from .dicke import dicke_prep_circuit, dicke_superposition_circuit, relabel
from .gates import CRz, Gate, H, Rz
from .state import QuantumState


def _env_particles(layout: QubitLayout, muon_index: int) -> list[int]:
    return [i for i in range(len(layout)) if i != muon_index]


def _insert_muon(env_vec: np.ndarray, layout: QubitLayout, muon_index: int) -> np.ndarray:
    """Embed an environment vector with the muon qubit in ``|0>``."""
    n = layout.total_qubits
    q = layout.qubits(muon_index)[0]
    t = env_vec.reshape((2,) * (n - 1))
    full = np.stack([t, np.zeros_like(t)], axis=q)
    return full.reshape(-1)


def _kron_all(vectors) -> np.ndarray:
    return reduce(np.kron, vectors, np.ones(1, dtype=complex))


def _particle_spins(layout: QubitLayout, particles) -> list[float]:
    return [len(layout.qubits(i)) / 2 for i in particles]


def rpa_vector(layout: QubitLayout, rng: np.random.Generator, muon_index: int = 0,
               phases: str = "qubit", discrete: bool = False) -> np.ndarray:
    env = _env_particles(layout, muon_index)
    spins = _particle_spins(layout, env)
    if phases == "qubit":
        factors = []
        for s in spins:
            d = int(round(2 * s)) + 1
            theta = np.pi * rng.integers(0, 2) if discrete else rng.uniform(0, 2 * np.pi)
            m = s - np.arange(d)
            amps = np.exp(-1j * theta * m) / np.sqrt(d)
            factors.append(dicke_isometry(s) @ amps)
        env_vec = _kron_all(factors)
    elif phases == "basis":
        dims = [int(round(2 * s)) + 1 for s in spins]
        D = int(np.prod(dims))
        if discrete:
            ph = 1.0 - 2.0 * rng.integers(0, 2, size=D)
        else:
            ph = np.exp(1j * rng.uniform(0, 2 * np.pi, size=D))
        coeffs = ph / np.sqrt(D)
        if all(d == 2 for d in dims):
            env_vec = coeffs.astype(complex)
        else:
            V = reduce(np.kron, [dicke_isometry(s) for s in spins], np.ones((1, 1)))
            env_vec = V @ coeffs
    else:
        raise ValueError(f"phases must be 'qubit' or 'basis', got {phases!r}")
    return _insert_muon(env_vec, layout, muon_index)


def prepare_rpa_state(layout: QubitLayout, rng: np.random.Generator, muon_index: int = 0,
                      phases: str = "qubit", layers: int = 0) -> QuantumState:
    """Random-phase environment, muon in ``|0>``.

    ``layers`` adds rounds of random ``Rz`` and nearest-neighbour ``CRz`` gates
    over the environment qubits (spin-1/2 environments only).
    """
    psi = rpa_vector(layout, rng, muon_index, phases)
    state = QuantumState.from_vector(psi)
    if layers:
        from .state import apply_circuit

        apply_circuit(state, randomisation_layers(layout, rng, muon_index, layers))
    return state


def randomisation_layers(layout: QubitLayout, rng, muon_index: int, layers: int) -> list[Gate]:
    env = _env_particles(layout, muon_index)
    if any(len(layout.qubits(i)) != 1 for i in env):
        raise ValueError("extra randomisation layers would leave the symmetric subspace for spin > 1/2")
    qubits = [layout.qubits(i)[0] for i in env]
    gates: list[Gate] = []
    for _ in range(layers):
        gates += [Rz(q, rng.uniform(0, 2 * np.pi)) for q in qubits]
        gates += [CRz(a, b, rng.uniform(0, 2 * np.pi)) for a, b in zip(qubits, qubits[1:])]
    return gates


def prepare_dephasing_state(layout: QubitLayout, rng: np.random.Generator,
                            muon_index: int = 0) -> QuantumState:
    """Equal superposition with a random sign ``(-1)^{h}`` per environment particle."""
    return QuantumState.from_vector(rpa_vector(layout, rng, muon_index, "qubit", discrete=True))


def basis_sample_vector(layout: QubitLayout, rng: np.random.Generator, muon_index: int = 0) -> np.ndarray:
    env = _env_particles(layout, muon_index)
    factors = []
    for s in _particle_spins(layout, env):
        d = int(round(2 * s)) + 1
        factors.append(dicke_isometry(s)[:, rng.integers(0, d)].astype(complex))
    return _insert_muon(_kron_all(factors), layout, muon_index)


def prepare_basis_sample_state(layout: QubitLayout, rng: np.random.Generator,
                               muon_index: int = 0) -> QuantumState:
    return QuantumState.from_vector(basis_sample_vector(layout, rng, muon_index))


def mixed_initial_density(layout: QubitLayout, muon_index: int = 0) -> QuantumState:
    """``|0><0|_mu`` times the maximally mixed state of the physical environment."""
    env = _env_particles(layout, muon_index)
    spins = _particle_spins(layout, env)
    V = reduce(np.kron, [dicke_isometry(s) for s in spins], np.ones((1, 1)))
    rho_env = (V @ V.T) / V.shape[1]
    n = layout.total_qubits
    q = layout.qubits(muon_index)[0]
    # insert muon row/column axes
    t = rho_env.reshape((2,) * (2 * (n - 1))).astype(complex)
    t = np.stack([t, np.zeros_like(t)], axis=q)
    t = np.stack([t, np.zeros_like(t)], axis=n + q)
    return QuantumState.from_density(t.reshape(2**n, 2**n))


def rpa_circuit(layout: QubitLayout, thetas, muon_index: int = 0) -> list[Gate]:
    """Circuit form of the ``phases="qubit"`` RPA state: one angle per environment particle."""
    env = _env_particles(layout, muon_index)
    if len(thetas) != len(env):
        raise ValueError("need one angle per environment particle")
    gates: list[Gate] = []
    for i, theta in zip(env, thetas):
        qs = list(layout.qubits(i))
        if len(qs) == 1:
            gates.append(H(qs[0]))
        else:
            gates += relabel(dicke_superposition_circuit(len(qs)), qs)
        # exp(-i theta S_z) up to global phase
        gates += [Rz(q, theta) for q in qs]
    return gates


def basis_sample_circuit(layout: QubitLayout, heights, muon_index: int = 0) -> list[Gate]:
    """Dicke preparation of weight ``heights[k]`` on the k-th environment particle."""
    env = _env_particles(layout, muon_index)
    gates: list[Gate] = []
    for i, h in zip(env, heights):
        qs = list(layout.qubits(i))
        gates += relabel(dicke_prep_circuit(len(qs), h), qs)
    return gates
