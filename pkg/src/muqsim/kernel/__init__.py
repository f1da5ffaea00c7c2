"""Statevector / density-matrix kernel."""

from .dicke import dicke_prep_circuit, dicke_superposition_circuit
from .gates import Gate
from .noise import NoiseChannel, apply_dephasing, apply_depolarizing
from .prep import (
    mixed_initial_density,
    prepare_basis_sample_state,
    prepare_dephasing_state,
    prepare_rpa_state,
)
from .rng import task_rng
from .state import (
    QuantumState,
    ResourceLimitError,
    apply_circuit,
    apply_gate,
    apply_pauli_rotation,
    expectation_z,
    sample_z,
)

__all__ = [
    "Gate", "NoiseChannel", "QuantumState", "ResourceLimitError",
    "apply_circuit", "apply_dephasing", "apply_depolarizing", "apply_gate",
    "apply_pauli_rotation", "dicke_prep_circuit", "dicke_superposition_circuit",
    "expectation_z", "mixed_initial_density", "prepare_basis_sample_state",
    "prepare_dephasing_state", "prepare_rpa_state", "sample_z", "task_rng",
]
