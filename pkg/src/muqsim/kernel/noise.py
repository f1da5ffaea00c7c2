"""Noise channels: single-qubit depolarizing and uniform Z dephasing."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gates import PAULI_MATRICES
from .state import QuantumState, apply_matrix


@dataclass(frozen=True)
class NoiseChannel:
    kind: str  # "depolarizing" or "dephasing"
    qubits: tuple[int, ...]
    p: float = 0.0

    def __post_init__(self):
        if self.kind not in ("depolarizing", "dephasing"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"probability must lie in [0, 1], got {self.p}")


def _depolarize_density(rho: np.ndarray, p: float, q: int, n: int) -> np.ndarray:
    # sum over {I,X,Y,Z} of P rho P equals 2 * (I_q x Tr_q rho), hence
    # rho' = (1 - 4p/3) rho + (2p/3) I_q x Tr_q rho
    t = rho.reshape((2,) * (2 * n))
    red = np.trace(t, axis1=q, axis2=n + q)
    mixed = np.zeros_like(t)
    idx = [slice(None)] * (2 * n)
    for b in (0, 1):
        idx[q] = idx[n + q] = b
        mixed[tuple(idx)] = red
    return ((1 - 4 * p / 3) * t + (2 * p / 3) * mixed).reshape(rho.shape)


def apply_depolarizing(state: QuantumState, p: float, qubits, rng: np.random.Generator | None = None):
    """Depolarize each qubit in ``qubits`` independently with probability ``p``.

    Density mode applies the exact channel.  Pure mode draws one trajectory:
    X, Y or Z with probability ``p/3`` each; ``rng`` is then required.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    if p == 0.0:
        return state
    n = state.n_qubits
    if state.mode == "density":
        for q in qubits:
            state.data = _depolarize_density(state.data, p, q, n)
        return state
    if rng is None:
        raise ValueError("pure-mode depolarizing needs an rng for trajectory sampling")
    for q in qubits:
        u = rng.random()
        if u < p:
            P = PAULI_MATRICES["XYZ"[min(int(3 * u / p), 2)]]
            state.data = apply_matrix(state.data, P, (q,), n)
    return state


def apply_dephasing(state: QuantumState, qubits, rng: np.random.Generator | None = None):
    """Uniform dephasing: a random Z-string on ``qubits`` with equal probability.

    Density mode averages over all strings, which removes every coherence
    between computational states differing on ``qubits``.
    """
    n = state.n_qubits
    Z = PAULI_MATRICES["Z"]
    if state.mode == "density":
        state.data = np.ascontiguousarray(state.data)
        for q in qubits:
            t = state.data.reshape((2,) * (2 * n))
            idx = [slice(None)] * (2 * n)
            for a, b in ((0, 1), (1, 0)):
                idx[q], idx[n + q] = a, b
                t[tuple(idx)] = 0.0
        return state
    if rng is None:
        raise ValueError("pure-mode dephasing needs an rng")
    for q in qubits:
        if rng.random() < 0.5:
            state.data = apply_matrix(state.data, Z, (q,), n)
    return state


def apply_channel(state: QuantumState, channel: NoiseChannel, rng=None):
    if channel.kind == "depolarizing":
        return apply_depolarizing(state, channel.p, channel.qubits, rng)
    return apply_dephasing(state, channel.qubits, rng)
