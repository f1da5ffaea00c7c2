"""Deterministic Dicke-state preparation circuits.

``dicke_prep_circuit(n, h)`` maps ``|0...0 1...1>`` (``h`` trailing ones) to
the Dicke state ``|D^n_h>``.  Qubits are local register indices ``0..n-1``;
use :func:`relabel` to place a circuit on a larger register.
"""

from __future__ import annotations

from math import acos, sqrt

from .gates import CCRy, CNOT, CRy, Gate, Ry, X


def _block2(top: int, bottom: int, l: int) -> list[Gate]:
    theta = 2 * acos(sqrt(1 / l))
    return [CNOT(top, bottom), CRy(bottom, top, theta), CNOT(top, bottom)]


def _block3(top: int, mid: int, bottom: int, alpha: int, l: int) -> list[Gate]:
    theta = 2 * acos(sqrt(alpha / l))
    return [CNOT(top, bottom), CCRy(bottom, mid, top, theta), CNOT(top, bottom)]


def split_and_cycle(n: int, l: int, k: int) -> list[Gate]:
    """The ``V_{l,k}`` block acting on the last ``k+1`` of the first ``l`` qubits."""
    # local qubit l-1 (0-based) is the register's l-th qubit
    bottom = l - 1
    gates = _block2(bottom - 1, bottom, l)
    for alpha in range(2, k + 1):
        gates += _block3(bottom - alpha, bottom - alpha + 1, bottom, alpha, l)
    return gates


def dicke_unitary_circuit(n: int, k: int) -> list[Gate]:
    """``U_{n,k}``: maps ``|0^{n-j} 1^j>`` to ``|D^n_j>`` for every ``j <= k``."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    gates: list[Gate] = []
    for l in range(n, k, -1):
        gates += split_and_cycle(n, l, k)
    for l in range(k, 1, -1):
        gates += split_and_cycle(n, l, l - 1)
    return gates


def dicke_prep_circuit(n: int, h: int, include_input: bool = True) -> list[Gate]:
    """Gates taking ``|0^n>`` to ``|D^n_h>``.

    With ``include_input`` the X gates creating ``|0^{n-h} 1^h>`` are prepended.
    """
    if not 0 <= h <= n:
        raise ValueError(f"need 0 <= h <= n, got n={n}, h={h}")
    gates = [X(q) for q in range(n - h, n)] if include_input else []
    if h == 0 or h == n:
        return gates
    return gates + dicke_unitary_circuit(n, h)


def dicke_superposition_circuit(n: int) -> list[Gate]:
    """Gates taking ``|0^n>`` to ``(n+1)^{-1/2} sum_h |D^n_h>``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    # ladder producing sum_k |0^{n-k} 1^k> / sqrt(n+1)
    gates = [Ry(n - 1, 2 * acos(sqrt(1 / (n + 1))))]
    for j in range(2, n + 1):
        q = n - j
        gates.append(CRy(q + 1, q, 2 * acos(sqrt(1 / (n + 2 - j)))))
    return gates + dicke_unitary_circuit(n, n)


def relabel(gates, mapping) -> list[Gate]:
    """Move a circuit onto other qubits; ``mapping[local] = global``."""
    return [Gate(g.kind, tuple(mapping[q] for q in g.qubits), g.theta, g.matrix_) for g in gates]
