"""Noisy density-matrix runs and exponential noise extrapolation.

Noise model: after every gate of the merged circuit, a depolarizing channel
of strength ``p`` acts on each qubit the gate touched.  Boosting the noise by
``lam`` and combining both runs as

    P0 = (P_p^lam / P_{lam p})^(1 / (lam - 1))

removes a decay of the form ``P0 exp(-c p)`` exactly.
"""

from __future__ import annotations

import numpy as np

from .evolution import EvolutionPlan, trotter_circuit
from .kernel.noise import apply_depolarizing
from .kernel.prep import mixed_initial_density
from .kernel.state import MAX_DENSITY_QUBITS, QuantumState, ResourceLimitError, apply_gate, expectation_z
from .pauli import PauliSum
from .polarisation import PolarisationSeries, _check_times, _layout_of, rotate_to_z
from .resources import merge_single_qubit_gates
from .spins import SpinSystem


class ExtrapolationError(ValueError):
    """The two noise levels disagree in sign or one of them is zero."""


def extrapolate_exponential(P_low: float, P_boosted: float, lam: float) -> float:
    """Zero-noise estimate from runs at noise ``p`` and ``lam * p``.

    Applied to magnitudes with the common sign restored.
    """
    if not lam > 1:
        raise ValueError(f"boost factor must exceed 1, got {lam}")
    if P_low == 0 or P_boosted == 0 or np.sign(P_low) != np.sign(P_boosted):
        raise ExtrapolationError(f"cannot extrapolate from {P_low} and {P_boosted}")
    a, b = abs(P_low), abs(P_boosted)
    # log form avoids under/overflow of a**lam for large lam
    mag = np.exp((lam * np.log(a) - np.log(b)) / (lam - 1))
    return float(np.sign(P_low) * mag)


def extrapolate_series(low: PolarisationSeries, boosted: PolarisationSeries, lam: float) -> PolarisationSeries:
    """Pointwise extrapolation; flagged points are dropped and listed in ``meta``."""
    if not np.array_equal(low.times, boosted.times):
        raise ValueError("series must share a time grid")
    keep, vals, dropped = [], [], []
    for k, (a, b) in enumerate(zip(low.values, boosted.values)):
        try:
            vals.append(extrapolate_exponential(a, b, lam))
            keep.append(k)
        except ExtrapolationError:
            dropped.append(float(low.times[k]))
    meta = dict(low.meta, method="extrapolated", lam=lam, dropped_times=dropped)
    t = low.times[keep]
    return PolarisationSeries(t, np.array(vals), np.zeros_like(t), meta)


def run_noisy(state: QuantumState, gates, p: float) -> QuantumState:
    """Apply ``gates`` in density mode with depolarizing noise after each one."""
    if state.mode != "density":
        raise ValueError("noisy runs need a density-matrix state")
    for g in gates:
        apply_gate(state, g)
        if p > 0:
            apply_depolarizing(state, p, g.qubits)
    return state


def polarisation_noisy(H: PauliSum, times, plan: EvolutionPlan, p: float,
                       system: SpinSystem | None = None, axis: str = "z") -> PolarisationSeries:
    """Muon polarisation of the noisy Trotter circuit acting on ``|0><0| (x) I/D_e``."""
    t = _check_times(times)
    if plan.stochastic:
        raise ValueError("noisy runs use deterministic Trotter plans")
    if H.n_qubits > MAX_DENSITY_QUBITS:
        raise ResourceLimitError(f"density-matrix runs limited to {MAX_DENSITY_QUBITS} qubits")
    if not 0 <= p <= 0.75:
        raise ValueError("depolarizing probability must lie in [0, 3/4]")
    layout, mu = _layout_of(H, system)
    Hr = rotate_to_z(H, axis)
    rho0 = mixed_initial_density(layout, mu)
    q = layout.qubits(mu)[0]
    vals = np.empty(t.size)
    for k, tk in enumerate(t):
        state = rho0.copy()
        if tk > 0:
            gates = merge_single_qubit_gates(trotter_circuit(Hr, plan.at(tk)))
            run_noisy(state, gates, p)
        vals[k] = expectation_z(state, q)
    meta = {"method": "noisy-density", "axis": axis, "p": p, "steps": plan.steps,
            "evolution": plan.method}
    return PolarisationSeries(t, vals, np.zeros_like(t), meta)


def mitigated_polarisation(H: PauliSum, times, plan: EvolutionPlan, p: float, lam: float,
                           system: SpinSystem | None = None, axis: str = "z"):
    """``(low, boosted, extrapolated)`` series."""
    low = polarisation_noisy(H, times, plan, p, system, axis)
    high = polarisation_noisy(H, times, plan, lam * p, system, axis)
    return low, high, extrapolate_series(low, high, lam)


__all__ = [
    "ExtrapolationError", "extrapolate_exponential", "extrapolate_series", "mitigated_polarisation",
    "polarisation_noisy", "run_noisy",
]
