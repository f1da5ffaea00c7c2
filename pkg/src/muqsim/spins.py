"""Spin-to-qubit mapping via symmetric (Dicke) registers.

A spin-``s`` particle is stored on ``2s`` qubits.  The projection ``m`` maps to
the equal superposition of all ``2s``-bit strings with Hamming weight
``h = s - m``, and the spin operators become

    S^a = 1/2 * sum_j P^a_j          (a in x, y, z;  P in X, Y, Z)

summed over the qubits ``j`` of the register.

Units used throughout the package: Angstrom, microseconds, Tesla and
angular frequencies in rad/us.  Gyromagnetic ratios are given in SI
(rad s^-1 T^-1) on :class:`Particle` and converted on use.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, sqrt
from typing import Sequence

import numpy as np

#: Muon gyromagnetic ratio, rad s^-1 T^-1.
GAMMA_MUON = 2 * np.pi * 1.355e8
#: 19F gyromagnetic ratio, rad s^-1 T^-1.
GAMMA_FLUORINE = 2 * np.pi * 4.006e7

MAX_SPIN = Fraction(9, 2)

AXES = ("x", "y", "z")
_AXIS_PAULI = {"x": "X", "y": "Y", "z": "Z"}


def _as_half_integer(spin) -> Fraction:
    s = Fraction(spin).limit_denominator(1000)
    if abs(float(s) - float(spin)) > 1e-12 or (2 * s).denominator != 1 or s <= 0:
        raise ValueError(f"spin must be a positive multiple of 1/2, got {spin!r}")
    if s > MAX_SPIN:
        raise ValueError(f"spin {s} exceeds the supported maximum {MAX_SPIN}")
    return s


@dataclass(frozen=True)
class Particle:
    """A spin carrying particle.

    ``quadrupole`` is ``(Q, anti_shielding)`` with ``Q`` in barn; it only
    makes sense for ``spin > 1/2``.
    """

    label: str
    spin: float
    gyromagnetic_ratio: float
    position: tuple[float, float, float] = (0.0, 0.0, 0.0)
    quadrupole: tuple[float, float] | None = None

    def __post_init__(self):
        s = _as_half_integer(self.spin)
        object.__setattr__(self, "spin", float(s))
        object.__setattr__(
            self, "position", tuple(float(v) for v in np.asarray(self.position, float).reshape(3))
        )
        if self.quadrupole is not None and s == Fraction(1, 2):
            raise ValueError(f"{self.label}: quadrupole parameters given for a spin-1/2 particle")

    @property
    def n_qubits(self) -> int:
        return int(round(2 * self.spin))


def muon(position=(0.0, 0.0, 0.0), label="mu") -> Particle:
    return Particle(label, 0.5, GAMMA_MUON, position)


def fluorine(position, label="F") -> Particle:
    return Particle(label, 0.5, GAMMA_FLUORINE, position)


@dataclass(frozen=True)
class QubitLayout:
    """Contiguous qubit ranges, one per particle, in input order."""

    ranges: tuple[range, ...]

    @property
    def total_qubits(self) -> int:
        return self.ranges[-1].stop if self.ranges else 0

    @property
    def spins(self) -> tuple[float, ...]:
        return tuple(len(r) / 2 for r in self.ranges)

    def __len__(self):
        return len(self.ranges)

    def qubits(self, particle_index: int) -> range:
        return self.ranges[particle_index]


def layout_system(particles: Sequence[Particle]) -> QubitLayout:
    """Assign ``2 s_i`` consecutive qubits to every particle."""
    if len(particles) == 0:
        raise ValueError("at least one particle is required")
    ranges = []
    start = 0
    for p in particles:
        n = int(round(2 * float(_as_half_integer(p.spin))))
        ranges.append(range(start, start + n))
        start += n
    return QubitLayout(tuple(ranges))


@dataclass(frozen=True)
class SpinSystem:
    """Particles plus their qubit layout.  ``muon_index`` names the probe spin."""

    particles: tuple[Particle, ...]
    muon_index: int = 0
    layout: QubitLayout = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "particles", tuple(self.particles))
        object.__setattr__(self, "layout", layout_system(self.particles))
        if not 0 <= self.muon_index < len(self.particles):
            raise ValueError("muon_index out of range")
        if self.particles[self.muon_index].spin != 0.5:
            raise ValueError("the probe particle must be spin-1/2")

    @property
    def n_qubits(self) -> int:
        return self.layout.total_qubits

    @property
    def muon_qubit(self) -> int:
        return self.layout.ranges[self.muon_index][0]

    @property
    def environment(self) -> list[int]:
        return [i for i in range(len(self.particles)) if i != self.muon_index]

    @property
    def positions(self) -> np.ndarray:
        return np.array([p.position for p in self.particles])

    def __len__(self):
        return len(self.particles)


@dataclass(frozen=True)
class SpinOperator:
    """``S^axis`` of one particle, expanded as ``sum coeff * P_q``."""

    axis: str
    particle: int
    expansion: tuple[tuple[float, str, int], ...]


def spin_operator(particle_index: int, axis: str, layout: QubitLayout) -> SpinOperator:
    if axis not in _AXIS_PAULI:
        raise ValueError(f"axis must be one of x, y, z; got {axis!r}")
    if not 0 <= particle_index < len(layout):
        raise IndexError(f"particle index {particle_index} out of range")
    p = _AXIS_PAULI[axis]
    expansion = tuple((0.5, p, q) for q in layout.qubits(particle_index))
    return SpinOperator(axis, particle_index, expansion)


def dicke_basis_state(spin, m) -> dict[int, float]:
    """Sparse amplitudes of the register state encoding projection ``m``.

    Keys are basis indices of the ``2s``-qubit register (first qubit is the
    most significant bit).
    """
    s = _as_half_integer(spin)
    mf = Fraction(m).limit_denominator(1000)
    h = s - mf
    if h.denominator != 1 or not 0 <= h <= 2 * s:
        raise ValueError(f"m={m} is not a valid projection for spin {s}")
    n, h = int(2 * s), int(h)
    amp = 1.0 / sqrt(comb(n, h))
    return {b: amp for b in range(2**n) if b.bit_count() == h}


def dicke_isometry(spin) -> np.ndarray:
    """``(2^{2s}, 2s+1)`` matrix whose columns encode ``m = s, s-1, ..., -s``."""
    s = _as_half_integer(spin)
    n = int(2 * s)
    V = np.zeros((2**n, n + 1))
    for h in range(n + 1):
        for b, a in dicke_basis_state(s, s - h).items():
            V[b, h] = a
    return V


def spin_matrices(spin) -> dict[str, np.ndarray]:
    """Standard ``(2s+1)``-dimensional spin matrices in the ``m = s..-s`` basis."""
    s = float(_as_half_integer(spin))
    m = np.arange(s, -s - 1, -1)
    sp = np.diag(np.sqrt(s * (s + 1) - m[1:] * (m[1:] + 1)), 1)
    return {
        "x": (sp + sp.T) / 2,
        "y": (sp - sp.T) / 2j,
        "z": np.diag(m).astype(complex),
    }
