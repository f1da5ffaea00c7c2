"""CaF2 + muon cluster geometries.

The fluorine sublattice of CaF2 is simple cubic with spacing ``a``.  The
muon sits midway between two neighbouring fluorines; we put that bond along
``z`` with the muon at the origin, so fluorine sites are
``a * (i, j, k + 1/2)``.

Calcium occupies every other cube of the fluorine lattice.  Of the four
cubes sharing the F-mu-F edge, the two with ``x*y > 0`` centres hold Ca and
the other two are empty, which splits the third shell (10 sites) into the
diagonal sites next to Ca, the diagonal sites next to the empty cubes, and
the two sites on the bond axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spins import SpinSystem, fluorine, muon

LATTICE_CONSTANT = 2.72  # Angstrom, F-F spacing

#: Group name -> shell index.  Shells hold 2, 8, 10 and 8 fluorines.
GROUPS = {
    "nn": 1,
    "n-nn": 2,
    "nn-nn-ca": 3,
    "nn-nn-void": 3,
    "nn-nn-axial": 3,
    "nnn-nn": 4,
}
SHELL_SIZES = (2, 8, 10, 8)
# squared muon-F distance in units of a^2 for each shell
_SHELL_R2 = (0.25, 1.25, 2.25, 3.25)


def _group_of(i: int, j: int, shell: int) -> str:
    if shell == 1:
        return "nn"
    if shell == 2:
        return "n-nn"
    if shell == 4:
        return "nnn-nn"
    if i == 0 and j == 0:
        return "nn-nn-axial"
    return "nn-nn-ca" if i * j > 0 else "nn-nn-void"


def lattice_sites(a: float = LATTICE_CONSTANT, max_shell: int = 4):
    """Fluorine sites around the muon, sorted by distance then coordinates.

    Returns a list of ``(group, position)`` with positions at equilibrium.
    """
    out = []
    rng = range(-3, 4)
    for i in rng:
        for j in rng:
            for k in rng:
                r2 = i * i + j * j + (k + 0.5) ** 2
                matches = [s for s, v in enumerate(_SHELL_R2, 1) if abs(v - r2) < 1e-9]
                if matches and matches[0] <= max_shell:
                    pos = a * np.array([i, j, k + 0.5])
                    out.append((matches[0], _group_of(i, j, matches[0]), pos))
    out.sort(key=lambda t: (t[0], tuple(t[2])))
    return [(g, p) for _, g, p in out]


@dataclass(frozen=True)
class ShellGeometry:
    """Fluorine positions grouped by displacement parameter."""

    shell_count: int
    lattice_constant: float = LATTICE_CONSTANT
    displacements: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 1 <= self.shell_count <= 4:
            raise ValueError("shell_count must be between 1 and 4")
        unknown = set(self.displacements) - set(self.groups)
        if unknown:
            raise ValueError(f"unknown displacement groups {sorted(unknown)}; "
                             f"valid for {self.shell_count} shells: {self.groups}")

    @property
    def groups(self) -> list[str]:
        return [g for g, s in GROUPS.items() if s <= self.shell_count]

    def sites(self):
        """``(group, position)`` pairs with the radial displacements applied."""
        out = []
        for g, p in lattice_sites(self.lattice_constant, self.shell_count):
            r = np.linalg.norm(p)
            r_new = r + float(self.displacements.get(g, 0.0))
            if r_new <= 0:
                raise ValueError(f"displacement of group {g!r} collapses its radius to {r_new:.4g} A")
            out.append((g, p * (r_new / r)))
        return out

    def group_distance(self, group: str) -> float:
        for g, p in self.sites():
            if g == group:
                return float(np.linalg.norm(p))
        raise KeyError(group)

    def system(self) -> SpinSystem:
        particles = [muon()]
        particles += [fluorine(p, label=f"F{n}:{g}") for n, (g, p) in enumerate(self.sites(), 1)]
        return SpinSystem(tuple(particles), muon_index=0)


def caf2_geometry(shell_count: int, displacements: dict | None = None,
                  lattice_constant: float = LATTICE_CONSTANT) -> SpinSystem:
    """Muon plus the first ``shell_count`` fluorine shells of CaF2.

    ``displacements`` maps group names (see :data:`GROUPS`) to signed changes of
    the muon-F distance in Angstrom; negative values pull fluorines inwards.
    """
    return ShellGeometry(shell_count, lattice_constant, dict(displacements or {})).system()


def distance_groups(system: SpinSystem, decimals: int = 9) -> dict[float, list[int]]:
    """Group particle indices by rounded muon distance (brute-force helper)."""
    mu = np.asarray(system.particles[system.muon_index].position)
    out: dict[float, list[int]] = {}
    for i in system.environment:
        d = round(float(np.linalg.norm(np.asarray(system.particles[i].position) - mu)), decimals)
        out.setdefault(d, []).append(i)
    return dict(sorted(out.items()))
