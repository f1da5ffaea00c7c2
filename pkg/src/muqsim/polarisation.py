"""Muon polarisation functions P(t).

The muon starts spin-up along the measurement axis and the nuclear
environment is maximally mixed, ``rho = |0><0|_mu (x) I_e / D_e``, so

    P(t) = Tr(Z_mu e^{-iHt} rho e^{iHt})
         = (1/D) sum_{m,n} |<m|Z_mu|n>|^2 cos((E_m - E_n) t)

with ``D`` the full physical dimension.  Other axes are handled by rotating
the Hamiltonian so the chosen axis becomes z.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import reduce

import numpy as np
import scipy.sparse as sp
from scipy.integrate import simpson

from .evolution import EvolutionPlan, adaptive_steps, apply_program, program, trotter_unitary
from .kernel.prep import _insert_muon, basis_sample_vector, rpa_vector
from .kernel.rng import task_rng
from .kernel.state import MAX_DENSITY_QUBITS, ResourceLimitError, standard_error, z_signs
from .pauli import PauliString, PauliSum
from .spins import QubitLayout, SpinSystem, dicke_isometry

MAX_EXACT_QUBITS = 14
# evolve through a dense Trotter unitary once this many columns share a plan
UNITARY_COLUMNS = 256
PREP_METHODS = ("rpa", "dephasing", "basis-sample", "exact-mixed")


@dataclass(frozen=True)
class PolarisationSeries:
    times: np.ndarray
    values: np.ndarray
    sigma: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        s = np.broadcast_to(np.asarray(self.sigma, dtype=float), v.shape).copy()
        if t.shape != v.shape or t.ndim != 1:
            raise ValueError("times and values must be 1-D arrays of equal length")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "sigma", s)

    def __len__(self):
        return self.times.size


def default_times(n: int = 191, t_max: float = 9.5) -> np.ndarray:
    return np.linspace(0.0, t_max, n)


def _check_times(times) -> np.ndarray:
    t = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(t < 0):
        raise ValueError("times must be non-negative")
    return t


# --- axis handling ---------------------------------------------------------

# Pauli relabelling (with signs) that turns the given axis into z.
# x: Hadamard on every qubit.  y: Rx(pi/2) on every qubit.
_AXIS_MAPS = {
    "z": {"X": (1, "X"), "Y": (1, "Y"), "Z": (1, "Z")},
    "x": {"X": (1, "Z"), "Y": (-1, "Y"), "Z": (1, "X")},
    "y": {"X": (1, "X"), "Y": (1, "Z"), "Z": (-1, "Y")},
}


def rotate_to_z(H: PauliSum, axis: str) -> PauliSum:
    """Hamiltonian seen in a frame where ``axis`` is the z axis."""
    if axis not in _AXIS_MAPS:
        raise ValueError(f"axis must be x, y or z, got {axis!r}")
    table = _AXIS_MAPS[axis]
    out = {}
    for ps, c in H.terms:
        sign, ops = 1, []
        for q, p in ps.ops:
            s, p2 = table[p]
            sign *= s
            ops.append((q, p2))
        out[PauliString(tuple(ops))] = sign * c
    return PauliSum.from_dict(out, H.n_qubits)


def angular_average(series_x: PolarisationSeries, series_y: PolarisationSeries,
                    series_z: PolarisationSeries) -> PolarisationSeries:
    """Mean of the three axis runs (polycrystalline average)."""
    ss = (series_x, series_y, series_z)
    t = ss[0].times
    if any(s.times.shape != t.shape or np.any(s.times != t) for s in ss):
        raise ValueError("axis series must share a time grid")
    vals = sum(s.values for s in ss) / 3
    sig = np.sqrt(sum(s.sigma**2 for s in ss)) / 3
    meta = dict(ss[2].meta, angular_average=True)
    return PolarisationSeries(t, vals, sig, meta)


# --- physical subspace and symmetry ----------------------------------------

def _layout_of(H: PauliSum, system: SpinSystem | None) -> tuple[QubitLayout, int]:
    if system is None:
        return layout_system_for(H.n_qubits), 0
    if system.n_qubits != H.n_qubits:
        raise ValueError("system and Hamiltonian qubit counts differ")
    return system.layout, system.muon_index


def layout_system_for(n_qubits: int) -> QubitLayout:
    return QubitLayout(tuple(range(q, q + 1) for q in range(n_qubits)))


def physical_isometry(layout: QubitLayout) -> sp.csr_matrix | None:
    """Embedding of the product Dicke space, or ``None`` when all spins are 1/2."""
    if all(len(r) == 1 for r in layout.ranges):
        return None
    mats = [sp.csr_matrix(dicke_isometry(len(r) / 2)) for r in layout.ranges]
    return reduce(lambda a, b: sp.kron(a, b, format="csr"), mats)


def z_rotation_symmetry(system: SpinSystem, H: PauliSum, quarter_turns: int = 1,
                        tol: float = 1e-10):
    """Site permutation for a rotation about z through the muon, if it is a symmetry of ``H``.

    Returns the qubit permutation (``perm[q]`` = image of qubit ``q``) or ``None``.
    Only spin-1/2 systems are handled.
    """
    if any(p.spin != 0.5 for p in system.particles):
        return None
    mu = np.asarray(system.particles[system.muon_index].position)
    phi = quarter_turns * np.pi / 2
    R = np.array([[np.cos(phi), -np.sin(phi), 0], [np.sin(phi), np.cos(phi), 0], [0, 0, 1]])
    pos = system.positions - mu
    perm = []
    for i, r in enumerate(pos):
        d = np.linalg.norm(pos - R @ r, axis=1)
        j = int(np.argmin(d))
        if d[j] > 1e-8 or system.particles[j].gyromagnetic_ratio != system.particles[i].gyromagnetic_ratio:
            return None
        perm.append(j)
    if sorted(perm) != list(range(len(perm))) or perm[system.muon_index] != system.muon_index:
        return None
    # spin rotation: X -> cos X + sin Y, Y -> -sin X + cos Y (quarter turns only)
    c, s = round(np.cos(phi)), round(np.sin(phi))
    table = {"Z": [(1, "Z")], "X": [(c, "X"), (s, "Y")], "Y": [(-s, "X"), (c, "Y")]}
    image: dict[PauliString, float] = {}
    for ps, coeff in H.terms:
        sign, ops = 1, []
        for q, p in ps.ops:
            (sg, p2), = [(a, b) for a, b in table[p] if a != 0]
            sign *= sg
            ops.append((perm[q], p2))
        key = PauliString(tuple(ops))
        image[key] = image.get(key, 0.0) + sign * coeff
    ref = H.as_dict()
    keys = set(ref) | set(image)
    if max(abs(ref.get(k, 0.0) - image.get(k, 0.0)) for k in keys) > tol * max(1.0, H.one_norm):
        return None
    return perm


def symmetry_blocks(n_qubits: int, perm, quarter_turns: int = 1):
    """Orthonormal eigenbases (sparse column blocks) of the symmetry operator.

    The operator is ``Perm * exp(-i phi S_z)``; it maps basis states to
    basis states with a phase fixed by the magnetisation.
    """
    dim = 2**n_qubits
    idx = np.arange(dim)
    # image index under the site permutation (big-endian bits)
    img = np.zeros(dim, dtype=np.int64)
    for q in range(n_qubits):
        bit = (idx >> (n_qubits - 1 - q)) & 1
        img |= bit << (n_qubits - 1 - perm[q])
    phi = quarter_turns * np.pi / 2
    mag = (n_qubits - 2 * np.bitwise_count(idx.astype(np.uint64)).astype(int)) / 2
    seen = np.zeros(dim, dtype=bool)
    cols: dict[int, list] = {}
    for b in range(dim):
        if seen[b]:
            continue
        orbit = [b]
        seen[b] = True
        nxt = img[b]
        while nxt != b:
            orbit.append(int(nxt))
            seen[nxt] = True
            nxt = img[nxt]
        ell = len(orbit)
        # U^k |b> = exp(-i k phi M) |orbit[k]>
        for j in range(ell):
            lam_angle = -phi * mag[b] + 2 * np.pi * j / ell
            k = np.arange(ell)
            amps = np.exp(-1j * k * (lam_angle + phi * mag[b])) / np.sqrt(ell)
            # eigenphases are multiples of pi/4 for quarter turns
            key = int(round(lam_angle / (np.pi / 4))) % 8
            cols.setdefault(key, []).append((orbit, amps))
    blocks = []
    for key in sorted(cols):
        entries = cols[key]
        rows, cidx, vals = [], [], []
        for c, (orbit, amps) in enumerate(entries):
            rows += orbit
            cidx += [c] * len(orbit)
            vals += list(amps)
        blocks.append(sp.csc_matrix((vals, (rows, cidx)), shape=(dim, len(entries))))
    return blocks


# --- exact diagonalisation -------------------------------------------------

@dataclass
class Spectrum:
    """Eigen-data per symmetry block: energies and ``|<m|Z|n>|^2`` weights."""

    energies: list
    weights: list
    dim: int

    def polarisation(self, times) -> np.ndarray:
        t = np.asarray(times, dtype=float)
        out = np.zeros(t.size)
        for E, W in zip(self.energies, self.weights):
            A = np.exp(-1j * np.outer(E, t))
            out += np.real(np.sum(A.conj() * (W @ A), axis=0))
        return out / self.dim


def spectrum(H: PauliSum, system: SpinSystem | None = None, symmetry: bool = True) -> Spectrum:
    layout, mu = _layout_of(H, system)
    n = H.n_qubits
    if n > MAX_EXACT_QUBITS:
        raise ResourceLimitError(f"exact diagonalisation limited to {MAX_EXACT_QUBITS} qubits")
    z = z_signs(n, layout.qubits(mu)[0]).astype(float)
    Hs = H.to_sparse()
    V = physical_isometry(layout)
    if V is not None:
        Hp = (V.T @ Hs @ V).toarray()
        Zp = (V.T @ sp.diags(z) @ V).toarray()
        E, U = np.linalg.eigh(Hp)
        Zm = U.conj().T @ Zp @ U
        return Spectrum([E], [np.abs(Zm) ** 2], V.shape[1])
    blocks = None
    if symmetry and system is not None and n >= 6:
        perm = z_rotation_symmetry(system, H)
        if perm is not None:
            blocks = symmetry_blocks(n, perm)
    if blocks is None:
        blocks = [sp.identity(2**n, dtype=complex, format="csc")]
    energies, weights = [], []
    for B in blocks:
        Hb = (B.conj().T @ Hs @ B).toarray()
        zb = np.real((B.conj().T @ sp.diags(z) @ B).diagonal())
        E, U = np.linalg.eigh(Hb)
        Zm = U.conj().T @ (zb[:, None] * U)
        energies.append(E)
        weights.append(np.abs(Zm) ** 2)
    return Spectrum(energies, weights, 2**n)


def polarisation_exact_diag(H: PauliSum, times, system: SpinSystem | None = None,
                            axis: str = "z", symmetry: bool = True) -> PolarisationSeries:
    """Exact P(t) from the eigen-decomposition of ``H``.

    Without ``system`` every qubit is a spin-1/2 and qubit 0 is the muon.
    With it, spins above 1/2 are restricted to their Dicke subspace and a
    rotation symmetry about z through the muon is exploited when present.
    """
    t = _check_times(times)
    Hr = rotate_to_z(H, axis)
    spec = spectrum(Hr, system, symmetry=symmetry and axis == "z")
    return PolarisationSeries(t, spec.polarisation(t), np.zeros_like(t),
                              {"method": "exact-diag", "axis": axis})


# --- Trotterized evolution of the mixed state -------------------------------

def initial_columns(layout: QubitLayout, muon_index: int = 0) -> np.ndarray:
    """Columns ``W`` with ``rho_0 = W W^dagger / D_e``; one per environment basis state."""
    env = [i for i in range(len(layout)) if i != muon_index]
    V = reduce(np.kron, [dicke_isometry(len(layout.qubits(i)) / 2) for i in env], np.ones((1, 1)))
    cols = [_insert_muon(V[:, k].astype(complex), layout, muon_index) for k in range(V.shape[1])]
    return np.ascontiguousarray(np.stack(cols, axis=1))


def _plan_for(plan: EvolutionPlan, t: float, adaptive_ref: float | None) -> EvolutionPlan:
    p = plan.at(t)
    if adaptive_ref:
        p = replace(p, steps=adaptive_steps(plan.steps, t, adaptive_ref))
    return p


def _evolved_columns(H: PauliSum, plan: EvolutionPlan, W: np.ndarray, rng=None) -> np.ndarray:
    if plan.time == 0:
        return W.copy()
    if not plan.stochastic and W.shape[1] >= UNITARY_COLUMNS:
        return trotter_unitary(H, plan) @ W
    out = W.copy()
    return apply_program(out, program(H, plan, rng), H.n_qubits)


def polarisation_exact_mixed(H: PauliSum, times, plan: EvolutionPlan,
                             system: SpinSystem | None = None, axis: str = "z",
                             seed: int | None = None, adaptive_ref: float | None = None
                             ) -> PolarisationSeries:
    """Trotterized evolution of ``|0><0| (x) I/D_e``; no sampling error."""
    t = _check_times(times)
    layout, mu = _layout_of(H, system)
    if H.n_qubits > MAX_DENSITY_QUBITS:
        raise ResourceLimitError(f"exact-mixed limited to {MAX_DENSITY_QUBITS} qubits")
    if plan.stochastic and seed is None:
        raise ValueError("a seed is required for stochastic plans")
    Hr = rotate_to_z(H, axis)
    W = initial_columns(layout, mu)
    z = z_signs(H.n_qubits, layout.qubits(mu)[0])
    vals = np.empty(t.size)
    for k, tk in enumerate(t):
        rng = task_rng(seed, 0, k, "xyz".index(axis)) if plan.stochastic else None
        Y = _evolved_columns(Hr, _plan_for(plan, tk, adaptive_ref), W, rng)
        vals[k] = float(np.sum(z[:, None] * np.abs(Y) ** 2)) / W.shape[1]
    meta = {"method": "exact-mixed", "axis": axis, "evolution": plan.method, "steps": plan.steps}
    return PolarisationSeries(t, vals, np.zeros_like(t), meta)


# --- sampled pure-state estimates -------------------------------------------

@dataclass(frozen=True)
class MethodConfig:
    prep: str = "rpa"
    samples: int = 1
    plan: EvolutionPlan = field(default_factory=EvolutionPlan)
    angular_average: bool = False
    phases: str = "basis"
    shots: int | None = None
    adaptive_ref: float | None = None

    def __post_init__(self):
        if self.prep not in PREP_METHODS:
            raise ValueError(f"prep must be one of {PREP_METHODS}, got {self.prep!r}")
        if self.samples < 1:
            raise ValueError("samples must be at least 1")
        if self.phases not in ("basis", "qubit"):
            raise ValueError("phases must be 'basis' or 'qubit'")


def _prepare(cfg: MethodConfig, layout, mu, rng) -> np.ndarray:
    if cfg.prep == "rpa":
        return rpa_vector(layout, rng, mu, cfg.phases)
    if cfg.prep == "dephasing":
        return rpa_vector(layout, rng, mu, "qubit", discrete=True)
    return basis_sample_vector(layout, rng, mu)


def _sampled_point(args):
    H, cfg, layout, mu, seed, k, tk, axis_id = args
    n = H.n_qubits
    z = z_signs(n, layout.qubits(mu)[0])
    plan = _plan_for(cfg.plan, tk, cfg.adaptive_ref)
    rngs = [task_rng(seed, s, k, axis_id) for s in range(cfg.samples)]
    psi = np.stack([_prepare(cfg, layout, mu, r) for r in rngs], axis=1)
    if plan.time > 0:
        if plan.stochastic:
            for s, r in enumerate(rngs):
                col = np.ascontiguousarray(psi[:, s])
                psi[:, s] = apply_program(col, program(H, plan, r), n)
        elif cfg.samples >= UNITARY_COLUMNS:
            psi = trotter_unitary(H, plan) @ psi
        else:
            apply_program(psi, program(H, plan), n)
    vals = z @ (np.abs(psi) ** 2)
    if cfg.shots:
        vals = np.array([
            (2 * r.binomial(cfg.shots, min(max(0.5 * (1 + v), 0.0), 1.0)) - cfg.shots) / cfg.shots
            for v, r in zip(vals, rngs)
        ])
    return vals


def polarisation_sampled(H: PauliSum, times, config: MethodConfig, seed: int,
                         system: SpinSystem | None = None, axis: str = "z",
                         workers: int = 1) -> PolarisationSeries:
    """Average of ``config.samples`` pure-state runs per time point.

    Each ``(sample, time, axis)`` task draws from its own counter-based
    generator, so the result is independent of ``workers``.
    """
    if config.prep == "exact-mixed":
        return polarisation_exact_mixed(H, times, config.plan, system, axis, seed, config.adaptive_ref)
    if seed is None:
        raise ValueError("a seed is required for sampled methods")
    t = _check_times(times)
    layout, mu = _layout_of(H, system)
    Hr = rotate_to_z(H, axis)
    axis_id = "xyz".index(axis)
    tasks = [(Hr, config, layout, mu, seed, k, tk, axis_id) for k, tk in enumerate(t)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_time = list(pool.map(_sampled_point, tasks))
    else:
        per_time = [_sampled_point(a) for a in tasks]
    vals = np.array([v.mean() for v in per_time])
    if config.samples > 1:
        sig = np.array([v.std(ddof=1) / math.sqrt(v.size) for v in per_time])
    elif config.shots:
        sig = np.array([standard_error(v[0], config.shots) for v in per_time])
    else:
        sig = np.full(t.size, np.nan)
    meta = {"method": config.prep, "axis": axis, "samples": config.samples, "seed": seed,
            "evolution": config.plan.method, "steps": config.plan.steps, "phases": config.phases}
    return PolarisationSeries(t, vals, sig, meta)


def polarisation(H: PauliSum, times, config: MethodConfig, seed: int | None = None,
                 system: SpinSystem | None = None, workers: int = 1) -> dict[str, PolarisationSeries]:
    """Run ``config`` along z, or along x, y, z plus their average."""
    axes = ("x", "y", "z") if config.angular_average else ("z",)
    out = {a: polarisation_sampled(H, times, config, seed, system, a, workers) for a in axes}
    if config.angular_average:
        out["average"] = angular_average(out["x"], out["y"], out["z"])
    return out


# --- single-jump dynamics ---------------------------------------------------

def _eig(H: PauliSum, V):
    M = H.to_dense()
    if V is not None:
        M = V.T @ M @ V
    return np.linalg.eigh(M)


def dynamic_polarisation_single_jump(H0: PauliSum, H1: PauliSum, nu: float, times,
                                     quad_step: float | None = None,
                                     system: SpinSystem | None = None) -> PolarisationSeries:
    """``G(t) = G0(t) e^{-nu t} + nu int_0^t e^{-nu t'} F(t, t') dt'`` by composite Simpson.

    ``F(t, t')`` evolves the initial state under ``H0`` up to the hop at
    ``t'`` and under ``H1`` afterwards.  ``quad_step`` defaults to a tenth of
    the time spacing.
    """
    if H0.n_qubits != H1.n_qubits:
        raise ValueError("H0 and H1 must act on the same qubit layout")
    if H0.n_qubits > MAX_EXACT_QUBITS:
        raise ResourceLimitError("single-jump formula needs dense matrices")
    t = _check_times(times)
    layout, mu = _layout_of(H0, system)
    if quad_step is None:
        quad_step = (np.min(np.diff(t)) if t.size > 1 else max(t[0], 1.0)) / 10
    V = physical_isometry(layout)
    V = None if V is None else V.toarray()
    z = z_signs(H0.n_qubits, layout.qubits(mu)[0]).astype(float)
    W = initial_columns(layout, mu)
    Z = np.diag(z)
    if V is not None:
        Z, W = V.T @ Z @ V, V.T @ W
    rho0 = (W @ W.conj().T) / W.shape[1]
    E0, U0 = _eig(H0, V)
    E1, U1 = _eig(H1, V)
    Z1 = U1.conj().T @ Z @ U1
    R0 = U0.conj().T @ rho0 @ U0
    M01 = U1.conj().T @ U0  # H0 eigenbasis -> H1 eigenbasis

    def rho_in_h1(tp):
        ph = np.exp(-1j * E0 * tp)
        return M01 @ (ph[:, None] * R0 * ph.conj()[None, :]) @ M01.conj().T

    def F(tau, R1):
        ph = np.exp(-1j * E1 * tau)
        return float(np.real(np.sum(Z1.T * (ph[:, None] * R1 * ph.conj()[None, :]))))

    Z0 = U0.conj().T @ Z @ U0
    out = np.empty(t.size)
    for k, tk in enumerate(t):
        ph = np.exp(-1j * E0 * tk)
        g0 = float(np.real(np.sum(Z0.T * (ph[:, None] * R0 * ph.conj()[None, :]))))
        if nu == 0 or tk == 0:
            out[k] = g0
            continue
        m = 2 * max(1, math.ceil(tk / (2 * quad_step)))  # Simpson needs an even count
        grid = np.linspace(0.0, tk, m + 1)
        f = np.array([np.exp(-nu * tp) * F(tk - tp, rho_in_h1(tp)) for tp in grid])
        out[k] = g0 * np.exp(-nu * tk) + nu * simpson(f, x=grid)
    return PolarisationSeries(t, out, np.zeros_like(t),
                              {"method": "single-jump", "nu": nu, "quad_step": quad_step})

