"""Asymmetry conversion, reduced chi-squared and Nelder-Mead geometry fits.

The fitted model is ``A(t) = A0 P(theta; t) + A_bg`` where ``theta`` are radial
displacements of fluorine groups.  For a fixed ``theta`` the two amplitude
parameters enter linearly, so they are profiled out by weighted least squares
and the simplex only moves over the geometry.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .geometry import LATTICE_CONSTANT, ShellGeometry
from .hamiltonians import dipolar_hamiltonian
from .polarisation import MethodConfig, polarisation, polarisation_exact_diag

log = logging.getLogger(__name__)


def asymmetry_to_polarisation(A, A_bg, A0):
    if np.any(np.asarray(A0) == 0):
        raise ValueError("A0 must be nonzero")
    return (np.asarray(A, dtype=float) - A_bg) / A0


def polarisation_to_asymmetry(P, A_bg, A0):
    return A0 * np.asarray(P, dtype=float) + A_bg


@dataclass(frozen=True)
class AsymmetrySeries:
    times: np.ndarray
    values: np.ndarray
    sigma: np.ndarray | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape:
            raise ValueError("times and values must be 1-D arrays of equal length")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        if self.sigma is None:
            warnings.warn("no uncertainties given; using sigma = 1 (unweighted fit)", stacklevel=3)
            s = np.ones_like(v)
        else:
            s = np.broadcast_to(np.asarray(self.sigma, dtype=float), v.shape).copy()
            if np.any(~(s > 0)):
                raise ValueError("sigma must be positive")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "sigma", s)

    def __len__(self):
        return self.times.size


def interpolate_onto(times, values, target_times) -> np.ndarray:
    """Linear interpolation; the source grid must bracket the targets."""
    times = np.asarray(times, dtype=float)
    target = np.asarray(target_times, dtype=float)
    if target.min() < times[0] - 1e-12 or target.max() > times[-1] + 1e-12:
        raise ValueError(f"model grid [{times[0]}, {times[-1]}] does not cover "
                         f"data range [{target.min()}, {target.max()}]")
    return np.interp(target, times, values)


def chi_squared_reduced(model: AsymmetrySeries, data: AsymmetrySeries, n_params: int) -> float:
    if model.times.shape == data.times.shape and np.array_equal(model.times, data.times):
        m = model.values
    else:
        m = interpolate_onto(model.times, model.values, data.times)
    dof = len(data) - n_params
    if dof <= 0:
        raise ValueError(f"{len(data)} points leave no degrees of freedom for {n_params} parameters")
    return float(np.sum(((m - data.values) / data.sigma) ** 2) / dof)


def profile_amplitudes(P: np.ndarray, data: AsymmetrySeries) -> tuple[float, float]:
    """Weighted least-squares ``(A0, A_bg)`` for a fixed polarisation curve."""
    w = 1.0 / data.sigma
    M = np.stack([P * w, w], axis=1)
    (A0, A_bg), *_ = np.linalg.lstsq(M, data.values * w, rcond=None)
    return float(A0), float(A_bg)


# --- problem definition -----------------------------------------------------

def exact_diag_model(shell_count: int, lattice_constant: float = LATTICE_CONSTANT,
                     axes: Sequence[str] = ("z",)) -> Callable[[dict, np.ndarray, int | None], np.ndarray]:
    """Polarisation model from exact diagonalisation of the dipolar cluster.

    With several axes the result is their mean (the angular average when all
    three are given).
    """
    def model(displacements: dict, times: np.ndarray, seed: int | None = None) -> np.ndarray:
        system = ShellGeometry(shell_count, lattice_constant, dict(displacements)).system()
        H = dipolar_hamiltonian(system)
        vals = [polarisation_exact_diag(H, times, system, axis=a).values for a in axes]
        return np.mean(vals, axis=0)

    return model


def sampled_model(shell_count: int, config: MethodConfig,
                  lattice_constant: float = LATTICE_CONSTANT, workers: int = 1):
    """Polarisation model from a sampled method; the seed is supplied per evaluation."""
    def model(displacements: dict, times: np.ndarray, seed: int | None = None) -> np.ndarray:
        system = ShellGeometry(shell_count, lattice_constant, dict(displacements)).system()
        H = dipolar_hamiltonian(system)
        out = polarisation(H, times, config, seed, system, workers)
        return out["average"].values if "average" in out else out["z"].values

    return model


@dataclass
class FitProblem:
    data: AsymmetrySeries
    free_groups: tuple[str, ...]
    model: Callable
    fixed: dict = field(default_factory=dict)
    model_times: np.ndarray | None = None  # defaults to the data times

    def __post_init__(self):
        if not self.free_groups:
            raise ValueError("need at least one free parameter")
        self.free_groups = tuple(self.free_groups)
        overlap = set(self.free_groups) & set(self.fixed)
        if overlap:
            raise ValueError(f"groups both fixed and free: {sorted(overlap)}")

    @property
    def n_params(self) -> int:
        return len(self.free_groups) + 2

    def displacements(self, x) -> dict:
        d = dict(self.fixed)
        d.update({g: float(v) for g, v in zip(self.free_groups, x)})
        return d

    def evaluate(self, x, seed: int | None = None) -> tuple[float, float, float]:
        """``(reduced chi^2, A0, A_bg)`` at geometry ``x``; inf if the model fails."""
        times = self.data.times if self.model_times is None else np.asarray(self.model_times)
        try:
            P = np.asarray(self.model(self.displacements(x), times, seed), dtype=float)
        except ValueError as exc:  # e.g. a radius pushed through zero
            log.debug("model rejected %s: %s", x, exc)
            return math.inf, math.nan, math.nan
        if self.model_times is not None:
            P = interpolate_onto(times, P, self.data.times)
        if not np.all(np.isfinite(P)):
            return math.inf, math.nan, math.nan
        A0, A_bg = profile_amplitudes(P, self.data)
        model = AsymmetrySeries(self.data.times, polarisation_to_asymmetry(P, A_bg, A0), self.data.sigma)
        chi2 = chi_squared_reduced(model, self.data, self.n_params)
        return (chi2 if math.isfinite(chi2) else math.inf), A0, A_bg


@dataclass(frozen=True)
class FitResult:
    params: dict
    A0: float
    A_bg: float
    chi2_reduced: float
    iterations: int
    evaluations: int
    converged: bool
    trace: tuple  # (iteration, best chi^2, best x)
    seed: int | None

    def report(self) -> str:
        lines = [f"reduced_chi2 = {self.chi2_reduced:.6g}",
                 f"iterations = {self.iterations}",
                 f"evaluations = {self.evaluations}",
                 f"converged = {str(self.converged).lower()}",
                 f"seed = {self.seed}",
                 f"A0 = {self.A0:.10g}",
                 f"A_bg = {self.A_bg:.10g}"]
        lines += [f"displacement.{g} = {v:.10g}" for g, v in self.params.items()]
        return "\n".join(lines) + "\n"


def default_simplex(x0, step: float = 0.05) -> np.ndarray:
    x0 = np.asarray(x0, dtype=float)
    return np.vstack([x0] + [x0 + step * e for e in np.eye(x0.size)])


@dataclass(frozen=True)
class SimplexResult:
    x: np.ndarray
    fun: float
    iterations: int
    evaluations: int
    converged: bool
    trace: tuple


def minimise_nelder_mead(fun, initial_simplex, xatol: float = 1e-4, fatol: float = 1e-4,
                         maxiter: int = 500) -> SimplexResult:
    """Nelder-Mead with standard coefficients (reflection 1, expansion 2,
    contraction and shrink 1/2).  Non-finite losses count as ``+inf``."""
    simplex = np.asarray(initial_simplex, dtype=float)
    if simplex.ndim != 2 or simplex.shape[0] != simplex.shape[1] + 1:
        raise ValueError(f"initial simplex must have shape (k+1, k), got {simplex.shape}")

    def safe(x):
        v = float(fun(x))
        return v if math.isfinite(v) else math.inf

    trace = []

    def callback(intermediate_result):
        trace.append((len(trace) + 1, float(intermediate_result.fun),
                      tuple(map(float, intermediate_result.x))))

    res = minimize(safe, simplex[0], method="Nelder-Mead", callback=callback,
                   options={"initial_simplex": simplex, "xatol": xatol, "fatol": fatol,
                            "maxiter": maxiter, "adaptive": False})
    return SimplexResult(np.asarray(res.x), float(res.fun), int(res.nit), int(res.nfev),
                         bool(res.success), tuple(trace))


def fit_nelder_mead(problem: FitProblem, x0=None, initial_simplex=None, seed: int | None = None,
                    xatol: float = 1e-4, fatol: float = 1e-4, maxiter: int = 500) -> FitResult:
    """Minimise the reduced chi-squared over the free displacements.

    Every evaluation uses the same ``seed`` so stochastic models see common
    random numbers and the loss surface is deterministic.
    """
    if initial_simplex is None:
        if x0 is None:
            x0 = np.zeros(len(problem.free_groups))
        initial_simplex = default_simplex(x0)
    simplex = np.asarray(initial_simplex, dtype=float)
    k = len(problem.free_groups)
    if simplex.shape != (k + 1, k):
        raise ValueError(f"initial simplex must have shape {(k + 1, k)}, got {simplex.shape}")
    res = minimise_nelder_mead(lambda x: problem.evaluate(x, seed)[0], simplex, xatol, fatol, maxiter)
    chi2, A0, A_bg = problem.evaluate(res.x, seed)
    return FitResult(problem.displacements(res.x), A0, A_bg, chi2, res.iterations, res.evaluations,
                     res.converged, res.trace, seed)


def synthetic_dataset(shell_count: int, displacements: dict, times, noise: float, seed: int,
                      A0: float = 1.0, A_bg: float = 0.0,
                      lattice_constant: float = LATTICE_CONSTANT, axes=("z",)) -> AsymmetrySeries:
    """Exact-diagonalisation asymmetry plus Gaussian noise of fixed scale."""
    P = exact_diag_model(shell_count, lattice_constant, axes)(displacements, np.asarray(times))
    rng = np.random.default_rng(seed)
    A = polarisation_to_asymmetry(P, A_bg, A0) + rng.normal(0.0, noise, size=P.size)
    return AsymmetrySeries(np.asarray(times, dtype=float), A,
                           np.full(P.size, noise if noise > 0 else 1.0))


__all__ = [
    "AsymmetrySeries", "FitProblem", "FitResult", "asymmetry_to_polarisation",
    "chi_squared_reduced", "default_simplex", "exact_diag_model", "fit_nelder_mead",
    "interpolate_onto", "minimise_nelder_mead", "polarisation_to_asymmetry", "profile_amplitudes", "sampled_model",
    "synthetic_dataset",
]
