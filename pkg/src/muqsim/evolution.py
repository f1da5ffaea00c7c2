"""Product formulas, qDRIFT, Pauli-exponential circuits and Trotter error bounds.

Every evolution is first turned into a *program*: a list of
``(PauliString, theta)`` pairs, each meaning ``exp(-i theta/2 P)``.  The same
program drives the statevector kernel, the dense-unitary builder and the gate
synthesiser, so all three agree by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
import scipy.sparse.linalg as spla

from .kernel.gates import CNOT, Gate, H, Rx, Rz
from .kernel.state import QuantumState, apply_pauli_rotation, apply_pauli_rotation_state
from .pauli import PauliString, PauliSum, accumulate, anticommutation_matrix

METHODS = ("trotter1", "trotter2", "qdrift")
ORDERINGS = ("magnitude", "input", "random")
DENSE_NORM_QUBITS = 12


@dataclass(frozen=True)
class EvolutionPlan:
    method: str = "trotter2"
    steps: int = 1
    ordering: str = "magnitude"
    time: float = 0.0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.ordering not in ORDERINGS:
            raise ValueError(f"ordering must be one of {ORDERINGS}, got {self.ordering!r}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"steps must be a positive integer, got {self.steps}")
        if self.time < 0:
            raise ValueError("time must be non-negative")

    def at(self, t: float) -> "EvolutionPlan":
        return replace(self, time=float(t))

    @property
    def stochastic(self) -> bool:
        return self.method == "qdrift" or self.ordering == "random"


def ordered_terms(H: PauliSum, ordering: str = "magnitude", rng=None):
    """Non-identity terms in evolution order.

    ``magnitude`` sorts by ``|h|`` descending with ties in canonical order.
    """
    terms = [t for t in H.terms if t[0].weight]
    if ordering == "magnitude":
        return sorted(terms, key=lambda t: (-abs(t[1]), t[0]))
    if ordering == "input":
        return terms
    if rng is None:
        raise ValueError("random ordering needs an rng")
    return [terms[i] for i in rng.permutation(len(terms))]


def step_program(terms, dt: float, order: int):
    """One first- or second-order step.  The middle exponential of a
    second-order step is fused; neighbouring steps are not."""
    if order == 1:
        return [(ps, 2 * h * dt) for ps, h in terms]
    if not terms:
        return []
    half = [(ps, h * dt) for ps, h in terms[:-1]]
    ps, h = terms[-1]
    return half + [(ps, 2 * h * dt)] + half[::-1]


def program(H: PauliSum, plan: EvolutionPlan, rng=None):
    """The full rotation list for ``plan`` (time taken from ``plan.time``)."""
    t = plan.time
    if plan.method == "qdrift":
        return qdrift_program(H, t, plan.steps, rng)
    order = 1 if plan.method == "trotter1" else 2
    dt = t / plan.steps
    if plan.ordering != "random":
        return step_program(ordered_terms(H, plan.ordering), dt, order) * plan.steps
    out = []
    for _ in range(plan.steps):
        out += step_program(ordered_terms(H, "random", rng), dt, order)
    return out


def qdrift_program(H: PauliSum, t: float, samples: int, rng):
    """``samples`` terms drawn with probability ``|h_j| / lambda``, each evolved
    by ``lambda t / N`` with the coefficient sign folded into the angle."""
    if rng is None:
        raise ValueError("qDRIFT needs an rng")
    terms = [x for x in H.terms if x[0].weight]
    if not terms:
        return []
    h = np.array([c for _, c in terms])
    lam = np.abs(h).sum()
    idx = rng.choice(len(terms), size=samples, p=np.abs(h) / lam)
    tau = lam * t / samples
    return [(terms[j][0], 2 * np.sign(h[j]) * tau) for j in idx]


def evolve(state: QuantumState, H: PauliSum, plan: EvolutionPlan, rng=None) -> QuantumState:
    """Apply the plan's approximation of ``exp(-i H t)`` to ``state`` in place."""
    if state.n_qubits != H.n_qubits:
        raise ValueError(f"state has {state.n_qubits} qubits, Hamiltonian {H.n_qubits}")
    for ps, theta in program(H, plan, rng):
        apply_pauli_rotation_state(state, ps, theta)
    return state


def apply_program(psi: np.ndarray, prog, n_qubits: int) -> np.ndarray:
    """Apply a rotation list in place to a ``(2^n,)`` or ``(2^n, m)`` array."""
    for ps, theta in prog:
        apply_pauli_rotation(psi, ps, theta, n_qubits)
    return psi


@lru_cache(maxsize=2)
def trotter_unitary(H: PauliSum, plan: EvolutionPlan) -> np.ndarray:
    """Dense product-formula unitary (deterministic orderings only)."""
    if plan.stochastic:
        raise ValueError("trotter_unitary needs a deterministic plan")
    n = H.n_qubits
    one = replace(plan, steps=1, time=plan.time / plan.steps)
    U = apply_program(np.eye(2**n, dtype=complex), program(H, one), n)
    return np.linalg.matrix_power(U, plan.steps)


# --- circuit synthesis -----------------------------------------------------

def synthesize_pauli_exponential(coefficient: float, ps: PauliString, t: float = 1.0) -> list[Gate]:
    """Gates for ``exp(-i coefficient t P)``.

    X factors are rotated onto Z with H and Y factors with ``Rx(pi/2)``, then a
    CNOT ladder collects the parity onto the last qubit for a single ``Rz``.
    """
    theta = 2 * coefficient * t
    if not ps.ops:
        return []
    pre, post = [], []
    for q, p in ps.ops:
        if p == "X":
            pre.append(H(q))
            post.append(H(q))
        elif p == "Y":
            pre.append(Rx(q, np.pi / 2))
            post.append(Rx(q, -np.pi / 2))
    qs = ps.qubits
    ladder = [CNOT(a, b) for a, b in zip(qs, qs[1:])]
    return pre + ladder + [Rz(qs[-1], theta)] + ladder[::-1] + post


def program_circuit(prog) -> list[Gate]:
    gates: list[Gate] = []
    for ps, theta in prog:
        gates += synthesize_pauli_exponential(theta / 2, ps)
    return gates


def trotter_circuit(H: PauliSum, plan: EvolutionPlan, rng=None) -> list[Gate]:
    return program_circuit(program(H, plan, rng))


# --- error bounds ----------------------------------------------------------

@dataclass(frozen=True)
class BoundReport:
    order: int
    loose: float
    tight: float
    L: int
    Lambda: float
    lam: float
    t: float
    n: int
    exact_norm: bool = True


def trotter_bound_loose(order: int, L: int, Lambda: float, t: float, n: int) -> float:
    """``(L Lambda t)^2 / n`` (order 1) or ``(L Lambda t)^3 / n^2`` (order 2), unit constants."""
    if order == 1:
        return (L * Lambda * t) ** 2 / n
    if order == 2:
        return (L * Lambda * t) ** 3 / n**2
    raise ValueError("order must be 1 or 2")


def _tight_inside(order: int, terms, t: float, n: int) -> float:
    h = np.abs(np.array([c for _, c in terms]))
    if len(h) < 2:
        return 0.0
    A = anticommutation_matrix([ps for ps, _ in terms])
    upper = np.triu(A, 1)
    if order == 1:
        return t**2 / (2 * n) * float(2 * h @ upper @ h)
    # nested [H_k, [H_j, H_i]] for j, k > i: nonzero when H_j, H_i anticommute
    # and H_k anticommutes with exactly one of them
    total12 = 0.0
    for i in range(len(h) - 1):
        js = np.nonzero(upper[i])[0]
        if js.size == 0:
            continue
        ks = np.arange(i + 1, len(h))
        hit = A[np.ix_(ks, js)] ^ A[ks, i][:, None]
        total12 += 4 * h[i] * float(h[ks] @ hit @ h[js])
    total24 = float(4 * (h**2) @ upper @ h)
    return t**3 / n**2 * (total12 / 12 + total24 / 24)


def _spectral_norm(op: PauliSum) -> tuple[float, bool]:
    if not op.terms:
        return 0.0, True
    if op.n_qubits > DENSE_NORM_QUBITS:
        return op.one_norm, False
    M = op.to_sparse()
    if M.shape[0] <= 64:
        return float(np.abs(np.linalg.eigvalsh(M.toarray())).max()), True
    val = spla.eigsh(M, k=1, which="LM", return_eigenvectors=False, tol=1e-10)
    return float(abs(val[0])), True


def _commutator_sum(a: PauliSum, b: PauliSum) -> PauliSum:
    """``i [a, b]`` as a (Hermitian) Pauli sum."""
    products = []
    for pa, ca in a.terms:
        for pb, cb in b.terms:
            if not pa.commutes_with(pb):
                ph, prod = pa * pb
                products.append((2j * ph * ca * cb, prod))
    return accumulate(products, a.n_qubits)


def _tight_outside(order: int, terms, n_qubits: int, t: float, n: int) -> tuple[float, bool]:
    """Norm taken of the inner sums; dense norms up to ``DENSE_NORM_QUBITS``."""
    exact = True
    total = 0.0
    sums = [PauliSum.from_dict(dict(terms[i + 1:]), n_qubits) for i in range(len(terms))]
    singles = [PauliSum(((ps, c),), n_qubits) for ps, c in terms]
    if order == 1:
        for i in range(len(terms)):
            v, ok = _spectral_norm(_commutator_sum(sums[i], singles[i]))
            total += v
            exact &= ok
        return t**2 / (2 * n) * total, exact
    t12 = t24 = 0.0
    for i in range(len(terms)):
        inner = _commutator_sum(sums[i], singles[i])
        v, ok = _spectral_norm(_commutator_sum(sums[i], inner))
        t12 += v
        w, ok2 = _spectral_norm(_commutator_sum(singles[i], _commutator_sum(singles[i], sums[i])))
        t24 += w
        exact &= ok and ok2
    return t**3 / n**2 * (t12 / 12 + t24 / 24), exact


def trotter_bound_tight(order: int, H: PauliSum, t: float, n: int,
                        norms: str = "inside", ordering: str = "magnitude") -> tuple[float, bool]:
    """Commutator bound for the order-1 or order-2 product formula.

    ``norms="inside"`` moves the norm inside every sum, which for Pauli terms is
    exact arithmetic on the anticommutation pattern.  ``norms="outside"`` keeps
    the inner sums and evaluates spectral norms numerically; beyond
    ``DENSE_NORM_QUBITS`` it falls back to coefficient 1-norms.  Returns
    ``(bound, exact_norm)``.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    terms = ordered_terms(H, ordering)
    if norms == "inside":
        return _tight_inside(order, terms, t, n), True
    if norms == "outside":
        return _tight_outside(order, terms, H.n_qubits, t, n)
    raise ValueError("norms must be 'inside' or 'outside'")


def bound_report(order: int, H: PauliSum, t: float, n: int, norms: str = "inside") -> BoundReport:
    terms = [c for ps, c in H.terms if ps.weight]
    L = len(terms)
    Lam = max(map(abs, terms), default=0.0)
    tight, exact = trotter_bound_tight(order, H, t, n, norms)
    return BoundReport(order, trotter_bound_loose(order, L, Lam, t, n), tight, L, Lam,
                       float(sum(map(abs, terms))), t, n, exact)


def qdrift_error_bound(lam: float, t: float, N: int) -> float:
    """``lambda^2 t^2 / N``."""
    return lam**2 * t**2 / N


def lambda_norm(H: PauliSum) -> float:
    return sum(abs(c) for ps, c in H.terms if ps.weight)


def adaptive_steps(n_ref: int, t: float, t_ref: float) -> int:
    """Steps scaled as ``t^{3/2}`` so that ``n_ref`` steps are used at ``t_ref``."""
    if t <= 0:
        return 1
    return max(1, math.ceil(n_ref * (t / t_ref) ** 1.5))
