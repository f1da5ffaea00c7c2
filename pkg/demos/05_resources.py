"""
Gate counts and fault-tolerant cost
===================================

Counts for the 11-qubit cluster after single-qubit merging, then the
surface-code distance, tile count and runtime for a few error budgets.
"""

# %%
from muqsim.evolution import EvolutionPlan, trotter_circuit
from muqsim.geometry import caf2_geometry
from muqsim.hamiltonians import dipolar_hamiltonian
from muqsim.resources import PRESETS, SurfaceCodeParams, preset_report, solve_distance, summarize

H = dipolar_hamiltonian(caf2_geometry(2))
c = summarize(trotter_circuit(H, EvolutionPlan("trotter2", 40, time=10.0)), 11)
print(c)

# %%
for p in (1e-3, 1e-4):
    for eps in (0.01, 0.8):
        r = solve_distance(c.rotations * 100, 11, SurfaceCodeParams(p, eps))
        print(f"p={p:g} eps={eps:<5g} d={r.distance:2d} qubits={r.physical_qubits:6d} runtime={r.runtime_s:6.0f} s")

# %%
for name in PRESETS:
    r, quoted = preset_report(name)
    print(name, r.distance, r.physical_qubits, f"{r.runtime_s / 3600:.1f} h", "quoted:", quoted)
