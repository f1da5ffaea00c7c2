"""
F-mu-F polarisation from exact diagonalisation and Trotter circuits
====================================================================

A muon sitting midway between two fluorines is the smallest useful cluster:
three spin-1/2 particles, three qubits.
"""

# %%
import numpy as np

from muqsim.evolution import EvolutionPlan, bound_report
from muqsim.geometry import caf2_geometry
from muqsim.hamiltonians import dipolar_hamiltonian, dipolar_coupling
from muqsim.polarisation import angular_average, polarisation_exact_diag, polarisation_exact_mixed

system = caf2_geometry(1)
H = dipolar_hamiltonian(system)
print(system.n_qubits, "qubits,", len(H.terms), "Pauli terms")

# %%
# Polarisation along the bond and the powder average over three axes.
t = np.linspace(0, 9.5, 96)
series = {a: polarisation_exact_diag(H, t, system, axis=a) for a in "xyz"}
powder = angular_average(series["x"], series["y"], series["z"])

# the closed form for a linear F-mu-F cluster holds once the F-F coupling is dropped
H_muf = dipolar_hamiltonian(system, nuclear_nuclear=False)
bare = [polarisation_exact_diag(H_muf, t, system, axis=a) for a in "xyz"]
omega = dipolar_coupling(system, 0, 1)
s3 = np.sqrt(3)
closed = (3 + np.cos(s3 * omega * t) + (1 - 1 / s3) * np.cos((3 - s3) * omega * t / 2)
          + (1 + 1 / s3) * np.cos((3 + s3) * omega * t / 2)) / 6
print("powder average vs closed form:", np.abs(angular_average(*bare).values - closed).max())
print("effect of the F-F coupling:", np.abs(powder.values - closed).max())

# %%
# Trotterized evolution of the mixed initial state isolates the product formula error.
for steps in (5, 10, 20, 40):
    trot = polarisation_exact_mixed(H, t, EvolutionPlan("trotter2", steps), system)
    err = np.abs(trot.values - series["z"].values)
    b = bound_report(2, H, 9.5, steps)
    print(f"{steps:3d} steps  max |dP| = {err.max():.2e}  tight bound at 9.5 us = {b.tight:.2e}")

# %%
for tk, p in zip(t[::10], powder.values[::10]):
    print(f"t = {tk:4.1f} us  P = {p:+.4f}")
