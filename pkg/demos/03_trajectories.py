"""Single quantum trajectories and their ensemble average.

Runs one trajectory of each unraveling on a disordered 21-site chain, prints
its jump-event record, then averages a few hundred trajectories and compares
against the master equation.
"""

import numpy as np

from spinchain import (
    ChainSpec,
    NoiseModel,
    basis_state,
    build_hamiltonian,
    density_from_pure,
    evolve_site_populations,
    run_dephasing_trajectory,
    run_hopping_trajectory,
    sample_disorder,
)

n, t_final = 21, 8.0
spec = ChainSpec(n_sites=n, delta=1.0)
h = build_hamiltonian(spec, sample_disorder(spec, seed=3))
psi0 = basis_state(n, n // 2)

print("--- one dephasing trajectory (projective localize/exclude events) ---")
rec = run_dephasing_trajectory(psi0, h, gamma=0.5, t_final=t_final, dt=0.01, seed=1)
kinds = [e.kind for e in rec.events]
print(f"{len(rec.events)} events: {kinds.count('localize')} localize, "
      f"{kinds.count('exclude')} exclude")
for e in rec.events[:5]:
    print(f"  t={e.time:5.2f}  {e.kind:8s} site {e.site}")

print("\n--- one hopping trajectory (every jump relocalizes the excitation) ---")
rec = run_hopping_trajectory(psi0, h, big_gamma=0.5, t_final=t_final, dt=0.01, seed=1)
print(f"{len(rec.events)} hops:")
for e in rec.events[:5]:
    print(f"  t={e.time:5.2f}  hop {e.site} -> {e.target}")

print("\n--- 400-trajectory average vs master equation, t =", t_final, "---")
model = NoiseModel.dephasing(0.5)
_, me_frames, _ = evolve_site_populations(
    density_from_pure(psi0), h, model, t_final, dt=0.005, sample_times=[t_final]
)
mean = np.zeros(n)
for s in range(400):
    rec = run_dephasing_trajectory(psi0, h, 0.5, t_final, dt=0.01, seed=100 + s,
                                   sample_times=[t_final])
    mean += rec.site_probability_frames[-1]
mean /= 400
print(f"max |trajectory mean - ME| = {np.abs(mean - me_frames[-1]).max():.4f} "
      "(Monte-Carlo error, shrinks as 1/sqrt(M))")
