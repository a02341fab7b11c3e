"""Disorder ensembles and diffusion-law fits at desk scale.

Sweeps a few (disorder, rate) points on an 81-site chain, averaging over
disorder realizations, and prints the fitted msd ~ c * t**alpha parameters:
alpha ~ 2 for the clean coherent chain, alpha ~ 1 with c ~ 2*rate deep in the
hopping regime, and suppressed c under strong dephasing (effective classical
rate ~ 1/gamma).
"""

from spinchain import ChainSpec, SweepConfig, run_sweep

config = SweepConfig(
    base=ChainSpec(n_sites=81),
    points=(
        (0.0, 0.0, 0.0),   # clean, noise-free: ballistic
        (1.0, 0.0, 0.0),   # disordered, noise-free: localizing
        (1.0, 1.0, 0.0),   # dephasing-assisted
        (0.0, 10.0, 0.0),  # strong dephasing: Zeno-suppressed walk
        (1.0, 0.0, 1.0),   # incoherent hopping
        (0.0, 0.0, 10.0),  # strong hopping: classical walk, c ~ 2*rate
    ),
    n_disorder=20,
    t_final=15.0,
    n_samples=121,
    fit_window=(4.0, 15.0),
    master_seed=12,
)

result = run_sweep(config)

print(f"{'disorder':>9} {'dephasing':>10} {'hop rate':>9} {'c':>9} {'alpha':>7} "
      f"{'residual':>9} {'flagged':>8}")
for pt in result.points:
    fit = pt.fit
    print(f"{pt.delta:9.1f} {pt.gamma:10.1f} {pt.big_gamma:9.1f} "
          f"{fit.c:9.4f} {fit.alpha:7.3f} {fit.rms_log_residual:9.4f} "
          f"{pt.n_boundary_flagged:8d}")

print("\nnotes: the clean noise-free row approaches (c, alpha) = (2, 2); the "
      "strong-hopping row approaches alpha = 1 with c = 2*rate; strong "
      "dephasing gives alpha = 1 with c ~ 1/gamma (Zeno suppression).")
