"""Dephasing-assisted quantum transport on disordered 1D chains.

Master-equation and quantum-trajectory simulators for a single excitation on
a tight-binding chain with static disorder, on-site dephasing, and incoherent
nearest-neighbour hopping, plus disorder-ensemble sweeps and diffusion-law
(c * t**alpha) fitting.
"""

__version__ = "0.1.0"

from .dynamics import (
    DensityTrajectory,
    IntegrationError,
    NoiseModel,
    basis_state,
    default_time_step,
    dense_superoperator,
    density_from_pure,
    density_invariants,
    evolve_density_matrix,
    evolve_site_populations,
    liouvillian_apply,
)
from .ensemble import PointResult, SweepConfig, SweepResult, run_point, run_realization, run_sweep
from .lattice import (
    ChainSpec,
    DisorderRealization,
    HamiltonianMatrix,
    build_hamiltonian,
    rabi_amplitude_sq,
    sample_disorder,
)
from .observables import (
    MsdFit,
    MsdSeries,
    boundary_mass,
    fit_power_law,
    mean_square_displacement,
    msd_series,
    site_probabilities,
)
from .seeds import derive_seed
from .trajectories import (
    JumpEvent,
    TrajectoryError,
    TrajectoryRecord,
    run_dephasing_trajectory,
    run_hopping_trajectory,
    uniform_state,
)

__all__ = [
    "__version__",
    "ChainSpec",
    "DisorderRealization",
    "HamiltonianMatrix",
    "build_hamiltonian",
    "rabi_amplitude_sq",
    "sample_disorder",
    "NoiseModel",
    "DensityTrajectory",
    "IntegrationError",
    "liouvillian_apply",
    "evolve_density_matrix",
    "evolve_site_populations",
    "dense_superoperator",
    "density_invariants",
    "default_time_step",
    "basis_state",
    "density_from_pure",
    "JumpEvent",
    "TrajectoryRecord",
    "TrajectoryError",
    "run_dephasing_trajectory",
    "run_hopping_trajectory",
    "uniform_state",
    "MsdSeries",
    "MsdFit",
    "site_probabilities",
    "mean_square_displacement",
    "msd_series",
    "boundary_mass",
    "fit_power_law",
    "SweepConfig",
    "SweepResult",
    "PointResult",
    "run_realization",
    "run_point",
    "run_sweep",
    "derive_seed",
]
