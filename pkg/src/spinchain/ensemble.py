"""Disorder ensembles and (delta, gamma, big_gamma) parameter sweeps.

Each grid point averages site-probability frames and MSD over ``n_disorder``
static-disorder realizations (master-equation evolution by default, trajectory
batches when ``n_trajectories`` > 0) and fits msd ~ c * t**alpha over the
configured window.  Seeds derive from the point's rate *values*, never from
grid order, so permuting the grid leaves every per-point result bit-identical.

Realizations whose final frame puts more than ``boundary_threshold``
probability in the outer ``boundary_margin`` sites are flagged and excluded
from the fitted MSD average; a point with more than 10% failed realizations is
marked invalid rather than silently averaged.
"""

from __future__ import annotations

import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .dynamics import (
    NoiseModel,
    basis_state,
    default_time_step,
    density_from_pure,
    evolve_site_populations,
)
from .lattice import ChainSpec, build_hamiltonian, sample_disorder
from .observables import MsdFit, MsdSeries, boundary_mass, fit_power_law, msd_series
from .seeds import derive_seed
from .trajectories import run_dephasing_trajectory, run_hopping_trajectory

__all__ = [
    "SweepConfig",
    "PointResult",
    "SweepResult",
    "run_realization",
    "run_point",
    "run_sweep",
]

BOUNDARY_THRESHOLD = 1e-3


@dataclass(frozen=True)
class SweepConfig:
    """Grid of (delta, gamma, big_gamma) points plus everything needed to run them."""

    base: ChainSpec
    points: Tuple[Tuple[float, float, float], ...]
    n_disorder: int = 100
    n_trajectories: int = 0  # 0 = master equation
    t_final: float = 20.0
    dt: Optional[float] = None  # None: 0.01 / max(g, gamma, big_gamma, delta, 1) per point
    n_samples: int = 201
    master_seed: int = 0
    fit_window: Tuple[float, float] = (5.0, 20.0)
    boundary_margin: int = 5
    boundary_threshold: float = BOUNDARY_THRESHOLD
    use_exact_unitary: bool = True
    workers: int = 1

    def __post_init__(self):
        pts = tuple((float(d), float(g), float(bg)) for d, g, bg in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise ValueError("points grid must not be empty")
        if self.n_disorder < 1:
            raise ValueError("n_disorder must be >= 1")
        if self.t_final <= 0:
            raise ValueError("t_final must be > 0")
        if self.n_trajectories < 0:
            raise ValueError("n_trajectories must be >= 0")
        if self.n_trajectories > 0:
            for d, g, bg in pts:
                if g > 0 and bg > 0:
                    raise ValueError(
                        "trajectory unraveling supports one noise channel per point; "
                        f"point (delta={d}, gamma={g}, big_gamma={bg}) has both"
                    )


@dataclass(frozen=True)
class PointDiagnostics:
    """Worst-case invariant deviations across a point's realizations."""

    max_herm_dev: float = 0.0
    max_trace_dev: float = 0.0
    min_eigenvalue: float = float("nan")
    max_frame_sum_dev: float = 0.0

    def merged(self, other: "PointDiagnostics") -> "PointDiagnostics":
        eigs = [v for v in (self.min_eigenvalue, other.min_eigenvalue) if not np.isnan(v)]
        return PointDiagnostics(
            max(self.max_herm_dev, other.max_herm_dev),
            max(self.max_trace_dev, other.max_trace_dev),
            min(eigs) if eigs else float("nan"),
            max(self.max_frame_sum_dev, other.max_frame_sum_dev),
        )


@dataclass
class PointResult:
    delta: float
    gamma: float
    big_gamma: float
    times: np.ndarray
    mean_frames: np.ndarray
    msd: MsdSeries
    fit: Optional[MsdFit]
    n_disorder: int
    n_failed: int
    n_boundary_flagged: int
    valid: bool
    diagnostics: PointDiagnostics
    elapsed_seconds: float
    fit_error: Optional[str] = None


@dataclass
class SweepResult:
    config: SweepConfig
    points: list


def _unitary_frames(h, initial_site, sample_t):
    """Exact pure-state propagation via tridiagonal eigendecomposition."""
    if h.n_sites < 2 or np.any(h.off_diagonal == 0):
        raise ValueError("exact unitary path needs nonzero couplings")
    evals, evecs = eigh_tridiagonal(h.diagonal, h.off_diagonal)
    amps0 = evecs[initial_site, :]
    phases = np.exp(-1j * np.outer(sample_t, evals))  # (T, n)
    psi = phases * amps0[None, :] @ evecs.T  # (T, n) amplitudes in site basis
    return np.abs(psi) ** 2


def run_realization(
    spec: ChainSpec,
    model: NoiseModel,
    disorder_seed: int,
    t_final: float,
    dt: Optional[float] = None,
    sample_times=None,
    n_trajectories: int = 0,
    trajectory_seeds: Optional[Sequence[int]] = None,
    use_exact_unitary: bool = True,
):
    """Evolve one disorder realization; returns (times, frames, diagnostics).

    frames is the (T, N) stack of site probabilities: master-equation
    diagonals by default, the trajectory-batch mean when n_trajectories > 0,
    or the exact unitary solution for a noise-free model.
    """
    disorder = sample_disorder(spec, disorder_seed)
    h = build_hamiltonian(spec, disorder)
    if dt is None:
        dt = default_time_step(spec.g, model.gamma, model.big_gamma, spec.delta)
    if sample_times is None:
        sample_times = np.linspace(0.0, t_final, 201)

    if n_trajectories > 0:
        if trajectory_seeds is None or len(trajectory_seeds) != n_trajectories:
            raise ValueError("need one trajectory seed per trajectory")
        psi0 = basis_state(spec.n_sites, spec.initial_site)
        acc = None
        times = None
        for k in range(n_trajectories):
            if model.gamma > 0:
                rec = run_dephasing_trajectory(
                    psi0, h, model.gamma, t_final, dt, trajectory_seeds[k], sample_times
                )
            else:
                rec = run_hopping_trajectory(
                    psi0, h, model.big_gamma, t_final, dt, trajectory_seeds[k], sample_times
                )
            acc = rec.site_probability_frames if acc is None else acc + rec.site_probability_frames
            times = rec.times
        frames = acc / n_trajectories
        sum_dev = float(np.abs(frames.sum(axis=1) - 1.0).max())
        diag = PointDiagnostics(max_frame_sum_dev=sum_dev)
        return times, frames, diag

    if model.kind == "none" and use_exact_unitary:
        times = np.asarray(sample_times, dtype=float)
        frames = _unitary_frames(h, spec.initial_site, times)
        sum_dev = float(np.abs(frames.sum(axis=1) - 1.0).max())
        return times, frames, PointDiagnostics(max_frame_sum_dev=sum_dev)

    rho0 = density_from_pure(basis_state(spec.n_sites, spec.initial_site))
    times, frames, report = evolve_site_populations(rho0, h, model, t_final, dt, sample_times)
    sum_dev = float(np.abs(frames.sum(axis=1) - 1.0).max())
    diag = PointDiagnostics(
        max_herm_dev=report.max_herm_dev,
        max_trace_dev=report.max_trace_dev,
        min_eigenvalue=report.min_eigenvalue,
        max_frame_sum_dev=sum_dev,
    )
    return times, frames, diag


def _realization_task(args):
    """Worker entry: returns (index, times, frames, diagnostics, error)."""
    (spec, model, r_idx, disorder_seed, t_final, dt, sample_times, n_traj, traj_seeds, fast) = args
    try:
        times, frames, diag = run_realization(
            spec,
            model,
            disorder_seed,
            t_final,
            dt,
            sample_times,
            n_trajectories=n_traj,
            trajectory_seeds=traj_seeds,
            use_exact_unitary=fast,
        )
        return r_idx, times, frames, diag, None
    except Exception as exc:  # noqa: BLE001 - per-realization failures are recorded
        return r_idx, None, None, None, f"{type(exc).__name__}: {exc}"


def run_point(
    base: ChainSpec,
    delta: float,
    gamma: float,
    big_gamma: float,
    *,
    n_disorder: int = 100,
    n_trajectories: int = 0,
    t_final: float = 20.0,
    dt: Optional[float] = None,
    n_samples: int = 201,
    master_seed: int = 0,
    fit_window: Tuple[float, float] = (5.0, 20.0),
    boundary_margin: int = 5,
    boundary_threshold: float = BOUNDARY_THRESHOLD,
    use_exact_unitary: bool = True,
    workers: int = 1,
) -> PointResult:
    """Average one (delta, gamma, big_gamma) grid point over disorder and fit."""
    t0 = time.perf_counter()
    spec = replace(base, delta=float(delta), gamma=float(gamma), big_gamma=float(big_gamma))
    model = NoiseModel.from_rates(spec.gamma, spec.big_gamma)
    if dt is None:
        dt = default_time_step(spec.g, spec.gamma, spec.big_gamma, spec.delta)
    sample_times = np.linspace(0.0, t_final, n_samples)

    tasks = []
    for r in range(n_disorder):
        dseed = derive_seed(master_seed, "disorder", delta, gamma, big_gamma, r)
        tseeds = None
        if n_trajectories > 0:
            tseeds = [
                derive_seed(master_seed, "traj", delta, gamma, big_gamma, r, k)
                for k in range(n_trajectories)
            ]
        tasks.append(
            (spec, model, r, dseed, t_final, dt, sample_times, n_trajectories, tseeds,
             use_exact_unitary)
        )

    results = [None] * n_disorder
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for out in pool.map(_realization_task, tasks):
                results[out[0]] = out
    else:
        for task in tasks:
            out = _realization_task(task)
            results[out[0]] = out

    times = None
    frames_acc = None
    msd_rows = []
    flags = []
    diag = PointDiagnostics()
    n_failed = 0
    errors = []
    origin = spec.initial_site
    # fixed-order reduction: results indexed by realization, summed 0..n-1
    for r_idx, t, frames, d, err in results:
        if err is not None:
            n_failed += 1
            errors.append(f"realization {r_idx}: {err}")
            continue
        times = t
        frames_acc = frames.copy() if frames_acc is None else frames_acc + frames
        msd_rows.append(msd_series(t, frames, origin).values)
        flags.append(boundary_mass(frames[-1], boundary_margin) > boundary_threshold)
        diag = diag.merged(d)

    n_ok = n_disorder - n_failed
    if n_ok == 0:
        raise RuntimeError(
            f"every realization failed at point (delta={delta}, gamma={gamma}, "
            f"big_gamma={big_gamma}); first error: {errors[0]}"
        )
    mean_frames = frames_acc / n_ok
    flags = np.array(flags)
    n_flagged = int(flags.sum())
    if n_flagged:
        warnings.warn(
            f"point (delta={delta}, gamma={gamma}, big_gamma={big_gamma}): "
            f"{n_flagged}/{n_ok} realizations exceeded boundary mass "
            f"{boundary_threshold:g} (margin {boundary_margin}); excluded from the fit",
            stacklevel=2,
        )
    msd_all = np.array(msd_rows)
    fit_rows = msd_all[~flags] if n_flagged < n_ok else msd_all
    msd_mean = MsdSeries(times=times, values=fit_rows.mean(axis=0), origin=origin)

    fit = None
    fit_error = None
    try:
        fit = fit_power_law(msd_mean, fit_window)
    except ValueError as exc:
        fit_error = str(exc)

    valid = (n_failed <= 0.1 * n_disorder) and fit is not None
    return PointResult(
        delta=float(delta),
        gamma=float(gamma),
        big_gamma=float(big_gamma),
        times=times,
        mean_frames=mean_frames,
        msd=msd_mean,
        fit=fit,
        n_disorder=n_disorder,
        n_failed=n_failed,
        n_boundary_flagged=n_flagged,
        valid=valid,
        diagnostics=diag,
        elapsed_seconds=time.perf_counter() - t0,
        fit_error=fit_error,
    )


def run_sweep(config: SweepConfig) -> SweepResult:
    """Run every grid point; deterministic given config.master_seed."""
    points = []
    for delta, gamma, big_gamma in config.points:
        points.append(
            run_point(
                config.base,
                delta,
                gamma,
                big_gamma,
                n_disorder=config.n_disorder,
                n_trajectories=config.n_trajectories,
                t_final=config.t_final,
                dt=config.dt,
                n_samples=config.n_samples,
                master_seed=config.master_seed,
                fit_window=config.fit_window,
                boundary_margin=config.boundary_margin,
                boundary_threshold=config.boundary_threshold,
                use_exact_unitary=config.use_exact_unitary,
                workers=config.workers,
            )
        )
    return SweepResult(config=config, points=points)
