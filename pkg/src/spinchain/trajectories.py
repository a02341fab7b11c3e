"""Stochastic pure-state unravelings of the two noise channels.

Dephasing engine (projective): sites are measured at Poisson rate 2*gamma per
site (total 2*gamma*N, exponential waiting times, site uniform).  An event on
site k either localizes the excitation onto |k> (Born probability |c_k|^2) or
excludes it (zero the k amplitude and renormalize).  The projective
construction reproduces the dephasing generator at half its nominal
coefficient, so the process rate is doubled to make the trajectory average
equal the master equation with coefficient gamma.

Hopping engine (norm threshold): between jumps the state evolves under the
non-Hermitian generator H - (i/2)*big_gamma*sum_channels |j><j|; a jump fires
when the squared norm reaches a uniform threshold, the directed channel j->k
is chosen with weight |c_j|^2, and the state resets to exactly |k>.  The
instantaneous channel rate is big_gamma*|c_j|^2, matching the master equation
as written.  Note: for a localized interior state the *total* jump rate is
2*big_gamma (two outgoing channels); descriptions quoting "probability
2*big_gamma*dt" refer to that total, not to a per-channel rate.

Both engines are bit-reproducible: every random number is drawn up front from
a PCG64 stream keyed by the seed and consumed deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .dynamics import default_time_step, outdegree, _sample_grid
from .lattice import HamiltonianMatrix

__all__ = [
    "JumpEvent",
    "TrajectoryRecord",
    "TrajectoryError",
    "run_dephasing_trajectory",
    "run_hopping_trajectory",
    "uniform_state",
]

NORM_TOL = 1e-10


class TrajectoryError(RuntimeError):
    pass


@dataclass(frozen=True)
class JumpEvent:
    time: float
    kind: str  # "localize" | "exclude" | "hop"
    site: int
    target: Optional[int] = None  # hop destination


@dataclass
class TrajectoryRecord:
    times: np.ndarray
    site_probability_frames: np.ndarray  # (T, N)
    events: list
    rng_seed: int


def uniform_state(n_sites: int) -> np.ndarray:
    return np.full(n_sites, 1.0 / np.sqrt(n_sites), dtype=complex)


def _prepare(psi0, h, rate, rate_name, t_final, dt, sample_times):
    n = h.n_sites
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (n,):
        raise ValueError(f"psi0 has shape {psi0.shape}, expected {(n,)}")
    if rate < 0:
        raise ValueError(f"{rate_name} must be >= 0, got {rate}")
    nrm = np.linalg.norm(psi0)
    if abs(nrm - 1.0) > NORM_TOL:
        raise ValueError(f"psi0 must be normalized, |psi0| = {nrm}")
    if dt is None:
        dt = default_time_step(
            g=float(np.abs(h.off_diagonal).max(initial=0.0)),
            gamma=rate if rate_name == "gamma" else 0.0,
            big_gamma=rate if rate_name == "big_gamma" else 0.0,
            delta=float(np.abs(h.diagonal).max(initial=0.0)),
        )
    n_steps, dt_a, idx, times = _sample_grid(t_final, dt, sample_times)
    cr = np.ascontiguousarray(psi0.real / nrm)
    ci = np.ascontiguousarray(psi0.imag / nrm)
    frames = np.empty((len(idx), n))
    return cr, ci, n_steps, dt_a, idx, times, frames


def _poisson_times(rng: np.random.Generator, rate: float, t_final: float) -> np.ndarray:
    """Cumulative exponential event times in (0, t_final]."""
    if rate <= 0:
        return np.empty(0)
    block = int(rate * t_final + 10.0 * np.sqrt(rate * t_final) + 20.0)
    waits = rng.exponential(1.0 / rate, block)
    total = waits.sum()
    while total <= t_final:
        extra = rng.exponential(1.0 / rate, block)
        waits = np.concatenate([waits, extra])
        total = waits.sum()
    times = np.cumsum(waits)
    return times[times <= t_final]


def run_dephasing_trajectory(
    psi0: np.ndarray,
    h: HamiltonianMatrix,
    gamma: float,
    t_final: float,
    dt: Optional[float] = None,
    seed: int = 0,
    sample_times=None,
) -> TrajectoryRecord:
    """One projective localize/exclude trajectory of the dephasing channel."""
    cr, ci, n_steps, dt_a, idx, times, frames = _prepare(
        psi0, h, gamma, "gamma", t_final, dt, sample_times
    )
    n = h.n_sites
    rng = np.random.default_rng(seed)
    ev_times = _poisson_times(rng, 2.0 * gamma * n, t_final)
    ev_sites = rng.integers(0, n, ev_times.shape[0])
    ev_branch = rng.random(ev_times.shape[0])
    ev_kind = np.zeros(ev_times.shape[0], dtype=np.int8)
    if ev_times.shape[0] == 0:
        status = _kernels.unitary_trajectory_run(
            cr, ci, h.diagonal, h.off_diagonal, n_steps, dt_a, idx, frames
        )
    else:
        status = _kernels.dephasing_trajectory_run(
            cr,
            ci,
            h.diagonal,
            h.off_diagonal,
            n_steps,
            dt_a,
            idx,
            frames,
            ev_times,
            ev_sites,
            ev_branch,
            ev_kind,
        )
    if status == _kernels.ZERO_NORM:
        raise TrajectoryError(
            "exclusion event left a numerically zero state (probability-0 branch)"
        )
    events = [
        JumpEvent(time=float(t), kind="localize" if k == 0 else "exclude", site=int(s))
        for t, s, k in zip(ev_times, ev_sites, ev_kind)
    ]
    return TrajectoryRecord(times, frames, events, seed)


def run_hopping_trajectory(
    psi0: np.ndarray,
    h: HamiltonianMatrix,
    big_gamma: float,
    t_final: float,
    dt: Optional[float] = None,
    seed: int = 0,
    sample_times=None,
) -> TrajectoryRecord:
    """One norm-threshold jump trajectory of the incoherent hopping channel."""
    cr, ci, n_steps, dt_a, idx, times, frames = _prepare(
        psi0, h, big_gamma, "big_gamma", t_final, dt, sample_times
    )
    n = h.n_sites
    rng = np.random.default_rng(seed)
    if big_gamma == 0:
        status = _kernels.unitary_trajectory_run(
            cr, ci, h.diagonal, h.off_diagonal, n_steps, dt_a, idx, frames
        )
        return TrajectoryRecord(times, frames, [], seed)
    mean_events = 2.0 * big_gamma * t_final
    pool = int(mean_events + 12.0 * np.sqrt(max(mean_events, 1.0)) + 64.0)
    thresholds = rng.random(pool)
    channel_u = rng.random(pool)
    ev_times = np.empty(pool)
    ev_src = np.empty(pool, dtype=np.int64)
    ev_dst = np.empty(pool, dtype=np.int64)
    status, n_ev = _kernels.hopping_trajectory_run(
        cr,
        ci,
        h.diagonal,
        h.off_diagonal,
        outdegree(n),
        big_gamma,
        n_steps,
        dt_a,
        idx,
        frames,
        thresholds,
        channel_u,
        ev_times,
        ev_src,
        ev_dst,
    )
    if status == _kernels.POOL_EXHAUSTED:
        raise TrajectoryError(
            f"jump count exceeded the preallocated pool ({pool}); "
            "this indicates a runaway jump rate"
        )
    events = [
        JumpEvent(time=float(ev_times[i]), kind="hop", site=int(ev_src[i]), target=int(ev_dst[i]))
        for i in range(n_ev)
    ]
    return TrajectoryRecord(times, frames, events, seed)
