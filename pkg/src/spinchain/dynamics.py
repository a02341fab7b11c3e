"""Deterministic density-matrix evolution for the two noise channels.

In the single-excitation subspace both Lindblad channels reduce to closed
forms, which the integrator uses directly:

* on-site dephasing at rate gamma per site leaves populations untouched and
  damps every coherence rho[m,n] (m != n) at 4*gamma;
* incoherent hopping at rate big_gamma per directed nearest-neighbour channel
  moves population j -> k classically (dP_k += big_gamma*P_j per incoming
  channel, dP_j -= big_gamma*P_j per outgoing channel) and damps rho[m,n] at
  big_gamma/2 per channel leaving m or n.

``dense_superoperator`` builds the same generator as an explicit N^2 x N^2
matrix from the jump operators themselves (Kronecker algebra, column-stacked
vec), so matrix-exponential propagation is available as an independent check
of the closed forms.

Density matrices are plain complex ndarrays; ``density_invariants`` measures
Hermiticity / trace / positivity deviations and the integrator enforces them
at every sample time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .lattice import ChainSpec, HamiltonianMatrix

__all__ = [
    "NoiseModel",
    "DensityTrajectory",
    "InvariantReport",
    "IntegrationError",
    "liouvillian_apply",
    "evolve_density_matrix",
    "evolve_site_populations",
    "dense_superoperator",
    "density_invariants",
    "default_time_step",
    "basis_state",
    "density_from_pure",
    "outdegree",
]

NOISE_KINDS = ("none", "onsite_dephasing", "incoherent_hopping", "both")

HERM_TOL = 1e-10
TRACE_TOL = 1e-9
PSD_TOL = 1e-8
PSD_CHECK_MAX_SITES = 30


class IntegrationError(RuntimeError):
    """A stored state violated a density-matrix invariant (step size too large)."""


@dataclass(frozen=True)
class NoiseModel:
    """Which Lindblad channels are active, and at what rates."""

    kind: str
    gamma: float = 0.0
    big_gamma: float = 0.0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"kind must be one of {NOISE_KINDS}, got {self.kind!r}")
        if self.gamma < 0 or self.big_gamma < 0:
            raise ValueError("rates must be >= 0")
        if self.gamma > 0 and self.kind not in ("onsite_dephasing", "both"):
            raise ValueError(f"gamma > 0 inconsistent with kind {self.kind!r}")
        if self.big_gamma > 0 and self.kind not in ("incoherent_hopping", "both"):
            raise ValueError(f"big_gamma > 0 inconsistent with kind {self.kind!r}")

    @classmethod
    def none(cls) -> "NoiseModel":
        return cls("none")

    @classmethod
    def dephasing(cls, gamma: float) -> "NoiseModel":
        return cls("onsite_dephasing", gamma=gamma)

    @classmethod
    def hopping(cls, big_gamma: float) -> "NoiseModel":
        return cls("incoherent_hopping", big_gamma=big_gamma)

    @classmethod
    def from_rates(cls, gamma: float, big_gamma: float) -> "NoiseModel":
        if gamma > 0 and big_gamma > 0:
            return cls("both", gamma=gamma, big_gamma=big_gamma)
        if gamma > 0:
            return cls("onsite_dephasing", gamma=gamma)
        if big_gamma > 0:
            return cls("incoherent_hopping", big_gamma=big_gamma)
        return cls("none")


@dataclass(frozen=True)
class InvariantReport:
    """Worst-case invariant deviations observed over the stored samples."""

    max_herm_dev: float
    max_trace_dev: float
    min_eigenvalue: float  # nan when the positivity check was skipped (N > 30)


@dataclass
class DensityTrajectory:
    times: np.ndarray
    states: np.ndarray  # (T, N, N) complex
    diagnostics: InvariantReport
    spec: Optional[ChainSpec] = None
    disorder_seed: Optional[int] = None


def outdegree(n_sites: int) -> np.ndarray:
    """Directed hop channels leaving each site (2 interior, 1 at the walls)."""
    w = np.full(n_sites, 2.0)
    w[0] = w[-1] = 1.0
    return w


def default_time_step(
    g: float = 1.0, gamma: float = 0.0, big_gamma: float = 0.0, delta: float = 0.0
) -> float:
    """Default RK4 step: 0.01 / max(g, gamma, big_gamma, delta, 1)."""
    return 0.01 / max(g, gamma, big_gamma, delta, 1.0)


def basis_state(n_sites: int, site: int) -> np.ndarray:
    psi = np.zeros(n_sites, dtype=complex)
    psi[site] = 1.0
    return psi


def density_from_pure(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def density_invariants(rho: np.ndarray, check_positivity: bool = True):
    """Return (herm_dev, trace_dev, min_eig); min_eig is nan when not checked."""
    herm_dev = float(np.abs(rho - rho.conj().T).max())
    trace_dev = float(abs(np.trace(rho) - 1.0))
    min_eig = float("nan")
    if check_positivity:
        min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
    return herm_dev, trace_dev, min_eig


def _decay_matrix(h: HamiltonianMatrix, model: NoiseModel) -> np.ndarray:
    """Elementwise damping rates: 4*gamma off-diagonal + hop loss terms."""
    n = h.n_sites
    decay = np.zeros((n, n))
    if model.gamma > 0:
        decay += 4.0 * model.gamma * (1.0 - np.eye(n))
    if model.big_gamma > 0:
        w = outdegree(n)
        decay += 0.5 * model.big_gamma * (w[:, None] + w[None, :])
    return decay


def liouvillian_apply(
    h: HamiltonianMatrix, model: NoiseModel, rho: np.ndarray
) -> np.ndarray:
    """Right-hand side d(rho)/dt = -i[H,rho] + dissipators, closed-form."""
    rho = np.asarray(rho, dtype=complex)
    n = h.n_sites
    if rho.shape != (n, n):
        raise ValueError(f"rho has shape {rho.shape}, expected {(n, n)}")
    diag = h.diagonal
    off = h.off_diagonal
    a = diag[:, None] * rho
    a[1:, :] += off[:, None] * rho[:-1, :]
    a[:-1, :] += off[:, None] * rho[1:, :]
    b = rho * diag[None, :]
    b[:, 1:] += rho[:, :-1] * off[None, :]
    b[:, :-1] += rho[:, 1:] * off[None, :]
    out = -1j * (a - b)
    if model.gamma > 0:
        out -= 4.0 * model.gamma * rho
        idx = np.arange(n)
        out[idx, idx] += 4.0 * model.gamma * rho[idx, idx]
    if model.big_gamma > 0:
        w = outdegree(n)
        out -= 0.5 * model.big_gamma * (w[:, None] + w[None, :]) * rho
        pops = np.diag(rho).copy()
        gain = np.zeros(n, dtype=complex)
        gain[1:] += pops[:-1]
        gain[:-1] += pops[1:]
        idx = np.arange(n)
        out[idx, idx] += model.big_gamma * gain
    return out


def dense_superoperator(h: HamiltonianMatrix, model: NoiseModel) -> np.ndarray:
    """Vectorized generator S with d vec(rho)/dt = S vec(rho), vec column-stacked.

    Built from the jump operators themselves (not the closed forms), so it
    serves as an oracle for ``liouvillian_apply``.  Guarded to N <= 8.
    """
    n = h.n_sites
    if n > 8:
        raise ValueError(f"dense superoperator is limited to n_sites <= 8, got {n}")
    hm = h.to_dense().astype(complex)
    eye = np.eye(n)
    s = -1j * (np.kron(eye, hm) - np.kron(hm.T, eye))
    if model.gamma > 0:
        for j in range(n):
            z = -np.ones(n)
            z[j] = 1.0
            zj = np.diag(z)
            # D[Z]rho = Z rho Z - rho  (Z hermitian, Z^2 = 1)
            s += model.gamma * (np.kron(zj, zj) - np.eye(n * n))
    if model.big_gamma > 0:
        for src in range(n):
            for dst in (src - 1, src + 1):
                if not 0 <= dst < n:
                    continue
                ell = np.zeros((n, n))
                ell[dst, src] = 1.0
                ldl = ell.T @ ell
                s += model.big_gamma * (
                    np.kron(ell.conj(), ell)
                    - 0.5 * np.kron(np.eye(n), ldl)
                    - 0.5 * np.kron(ldl.T, np.eye(n))
                )
    return s


def _sample_grid(t_final: float, dt: float, sample_times):
    """Snap requested sample times onto the uniform RK4 grid."""
    if t_final <= 0:
        raise ValueError(f"t_final must be > 0, got {t_final}")
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    n_steps = max(1, int(round(t_final / dt)))
    dt_actual = t_final / n_steps
    if sample_times is None:
        sample_times = np.linspace(0.0, t_final, min(n_steps + 1, 201))
    sample_times = np.asarray(sample_times, dtype=float)
    if sample_times.size == 0:
        raise ValueError("sample_times must not be empty")
    if sample_times.min() < -1e-12 or sample_times.max() > t_final * (1 + 1e-12):
        raise ValueError("sample_times must lie in [0, t_final]")
    idx = np.unique(np.clip(np.rint(sample_times / dt_actual).astype(np.int64), 0, n_steps))
    return n_steps, dt_actual, idx, idx * dt_actual


def _integrate(rho0, h, model, t_final, dt, sample_times, store_states):
    n = h.n_sites
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (n, n):
        raise ValueError(f"rho0 has shape {rho0.shape}, expected {(n, n)}")
    if dt is None:
        dt = default_time_step(
            g=float(np.abs(h.off_diagonal).max(initial=0.0)),
            gamma=model.gamma,
            big_gamma=model.big_gamma,
            delta=float(np.abs(h.diagonal).max(initial=0.0)),
        )
    n_steps, dt_a, idx, times = _sample_grid(t_final, dt, sample_times)

    rr = np.ascontiguousarray(rho0.real.copy())
    ri = np.ascontiguousarray(rho0.imag.copy())
    decay = _decay_matrix(h, model)
    diag = np.ascontiguousarray(h.diagonal)
    off = np.ascontiguousarray(h.off_diagonal)
    big_gamma = model.big_gamma if model.big_gamma > 0 else 0.0

    check_psd = n <= PSD_CHECK_MAX_SITES
    states = np.empty((len(idx), n, n), dtype=complex) if store_states else None
    frames = np.empty((len(idx), n))
    max_herm = 0.0
    max_trace = 0.0
    min_eig = np.inf if check_psd else float("nan")

    prev = 0
    for i, step_idx in enumerate(idx):
        span = int(step_idx - prev)
        if span > 0:
            _kernels.rk4_density_span(rr, ri, span, dt_a, diag, off, decay, big_gamma)
        prev = step_idx
        rho = rr + 1j * ri
        herm_dev, trace_dev, eig = density_invariants(rho, check_positivity=check_psd)
        max_herm = max(max_herm, herm_dev)
        max_trace = max(max_trace, trace_dev)
        if check_psd:
            min_eig = min(min_eig, eig)
        ok = (
            herm_dev <= HERM_TOL
            and trace_dev <= TRACE_TOL
            and (not check_psd or eig >= -PSD_TOL)
        )
        if not ok:  # NaN deviations fail every comparison and land here too
            raise IntegrationError(
                f"density-matrix invariant violated at t={step_idx * dt_a:.6g} "
                f"(herm {herm_dev:.2e}, trace {trace_dev:.2e}, min eig {eig:.2e}); "
                "step size too large"
            )
        if store_states:
            states[i] = rho
        frames[i] = np.diag(rr)
    report = InvariantReport(max_herm, max_trace, float(min_eig))
    return times, states, frames, report


def evolve_density_matrix(
    rho0: np.ndarray,
    h: HamiltonianMatrix,
    model: NoiseModel,
    t_final: float,
    dt: Optional[float] = None,
    sample_times=None,
) -> DensityTrajectory:
    """Fixed-step RK4 integration of the closed-form generator.

    Stores the full density matrix at every sample time (memory O(T*N^2));
    for long disorder sweeps prefer ``evolve_site_populations``.  Raises
    ``IntegrationError`` when a stored sample violates the Hermiticity /
    trace / positivity tolerances.
    """
    times, states, _, report = _integrate(
        rho0, h, model, t_final, dt, sample_times, store_states=True
    )
    return DensityTrajectory(times=times, states=states, diagnostics=report)


def evolve_site_populations(
    rho0: np.ndarray,
    h: HamiltonianMatrix,
    model: NoiseModel,
    t_final: float,
    dt: Optional[float] = None,
    sample_times=None,
):
    """Same integrator as ``evolve_density_matrix`` but records diagonals only.

    Returns (times, frames, diagnostics) with frames[t, j] = rho[j, j].
    """
    times, _, frames, report = _integrate(
        rho0, h, model, t_final, dt, sample_times, store_states=False
    )
    return times, frames, report
