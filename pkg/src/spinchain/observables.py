"""Site probabilities, mean-square displacement, boundary guard, power-law fits."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

__all__ = [
    "MsdSeries",
    "MsdFit",
    "site_probabilities",
    "mean_square_displacement",
    "msd_series",
    "boundary_mass",
    "fit_power_law",
]

_NORM_TOL = 1e-9


@dataclass(frozen=True)
class MsdSeries:
    """Mean-square displacement (sites^2) sampled on a time grid (units 1/g)."""

    times: np.ndarray
    values: np.ndarray
    origin: int

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.shape != v.shape or t.ndim != 1:
            raise ValueError(f"times {t.shape} and values {v.shape} must be equal 1-d")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class MsdFit:
    """Least-squares power law msd ~ c * t**alpha over a log-log window."""

    c: float
    alpha: float
    fit_window: Tuple[float, float]
    rms_log_residual: float


def site_probabilities(state: np.ndarray) -> np.ndarray:
    """|c_j|^2 of a pure state, or the diagonal of a density matrix."""
    state = np.asarray(state)
    if state.ndim == 1:
        probs = np.abs(state) ** 2
    elif state.ndim == 2 and state.shape[0] == state.shape[1]:
        probs = np.real(np.diag(state)).copy()
    else:
        raise ValueError(f"expected a vector or square matrix, got shape {state.shape}")
    total = probs.sum()
    if abs(total - 1.0) > _NORM_TOL:
        raise ValueError(f"state is not normalized: probabilities sum to {total!r}")
    return probs


def mean_square_displacement(probs: np.ndarray, origin: int) -> float:
    """Sum_k probs[k] * (k - origin)^2, in units of sites^2."""
    probs = np.asarray(probs, dtype=float)
    k = np.arange(probs.shape[0])
    return float(np.dot(probs, (k - origin) ** 2))


def msd_series(times: np.ndarray, frames: np.ndarray, origin: int) -> MsdSeries:
    """MSD of a (T, N) stack of probability frames."""
    frames = np.asarray(frames, dtype=float)
    k = np.arange(frames.shape[1])
    values = frames @ ((k - origin) ** 2).astype(float)
    return MsdSeries(times=np.asarray(times, dtype=float), values=values, origin=origin)


def boundary_mass(probs: np.ndarray, margin: int) -> float:
    """Total probability in the outermost `margin` sites on each end."""
    if margin < 1:
        raise ValueError(f"margin must be >= 1, got {margin}")
    probs = np.asarray(probs, dtype=float)
    if 2 * margin >= probs.shape[0]:
        return float(probs.sum())
    return float(probs[:margin].sum() + probs[-margin:].sum())


def fit_power_law(series: MsdSeries, window: Tuple[float, float]) -> MsdFit:
    """Ordinary least squares on (log t, log msd) inside the window.

    Requires at least 10 samples strictly inside (t_min, t_max) and strictly
    positive msd over the window.
    """
    t_min, t_max = window
    if not t_min < t_max:
        raise ValueError(f"bad fit window {window}")
    t = series.times
    v = series.values
    inside = (t > t_min) & (t < t_max)
    if int(inside.sum()) < 10:
        raise ValueError(
            f"need at least 10 samples strictly inside {window}, have {int(inside.sum())}"
        )
    mask = (t >= t_min) & (t <= t_max)
    if np.any(v[mask] <= 0):
        raise ValueError("msd must be positive over the fit window")
    log_t = np.log(t[mask])
    log_v = np.log(v[mask])
    slope, intercept = np.polyfit(log_t, log_v, 1)
    resid = log_v - (slope * log_t + intercept)
    return MsdFit(
        c=float(np.exp(intercept)),
        alpha=float(slope),
        fit_window=(float(t_min), float(t_max)),
        rms_log_residual=float(np.sqrt(np.mean(resid**2))),
    )
