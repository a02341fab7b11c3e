"""Disordered 1D chain: problem definition, static disorder, single-excitation Hamiltonian.

A chain of ``n_sites`` two-level sites with uniform nearest-neighbour coupling
``g`` (hbar = 1) conserves the excitation number, so a single excitation is a
wave function over site indices and the Hamiltonian reduces to a real symmetric
tridiagonal matrix: diagonal = on-site energies E_j, off-diagonal = g, open
(hard-wall) boundaries.  On-site energies are time-independent, drawn i.i.d.
from Normal(0, delta**2).  Rates and times are conventionally quoted in units
of g (g = 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ChainSpec",
    "DisorderRealization",
    "HamiltonianMatrix",
    "sample_disorder",
    "build_hamiltonian",
    "rabi_amplitude_sq",
]


@dataclass(frozen=True)
class ChainSpec:
    """Static problem definition for one chain.

    Attributes:
        n_sites: number of lattice sites (>= 2).
        g: nearest-neighbour coupling rate (> 0).
        delta: standard deviation of the on-site energy disorder (>= 0).
        gamma: on-site dephasing rate (>= 0).
        big_gamma: incoherent nearest-neighbour hopping rate (>= 0).
        initial_site: site carrying the excitation at t = 0 (default: center).
    """

    n_sites: int
    g: float = 1.0
    delta: float = 0.0
    gamma: float = 0.0
    big_gamma: float = 0.0
    initial_site: int = field(default=-1)

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError(f"n_sites must be >= 2, got {self.n_sites}")
        if not self.g > 0:
            raise ValueError(f"g must be > 0, got {self.g}")
        for name in ("delta", "gamma", "big_gamma"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.initial_site == -1:
            object.__setattr__(self, "initial_site", self.n_sites // 2)
        if not 0 <= self.initial_site < self.n_sites:
            raise ValueError(
                f"initial_site must be in [0, {self.n_sites}), got {self.initial_site}"
            )


@dataclass(frozen=True)
class DisorderRealization:
    """One sampled vector of on-site energies, tagged with the seed that made it."""

    energies: np.ndarray
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "energies", np.asarray(self.energies, dtype=float))


@dataclass(frozen=True)
class HamiltonianMatrix:
    """Real symmetric tridiagonal single-excitation Hamiltonian.

    ``diagonal`` holds the N on-site energies, ``off_diagonal`` the N-1
    nearest-neighbour couplings.  Entries with |j - k| > 1 are zero.
    """

    diagonal: np.ndarray
    off_diagonal: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diagonal, dtype=float)
        e = np.asarray(self.off_diagonal, dtype=float)
        if d.ndim != 1 or e.ndim != 1 or e.shape[0] != d.shape[0] - 1:
            raise ValueError(
                f"need diagonal (N,) and off_diagonal (N-1,), got {d.shape} and {e.shape}"
            )
        object.__setattr__(self, "diagonal", d)
        object.__setattr__(self, "off_diagonal", e)

    @property
    def n_sites(self) -> int:
        return self.diagonal.shape[0]

    def to_dense(self) -> np.ndarray:
        h = np.diag(self.diagonal)
        h += np.diag(self.off_diagonal, 1)
        h += np.diag(self.off_diagonal, -1)
        return h

    def matvec(self, psi: np.ndarray) -> np.ndarray:
        out = self.diagonal * psi
        out[1:] += self.off_diagonal * psi[:-1]
        out[:-1] += self.off_diagonal * psi[1:]
        return out


def sample_disorder(spec: ChainSpec, seed: int) -> DisorderRealization:
    """Draw one static disorder realization, i.i.d. Normal(0, delta**2).

    Deterministic: the same (spec, seed) always returns bit-identical energies.
    delta = 0 gives exact zeros.
    """
    rng = np.random.default_rng(seed)
    energies = rng.normal(0.0, spec.delta, spec.n_sites)
    return DisorderRealization(energies=energies, seed=seed)


def build_hamiltonian(spec: ChainSpec, disorder: DisorderRealization) -> HamiltonianMatrix:
    """Assemble the single-excitation Hamiltonian for one disorder realization.

    Site-basis convention: H|j> = E_j|j> + g|j-1> + g|j+1>, open boundaries.
    """
    if disorder.energies.shape[0] != spec.n_sites:
        raise ValueError(
            f"disorder has {disorder.energies.shape[0]} energies, spec has {spec.n_sites} sites"
        )
    return HamiltonianMatrix(
        diagonal=disorder.energies.copy(),
        off_diagonal=np.full(spec.n_sites - 1, spec.g),
    )


def rabi_amplitude_sq(
    g: float, e_j: float, e_k: float, eps_j: float = 0.0, eps_k: float = 0.0
) -> float:
    """Instantaneous squared Rabi amplitude of a detuned two-site transition.

    Returns g**2 / (g**2 + (e_j - e_k + eps_j - eps_k)**2): the peak transfer
    probability between two sites with static energies e_j, e_k and fluctuation
    values eps_j, eps_k.  Equals 1 only at zero total detuning and decreases
    monotonically with |detuning|.
    """
    if not g > 0:
        raise ValueError(f"g must be > 0, got {g}")
    detuning = e_j - e_k + eps_j - eps_k
    return g * g / (g * g + detuning * detuning)
