"""Independent reference implementations used only by the tests.

Nothing here shares code with the package's evolution paths: the full
spin-space oracle works in the 2**N-dimensional product space with explicit
operator algebra, the classical oracle solves the hop rate equation by matrix
exponential, and the unitary oracle diagonalizes the dense Hamiltonian.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla

SZ = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)  # basis (|0>=down, |1>=up)
SMINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SPLUS = SMINUS.conj().T
ID2 = np.eye(2, dtype=complex)


def propagate_superoperator(s: np.ndarray, rho0: np.ndarray, t: float) -> np.ndarray:
    """exp(S t) applied to vec(rho0), column-stacked."""
    n = rho0.shape[0]
    return (sla.expm(s * t) @ rho0.flatten("F")).reshape((n, n), order="F")


def op_at(single: np.ndarray, site: int, n_sites: int) -> np.ndarray:
    """Embed a single-site operator into the 2**N product space (site 0 leftmost)."""
    out = np.array([[1.0 + 0j]])
    for j in range(n_sites):
        out = np.kron(out, single if j == site else ID2)
    return out


def single_excitation_indices(n_sites: int) -> np.ndarray:
    """Full-space basis index of |j> (exactly one up-spin, at site j)."""
    return np.array([1 << (n_sites - 1 - j) for j in range(n_sites)])


def full_space_hamiltonian(energies: np.ndarray, g: float) -> np.ndarray:
    """sum_j (E_j/2) sz_j + g sum_j (s-_j s+_j+1 + s-_j+1 s+_j).

    The E_j/2 coefficient makes the single-excitation block carry diagonal
    E_j up to a constant shift, matching the site-basis convention.
    """
    n = len(energies)
    h = np.zeros((2**n, 2**n), dtype=complex)
    for j in range(n):
        h += 0.5 * energies[j] * op_at(SZ, j, n)
    for j in range(n - 1):
        hop = op_at(SMINUS, j, n) @ op_at(SPLUS, j + 1, n)
        h += g * (hop + hop.conj().T)
    return h


def full_space_jump_ops(n_sites: int, gamma: float, big_gamma: float):
    """(rate, L) pairs: sz_j dephasing plus directed nearest-neighbour hops."""
    ops = []
    if gamma > 0:
        for j in range(n_sites):
            ops.append((gamma, op_at(SZ, j, n_sites)))
    if big_gamma > 0:
        for src in range(n_sites):
            for dst in (src - 1, src + 1):
                if 0 <= dst < n_sites:
                    ops.append(
                        (big_gamma, op_at(SMINUS, src, n_sites) @ op_at(SPLUS, dst, n_sites))
                    )
    return ops


def full_space_evolve(
    energies: np.ndarray,
    g: float,
    gamma: float,
    big_gamma: float,
    rho0_full: np.ndarray,
    t_final: float,
    dt: float,
) -> np.ndarray:
    """Fixed-step RK4 on the generic operator-form Lindblad RHS in 2**N dims."""
    h = full_space_hamiltonian(energies, g)
    jumps = [(rate, ell, ell.conj().T @ ell) for rate, ell in full_space_jump_ops(
        len(energies), gamma, big_gamma)]

    def rhs(rho):
        out = -1j * (h @ rho - rho @ h)
        for rate, ell, ldl in jumps:
            out += rate * (ell @ rho @ ell.conj().T - 0.5 * (ldl @ rho + rho @ ldl))
        return out

    n_steps = max(1, int(round(t_final / dt)))
    step = t_final / n_steps
    rho = rho0_full.astype(complex).copy()
    for _ in range(n_steps):
        k1 = rhs(rho)
        k2 = rhs(rho + 0.5 * step * k1)
        k3 = rhs(rho + 0.5 * step * k2)
        k4 = rhs(rho + step * k3)
        rho += (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return rho


def embed_single_excitation(rho_sub: np.ndarray) -> np.ndarray:
    n = rho_sub.shape[0]
    idx = single_excitation_indices(n)
    full = np.zeros((2**n, 2**n), dtype=complex)
    full[np.ix_(idx, idx)] = rho_sub
    return full


def restrict_single_excitation(rho_full: np.ndarray, n_sites: int) -> np.ndarray:
    idx = single_excitation_indices(n_sites)
    return rho_full[np.ix_(idx, idx)]


def classical_hop_generator(n_sites: int, big_gamma: float) -> np.ndarray:
    """Rate matrix of the nearest-neighbour walk: dP/dt = A P."""
    a = np.zeros((n_sites, n_sites))
    for j in range(n_sites):
        for k in (j - 1, j + 1):
            if 0 <= k < n_sites:
                a[k, j] += big_gamma
                a[j, j] -= big_gamma
    return a


def classical_hop_populations(n_sites, big_gamma, p0, times):
    a = classical_hop_generator(n_sites, big_gamma)
    return np.array([sla.expm(a * t) @ p0 for t in times])


def random_walk_msd(rng, total_rate, t, n_walkers):
    """Monte-Carlo MSD of a continuous-time +-1 walk with the given total rate."""
    n_jumps = rng.poisson(total_rate * t, n_walkers)
    disp = 2 * rng.binomial(n_jumps, 0.5) - n_jumps
    return float(np.mean(disp.astype(float) ** 2))


def unitary_density_oracle(h_dense: np.ndarray, rho0: np.ndarray, t: float) -> np.ndarray:
    """rho(t) = U exp(-i L t) U^dag rho0 ... via dense diagonalization."""
    evals, evecs = np.linalg.eigh(h_dense)
    u_t = evecs @ np.diag(np.exp(-1j * evals * t)) @ evecs.conj().T
    return u_t @ rho0 @ u_t.conj().T


def unitary_state_oracle(h_dense: np.ndarray, psi0: np.ndarray, t: float) -> np.ndarray:
    evals, evecs = np.linalg.eigh(h_dense)
    return evecs @ (np.exp(-1j * evals * t) * (evecs.conj().T @ psi0))


def random_density_matrix(rng, n: int) -> np.ndarray:
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = x @ x.conj().T
    return rho / np.trace(rho).real


def random_hermitian(rng, n: int) -> np.ndarray:
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (x + x.conj().T)
