"""Numba inner loops: fixed-step RK4 for density matrices and jump trajectories.

All stochastic inputs (event times, sites, branch/channel uniforms, norm
thresholds) are drawn outside and passed in as arrays, so every kernel is a
pure deterministic function of its arguments.  Complex state is carried as
split real/imag float64 arrays; the density stencil uses only E[m]-E[n]
differences and Hermitian-symmetric operations, which keeps rho Hermitian to
rounding for Hermitian input.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# status codes returned by the trajectory kernels
OK = 0
ZERO_NORM = 1
POOL_EXHAUSTED = 2


@njit(cache=True, fastmath=True)
def rk4_density_span(rr, ri, n_steps, dt, diag, off, decay, big_gamma):
    """Advance rho (split rr/ri, in place) by n_steps RK4 steps of size dt.

    d(rho)/dt = -i[H, rho] - decay*rho + hop gains, where H is tridiagonal
    (diag, off), decay[m,n] bundles the dephasing and hopping damping, and the
    hop gains feed big_gamma * (rho[j,j] of each neighbour) into the diagonal.
    """
    n = rr.shape[0]
    k1r = np.empty((n, n))
    k1i = np.empty((n, n))
    k2r = np.empty((n, n))
    k2i = np.empty((n, n))
    k3r = np.empty((n, n))
    k3i = np.empty((n, n))
    k4r = np.empty((n, n))
    k4i = np.empty((n, n))
    tr = np.empty((n, n))
    ti = np.empty((n, n))
    for _ in range(n_steps):
        _density_rhs(rr, ri, k1r, k1i, diag, off, decay, big_gamma)
        _axpy2(tr, ti, rr, ri, 0.5 * dt, k1r, k1i)
        _density_rhs(tr, ti, k2r, k2i, diag, off, decay, big_gamma)
        _axpy2(tr, ti, rr, ri, 0.5 * dt, k2r, k2i)
        _density_rhs(tr, ti, k3r, k3i, diag, off, decay, big_gamma)
        _axpy2(tr, ti, rr, ri, dt, k3r, k3i)
        _density_rhs(tr, ti, k4r, k4i, diag, off, decay, big_gamma)
        c = dt / 6.0
        for m in range(n):
            for k in range(n):
                rr[m, k] += c * (k1r[m, k] + 2.0 * (k2r[m, k] + k3r[m, k]) + k4r[m, k])
                ri[m, k] += c * (k1i[m, k] + 2.0 * (k2i[m, k] + k3i[m, k]) + k4i[m, k])


@njit(cache=True, fastmath=True)
def _density_rhs(rr, ri, outr, outi, diag, off, decay, big_gamma):
    n = rr.shape[0]
    for m in range(n):
        em = diag[m]
        for k in range(n):
            ar = 0.0
            ai = 0.0
            if m > 0:
                ar += off[m - 1] * rr[m - 1, k]
                ai += off[m - 1] * ri[m - 1, k]
            if m < n - 1:
                ar += off[m] * rr[m + 1, k]
                ai += off[m] * ri[m + 1, k]
            if k > 0:
                ar -= off[k - 1] * rr[m, k - 1]
                ai -= off[k - 1] * ri[m, k - 1]
            if k < n - 1:
                ar -= off[k] * rr[m, k + 1]
                ai -= off[k] * ri[m, k + 1]
            de = em - diag[k]
            hr = de * rr[m, k] + ar
            hi = de * ri[m, k] + ai
            # out = -i*(commutator term) - decay*rho
            outr[m, k] = hi - decay[m, k] * rr[m, k]
            outi[m, k] = -hr - decay[m, k] * ri[m, k]
    if big_gamma > 0.0:
        for m in range(n):
            gain = 0.0
            if m > 0:
                gain += rr[m - 1, m - 1]
            if m < n - 1:
                gain += rr[m + 1, m + 1]
            outr[m, m] += big_gamma * gain


@njit(cache=True, fastmath=True)
def _axpy2(outr, outi, xr, xi, c, yr, yi):
    n = xr.shape[0]
    for m in range(n):
        for k in range(n):
            outr[m, k] = xr[m, k] + c * yr[m, k]
            outi[m, k] = xi[m, k] + c * yi[m, k]


@njit(cache=True, fastmath=True)
def _hmatvec(cr, ci, diag, off, outr, outi):
    n = cr.shape[0]
    for j in range(n):
        vr = diag[j] * cr[j]
        vi = diag[j] * ci[j]
        if j > 0:
            vr += off[j - 1] * cr[j - 1]
            vi += off[j - 1] * ci[j - 1]
        if j < n - 1:
            vr += off[j] * cr[j + 1]
            vi += off[j] * ci[j + 1]
        outr[j] = vr
        outi[j] = vi


@njit(cache=True, fastmath=True)
def _pure_rhs(cr, ci, diag, off, damp, outr, outi):
    # dc/dt = -i H c - damp*c  (damp = big_gamma/2 * outdegree; zero for unitary)
    _hmatvec(cr, ci, diag, off, outr, outi)
    n = cr.shape[0]
    for j in range(n):
        hr = outr[j]
        hi = outi[j]
        outr[j] = hi - damp[j] * cr[j]
        outi[j] = -hr - damp[j] * ci[j]


@njit(cache=True, fastmath=True)
def _rk4_pure(cr, ci, diag, off, damp, h, ws):
    # one RK4 step of size h, in place; ws is an (8, n) scratch block
    n = cr.shape[0]
    k1r, k1i = ws[0], ws[1]
    k2r, k2i = ws[2], ws[3]
    k3r, k3i = ws[4], ws[5]
    tr, ti = ws[6], ws[7]
    _pure_rhs(cr, ci, diag, off, damp, k1r, k1i)
    for j in range(n):
        tr[j] = cr[j] + 0.5 * h * k1r[j]
        ti[j] = ci[j] + 0.5 * h * k1i[j]
    _pure_rhs(tr, ti, diag, off, damp, k2r, k2i)
    for j in range(n):
        tr[j] = cr[j] + 0.5 * h * k2r[j]
        ti[j] = ci[j] + 0.5 * h * k2i[j]
    _pure_rhs(tr, ti, diag, off, damp, k3r, k3i)
    for j in range(n):
        tr[j] = cr[j] + h * k3r[j]
        ti[j] = ci[j] + h * k3i[j]
        # reuse k1 slot for stage-4 accumulation below
        k1r[j] += 2.0 * (k2r[j] + k3r[j])
        k1i[j] += 2.0 * (k2i[j] + k3i[j])
    _pure_rhs(tr, ti, diag, off, damp, k2r, k2i)
    c = h / 6.0
    for j in range(n):
        cr[j] += c * (k1r[j] + k2r[j])
        ci[j] += c * (k1i[j] + k2i[j])


@njit(cache=True, fastmath=True)
def _norm2(cr, ci):
    s = 0.0
    for j in range(cr.shape[0]):
        s += cr[j] * cr[j] + ci[j] * ci[j]
    return s


@njit(cache=True, fastmath=True)
def _rescale(cr, ci, scale):
    for j in range(cr.shape[0]):
        cr[j] *= scale
        ci[j] *= scale


@njit(cache=True, fastmath=True)
def dephasing_trajectory_run(
    cr,
    ci,
    diag,
    off,
    n_steps,
    dt,
    sample_idx,
    frames,
    ev_times,
    ev_sites,
    ev_branch_u,
    ev_kind_out,
):
    """Projective dephasing unraveling: unitary RK4 between precomputed events.

    At an event on site s the state localizes onto |s> with Born probability
    |c_s|^2, else the s-amplitude is zeroed and the rest renormalized
    (exclusion).  ev_kind_out gets 0 for localize, 1 for exclude.  frames
    receives |c|^2 at the grid indices listed in sample_idx.
    """
    n = cr.shape[0]
    ws = np.empty((8, n))
    damp = np.zeros(n)
    s_ptr = 0
    if s_ptr < sample_idx.shape[0] and sample_idx[s_ptr] == 0:
        for j in range(n):
            frames[s_ptr, j] = cr[j] * cr[j] + ci[j] * ci[j]
        s_ptr += 1
    e_ptr = 0
    n_events = ev_times.shape[0]
    for step in range(n_steps):
        pos = step * dt
        t_next = (step + 1) * dt
        while e_ptr < n_events and ev_times[e_ptr] <= t_next:
            h = ev_times[e_ptr] - pos
            if h > 0.0:
                _rk4_pure(cr, ci, diag, off, damp, h, ws)
                _rescale(cr, ci, 1.0 / np.sqrt(_norm2(cr, ci)))
            s = ev_sites[e_ptr]
            p = cr[s] * cr[s] + ci[s] * ci[s]
            if ev_branch_u[e_ptr] < p:
                for j in range(n):
                    cr[j] = 0.0
                    ci[j] = 0.0
                cr[s] = 1.0
                ev_kind_out[e_ptr] = 0
            else:
                cr[s] = 0.0
                ci[s] = 0.0
                rem = _norm2(cr, ci)
                if rem < 1e-24:
                    return ZERO_NORM
                _rescale(cr, ci, 1.0 / np.sqrt(rem))
                ev_kind_out[e_ptr] = 1
            pos = ev_times[e_ptr]
            e_ptr += 1
        h = t_next - pos
        if h > 0.0:
            _rk4_pure(cr, ci, diag, off, damp, h, ws)
            _rescale(cr, ci, 1.0 / np.sqrt(_norm2(cr, ci)))
        if s_ptr < sample_idx.shape[0] and sample_idx[s_ptr] == step + 1:
            for j in range(n):
                frames[s_ptr, j] = cr[j] * cr[j] + ci[j] * ci[j]
            s_ptr += 1
    return OK


@njit(cache=True, fastmath=True)
def hopping_trajectory_run(
    cr,
    ci,
    diag,
    off,
    outdeg,
    big_gamma,
    n_steps,
    dt,
    sample_idx,
    frames,
    thresholds,
    channel_u,
    ev_times_out,
    ev_src_out,
    ev_dst_out,
):
    """Norm-threshold jump unraveling of incoherent nearest-neighbour hopping.

    No-jump evolution uses H_eff = H - (i/2)*big_gamma*diag(outdeg); a jump
    fires when the squared norm falls to the current threshold, the directed
    channel j->k is chosen with weight |c_j|^2, and the state resets to |k>.
    Returns (status, number of jumps).
    """
    n = cr.shape[0]
    ws = np.empty((8, n))
    c0r = np.empty(n)
    c0i = np.empty(n)
    damp = np.empty(n)
    for j in range(n):
        damp[j] = 0.5 * big_gamma * outdeg[j]
    pool = thresholds.shape[0]
    th_ptr = 0
    r = thresholds[th_ptr]
    n_ev = 0
    s_ptr = 0
    if s_ptr < sample_idx.shape[0] and sample_idx[s_ptr] == 0:
        inv = 1.0 / _norm2(cr, ci)
        for j in range(n):
            frames[s_ptr, j] = (cr[j] * cr[j] + ci[j] * ci[j]) * inv
        s_ptr += 1
    for step in range(n_steps):
        remaining = dt
        t_base = step * dt
        while remaining > 0.0:
            for j in range(n):
                c0r[j] = cr[j]
                c0i[j] = ci[j]
            _rk4_pure(cr, ci, diag, off, damp, remaining, ws)
            if _norm2(cr, ci) > r:
                break
            # jump inside this span: bisect the crossing time from c0
            lo = 0.0
            hi = remaining
            for _ in range(44):
                mid = 0.5 * (lo + hi)
                for j in range(n):
                    cr[j] = c0r[j]
                    ci[j] = c0i[j]
                _rk4_pure(cr, ci, diag, off, damp, mid, ws)
                if _norm2(cr, ci) > r:
                    lo = mid
                else:
                    hi = mid
            tau = hi
            for j in range(n):
                cr[j] = c0r[j]
                ci[j] = c0i[j]
            _rk4_pure(cr, ci, diag, off, damp, tau, ws)
            # pick the directed channel src->dst with weight |c_src|^2
            tot = 0.0
            for j in range(n):
                tot += outdeg[j] * (cr[j] * cr[j] + ci[j] * ci[j])
            if n_ev >= pool or th_ptr + 1 >= pool:
                return POOL_EXHAUSTED, n_ev
            u = channel_u[n_ev] * tot
            acc = 0.0
            src = n - 1
            dst = n - 2
            done = False
            for j in range(n):
                if done:
                    break
                pj = cr[j] * cr[j] + ci[j] * ci[j]
                if j > 0:
                    acc += pj
                    if u < acc:
                        src = j
                        dst = j - 1
                        done = True
                if not done and j < n - 1:
                    acc += pj
                    if u < acc:
                        src = j
                        dst = j + 1
                        done = True
            ev_times_out[n_ev] = t_base + (dt - remaining) + tau
            ev_src_out[n_ev] = src
            ev_dst_out[n_ev] = dst
            n_ev += 1
            for j in range(n):
                cr[j] = 0.0
                ci[j] = 0.0
            cr[dst] = 1.0
            th_ptr += 1
            r = thresholds[th_ptr]
            remaining -= tau
        if s_ptr < sample_idx.shape[0] and sample_idx[s_ptr] == step + 1:
            inv = 1.0 / _norm2(cr, ci)
            for j in range(n):
                frames[s_ptr, j] = (cr[j] * cr[j] + ci[j] * ci[j]) * inv
            s_ptr += 1
    return OK, n_ev


@njit(cache=True, fastmath=True)
def unitary_trajectory_run(cr, ci, diag, off, n_steps, dt, sample_idx, frames):
    """Plain unitary RK4 with per-step renormalization (zero-rate limit)."""
    n = cr.shape[0]
    ws = np.empty((8, n))
    damp = np.zeros(n)
    s_ptr = 0
    if s_ptr < sample_idx.shape[0] and sample_idx[s_ptr] == 0:
        for j in range(n):
            frames[s_ptr, j] = cr[j] * cr[j] + ci[j] * ci[j]
        s_ptr += 1
    for step in range(n_steps):
        _rk4_pure(cr, ci, diag, off, damp, dt, ws)
        _rescale(cr, ci, 1.0 / np.sqrt(_norm2(cr, ci)))
        if s_ptr < sample_idx.shape[0] and sample_idx[s_ptr] == step + 1:
            for j in range(n):
                frames[s_ptr, j] = cr[j] * cr[j] + ci[j] * ci[j]
            s_ptr += 1
    return OK
