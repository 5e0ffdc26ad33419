"""Numba trajectory kernels.

One tight scalar loop per trajectory, parallelized over trajectories with
``prange``. Every trajectory consumes its own counter-based random stream
(see :mod:`qdimer.rng`), so results are a pure function of
(master_seed, traj_index, params): bit-identical for any thread count,
any batch slicing, and for the single-trajectory entry points.

Status codes written by the stateful kernels: 0 = ok, 1 = selected readout
had probability below 1e-15, 2 = norm collapse.
"""

import numpy as np
from numba import njit, prange

from .rng import normal_pair, stream_key, uniform

U64 = np.uint64
PI = np.pi
TWO_PI = 2.0 * np.pi

STATUS_OK = 0
STATUS_ZERO_PROB = 1
STATUS_NORM_COLLAPSE = 2


@njit(cache=True, inline="always")
def _wrap(x):
    # canonical angle in (-pi, pi]; drift per step is << 2 pi
    if x <= -PI:
        return x + TWO_PI
    if x > PI:
        return x - TWO_PI
    return x


@njit(cache=True, parallel=True)
def gw_ensemble(seed, indices, n_steps, omega, g1, g2, dt, tl0, tr0,
                out_tl, out_tr, out_counts):
    hg1 = 0.5 * g1
    hg2 = 0.5 * g2
    for k in prange(indices.shape[0]):
        key = stream_key(U64(seed), U64(indices[k]))
        tl = tl0
        tr = tr0
        c0 = 0
        c1 = 0
        c2 = 0
        c3 = 0
        for t in range(n_steps):
            u = uniform(key, U64(t))
            s2l = 0.5 * (1.0 - np.cos(tl))
            s2r = 0.5 * (1.0 - np.cos(tr))
            p1 = g1 * dt * s2l
            p2 = g1 * dt * s2r
            p3 = g2 * dt * s2l * s2r
            p0 = 1.0 - p1 - p2 - p3
            if u < p0:
                # drift branch: theta -> theta - Omega dt, written in rate
                # form so omega = 0 (measurement-only) is well defined
                wl = 2.0 * omega + (hg1 + hg2 * s2r) * np.sin(tl)
                wr = 2.0 * omega + (hg1 + hg2 * s2l) * np.sin(tr)
                tl = _wrap(tl - wl * dt)
                tr = _wrap(tr - wr * dt)
                c0 += 1
            elif u < p0 + p1:
                tl = PI
                c1 += 1
            elif u < p0 + p1 + p2:
                tr = PI
                c2 += 1
            else:
                tl = PI
                tr = PI
                c3 += 1
        out_tl[k] = tl
        out_tr[k] = tr
        out_counts[k, 0] = c0
        out_counts[k, 1] = c1
        out_counts[k, 2] = c2
        out_counts[k, 3] = c3


@njit(cache=True, inline="always")
def _bloch_yz(a0, a1, a2, a3, site_left):
    """(x, y, z) of one site's reduced density matrix."""
    if site_left:
        r01 = a0 * np.conj(a2) + a1 * np.conj(a3)
        z = ((a0 * np.conj(a0) + a1 * np.conj(a1))
             - (a2 * np.conj(a2) + a3 * np.conj(a3))).real
    else:
        r01 = a0 * np.conj(a1) + a2 * np.conj(a3)
        z = ((a0 * np.conj(a0) + a2 * np.conj(a2))
             - (a1 * np.conj(a1) + a3 * np.conj(a3))).real
    return 2.0 * r01.real, -2.0 * r01.imag, z


@njit(cache=True, inline="always")
def _angle_from_yz(y, z):
    """atan2 angle with the -pi branch folded onto +pi; NaN when undefined."""
    if y * y + z * z <= 1e-14:
        return np.nan
    th = np.arctan2(y, z)
    if th <= -PI:
        th = PI
    return th


@njit(cache=True, inline="always")
def _entropy_bits(blen):
    if blen > 1.0:
        blen = 1.0
    mu1 = 0.5 * (1.0 + blen)
    mu2 = 0.5 * (1.0 - blen)
    s = 0.0
    if mu1 > 0.0:
        s -= mu1 * np.log2(mu1)
    if mu2 > 0.0:
        s -= mu2 * np.log2(mu2)
    return s


@njit(cache=True, inline="always")
def _final_observables(a0, a1, a2, a3):
    """Final-time angles, entanglement entropy and product-state fidelity."""
    xl, yl, zl = _bloch_yz(a0, a1, a2, a3, True)
    xr, yr, zr = _bloch_yz(a0, a1, a2, a3, False)
    tl = _angle_from_yz(yl, zl)
    tr = _angle_from_yz(yr, zr)
    ent = _entropy_bits(np.sqrt(xl * xl + yl * yl + zl * zl))
    if np.isnan(tl) or np.isnan(tr):
        return tl, tr, ent, np.nan
    cl = np.cos(0.5 * tl)
    sl = np.sin(0.5 * tl)
    cr = np.cos(0.5 * tr)
    sr = np.sin(0.5 * tr)
    # overlap <theta_l, theta_r | psi>
    ov = ((cl * cr) * a0 + (-1j * cl * sr) * a1
          + (-1j * sl * cr) * a2 + (-sl * sr) * a3)
    fid = (ov * np.conj(ov)).real
    if fid > 1.0:
        fid = 1.0
    return tl, tr, ent, fid


@njit(cache=True, parallel=True)
def exact_ensemble(seed, indices, n_steps, omega, g1, g2, dt, tl0, tr0,
                   out_tl, out_tr, out_ent, out_fid, out_counts, out_status,
                   record_stride, out_nl):
    c = np.cos(omega * dt)
    s = np.sin(omega * dt)
    u00 = c * c + 0.0j
    u01 = -1j * c * s
    u11 = -(s * s) + 0.0j
    p1c = g1 * dt
    p2c = g2 * dt
    m1 = np.sqrt(1.0 - p1c)
    m3 = np.sqrt(1.0 - 2.0 * p1c - p2c)
    for k in prange(indices.shape[0]):
        key = stream_key(U64(seed), U64(indices[k]))
        # product initial state cos(t/2)|0> + i sin(t/2)|1> per site
        al0 = np.cos(0.5 * tl0) + 0.0j
        al1 = 1j * np.sin(0.5 * tl0)
        ar0 = np.cos(0.5 * tr0) + 0.0j
        ar1 = 1j * np.sin(0.5 * tr0)
        a0 = al0 * ar0
        a1 = al0 * ar1
        a2 = al1 * ar0
        a3 = al1 * ar1
        c0 = 0
        c1 = 0
        c2 = 0
        c3 = 0
        status = STATUS_OK
        for t in range(n_steps):
            # U = (c I - i s sx) (x) (c I - i s sx), row pattern
            b0 = u00 * a0 + u01 * a1 + u01 * a2 + u11 * a3
            b1 = u01 * a0 + u00 * a1 + u11 * a2 + u01 * a3
            b2 = u01 * a0 + u11 * a1 + u00 * a2 + u01 * a3
            b3 = u11 * a0 + u01 * a1 + u01 * a2 + u00 * a3
            q1 = (b1 * np.conj(b1)).real
            q2 = (b2 * np.conj(b2)).real
            q3 = (b3 * np.conj(b3)).real
            q0 = (b0 * np.conj(b0)).real
            p1 = p1c * (q2 + q3)
            p2 = p1c * (q1 + q3)
            p3 = p2c * q3
            p0 = q0 + m1 * m1 * (q1 + q2) + m3 * m3 * q3
            u = uniform(key, U64(t)) * (p0 + p1 + p2 + p3)
            if u < p0:
                psel = p0
                a0 = b0
                a1 = m1 * b1
                a2 = m1 * b2
                a3 = m3 * b3
                c0 += 1
            elif u < p0 + p1:
                psel = p1
                a0 = 0.0j
                a1 = 0.0j
                a2 = b2
                a3 = b3
                c1 += 1
            elif u < p0 + p1 + p2:
                psel = p2
                a0 = 0.0j
                a2 = 0.0j
                a1 = b1
                a3 = b3
                c2 += 1
            else:
                psel = p3
                a0 = 0.0j
                a1 = 0.0j
                a2 = 0.0j
                a3 = b3
                c3 += 1
            if psel < 1e-15:
                status = STATUS_ZERO_PROB
                break
            nrm2 = (a0 * np.conj(a0) + a1 * np.conj(a1)
                    + a2 * np.conj(a2) + a3 * np.conj(a3)).real
            if nrm2 < 1e-24:
                status = STATUS_NORM_COLLAPSE
                break
            inv = 1.0 / np.sqrt(nrm2)
            a0 *= inv
            a1 *= inv
            a2 *= inv
            a3 *= inv
            if record_stride > 0 and (t + 1) % record_stride == 0:
                out_nl[k, (t + 1) // record_stride - 1] = (
                    a2 * np.conj(a2) + a3 * np.conj(a3)).real
        out_status[k] = status
        if status == STATUS_OK:
            tl, tr, ent, fid = _final_observables(a0, a1, a2, a3)
            out_tl[k] = tl
            out_tr[k] = tr
            out_ent[k] = ent
            out_fid[k] = fid
        else:
            out_tl[k] = np.nan
            out_tr[k] = np.nan
            out_ent[k] = np.nan
            out_fid[k] = np.nan
        out_counts[k, 0] = c0
        out_counts[k, 1] = c1
        out_counts[k, 2] = c2
        out_counts[k, 3] = c3


@njit(cache=True, parallel=True)
def sse_ensemble(seed, indices, n_steps, omega, g1, g2, dt, tl0, tr0,
                 out_tl, out_tr, out_ent, out_fid, out_status,
                 record_stride, out_nl):
    sg1 = np.sqrt(g1 * dt)
    sg2 = np.sqrt(g2 * dt)
    four = U64(4)
    two = U64(2)
    for k in prange(indices.shape[0]):
        key = stream_key(U64(seed), U64(indices[k]))
        al0 = np.cos(0.5 * tl0) + 0.0j
        al1 = 1j * np.sin(0.5 * tl0)
        ar0 = np.cos(0.5 * tr0) + 0.0j
        ar1 = 1j * np.sin(0.5 * tr0)
        a0 = al0 * ar0
        a1 = al0 * ar1
        a2 = al1 * ar0
        a3 = al1 * ar1
        status = STATUS_OK
        for t in range(n_steps):
            # 3 standard normals per step from 4 stream counters
            z1, z2 = normal_pair(key, four * U64(t))
            z3, _ = normal_pair(key, four * U64(t) + two)
            dw1 = sg1 * z1
            dw2 = sg1 * z2
            dw3 = sg2 * z3
            q1 = (a1 * np.conj(a1)).real
            q2 = (a2 * np.conj(a2)).real
            q3 = (a3 * np.conj(a3)).real
            enl = q2 + q3
            enr = q1 + q3
            enb = q3
            # diagonal eigenvalues of (O_r - <O_r>) per basis state:
            # n_L: (0,0,1,1)  n_R: (0,1,0,1)  n_L n_R: (0,0,0,1)
            d0 = (-0.5 * dt) * (g1 * (enl * enl + enr * enr) + g2 * enb * enb) \
                - dw1 * enl - dw2 * enr - dw3 * enb
            d1 = (-0.5 * dt) * (g1 * (enl * enl + (1 - enr) * (1 - enr)) + g2 * enb * enb) \
                - dw1 * enl + dw2 * (1 - enr) - dw3 * enb
            d2 = (-0.5 * dt) * (g1 * ((1 - enl) * (1 - enl) + enr * enr) + g2 * enb * enb) \
                + dw1 * (1 - enl) - dw2 * enr - dw3 * enb
            d3 = (-0.5 * dt) * (g1 * ((1 - enl) * (1 - enl) + (1 - enr) * (1 - enr))
                                + g2 * (1 - enb) * (1 - enb)) \
                + dw1 * (1 - enl) + dw2 * (1 - enr) + dw3 * (1 - enb)
            b0 = a0 + (-1j * dt) * (omega * (a1 + a2)) + d0 * a0
            b1 = a1 + (-1j * dt) * (omega * (a0 + a3)) + d1 * a1
            b2 = a2 + (-1j * dt) * (omega * (a0 + a3)) + d2 * a2
            b3 = a3 + (-1j * dt) * (omega * (a1 + a2)) + d3 * a3
            nrm2 = (b0 * np.conj(b0) + b1 * np.conj(b1)
                    + b2 * np.conj(b2) + b3 * np.conj(b3)).real
            if nrm2 < 1e-24:
                status = STATUS_NORM_COLLAPSE
                break
            inv = 1.0 / np.sqrt(nrm2)
            a0 = b0 * inv
            a1 = b1 * inv
            a2 = b2 * inv
            a3 = b3 * inv
            if record_stride > 0 and (t + 1) % record_stride == 0:
                out_nl[k, (t + 1) // record_stride - 1] = (
                    a2 * np.conj(a2) + a3 * np.conj(a3)).real
        out_status[k] = status
        if status == STATUS_OK:
            tl, tr, ent, fid = _final_observables(a0, a1, a2, a3)
            out_tl[k] = tl
            out_tr[k] = tr
            out_ent[k] = ent
            out_fid[k] = fid
        else:
            out_tl[k] = np.nan
            out_tr[k] = np.nan
            out_ent[k] = np.nan
            out_fid[k] = np.nan
