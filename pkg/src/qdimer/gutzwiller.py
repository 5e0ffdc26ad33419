"""Stochastic evolution of the factorized-state angle pair (theta_l, theta_r).

The dimer state is reduced to two Bloch angles; one monitoring step either
drifts both angles with velocity (-Omega_L, -Omega_R) (no click) or projects
one/both of them onto +pi (clicks). Scalar reference steps live here; large
ensembles run through the numba kernel in :mod:`qdimer._kernels`.
"""

import math

import numpy as np

from . import _kernels
from .errors import ValidationError
from .exact import TrajectorySample
from .params import SimParams

PI = math.pi
TWO_PI = 2.0 * math.pi


def wrap_angle(theta):
    """Map an angle (or array) to the canonical interval (-pi, pi]."""
    return theta - TWO_PI * np.ceil((theta - PI) / TWO_PI)


def drift(theta_l, theta_r, lambda1, lambda2, omega_s=1.0):
    """Drift velocities (Omega_L, Omega_R) of the no-click evolution.

    Omega_L = 2 omega_s [1 + (lambda1 + lambda2 sin^2(theta_r/2)) sin theta_l]
    and Omega_R follows by exchanging the two angles. Accepts scalars or
    broadcasting arrays.
    """
    s2l = np.sin(np.asarray(theta_l) / 2) ** 2
    s2r = np.sin(np.asarray(theta_r) / 2) ** 2
    omega_l = 2 * omega_s * (1 + (lambda1 + lambda2 * s2r) * np.sin(theta_l))
    omega_r = 2 * omega_s * (1 + (lambda1 + lambda2 * s2l) * np.sin(theta_r))
    return omega_l, omega_r


def drift_rates(theta_l, theta_r, omega_s, gamma1, gamma2):
    """Same field in rate form, well defined also at omega_s = 0."""
    s2l = np.sin(np.asarray(theta_l) / 2) ** 2
    s2r = np.sin(np.asarray(theta_r) / 2) ** 2
    omega_l = 2 * omega_s + (0.5 * gamma1 + 0.5 * gamma2 * s2r) * np.sin(theta_l)
    omega_r = 2 * omega_s + (0.5 * gamma1 + 0.5 * gamma2 * s2l) * np.sin(theta_r)
    return omega_l, omega_r


def gw_readout_probs(theta_l, theta_r, gamma1, gamma2, dt):
    """Readout probabilities (p0, p1, p2, p3) of one step at the given angles."""
    s2l = math.sin(theta_l / 2) ** 2
    s2r = math.sin(theta_r / 2) ** 2
    p1 = gamma1 * dt * s2l
    p2 = gamma1 * dt * s2r
    p3 = gamma2 * dt * s2l * s2r
    p0 = 1.0 - (p1 + p2 + p3)
    if p0 < 0:
        raise ValidationError(
            f"no-click probability {p0:g} < 0: dt too large for these rates"
        )
    return np.array([p0, p1, p2, p3])


def gw_step(theta_l, theta_r, params: SimParams, rand: float):
    """One stochastic step: returns (theta_l', theta_r', readout).

    The readout is drawn by inverse CDF in the order r = 0, 1, 2, 3 from a
    single uniform ``rand``; the no-click branch advances both angles by
    -Omega dt (rate form) and wraps, click branches write the canonical +pi
    and leave the partner angle unchanged.
    """
    p0, p1, p2, _ = gw_readout_probs(theta_l, theta_r, params.gamma1,
                                     params.gamma2, params.dt)
    if rand < p0:
        wl, wr = drift_rates(theta_l, theta_r, params.omega_s,
                             params.gamma1, params.gamma2)
        return (float(wrap_angle(theta_l - wl * params.dt)),
                float(wrap_angle(theta_r - wr * params.dt)), 0)
    if rand < p0 + p1:
        return PI, theta_r, 1
    if rand < p0 + p1 + p2:
        return theta_l, PI, 2
    return PI, PI, 3


def run_gw_ensemble(params: SimParams, indices=None, theta0=(PI, PI)):
    """Evolve many angle trajectories; returns (theta_l, theta_r, counts).

    ``indices`` defaults to 0..n_traj-1; passing an explicit array evolves
    exactly those trajectory indices of the (master_seed)-addressed ensemble.
    """
    if indices is None:
        indices = np.arange(params.n_traj, dtype=np.uint64)
    else:
        indices = np.asarray(indices, dtype=np.uint64)
    n = indices.shape[0]
    out_tl = np.empty(n)
    out_tr = np.empty(n)
    out_counts = np.empty((n, 4), dtype=np.int64)
    _kernels.gw_ensemble(np.uint64(params.master_seed), indices,
                         params.n_steps, params.omega_s,
                         params.gamma1, params.gamma2, params.dt,
                         float(theta0[0]), float(theta0[1]),
                         out_tl, out_tr, out_counts)
    return out_tl, out_tr, out_counts


def run_gw_trajectory(params: SimParams, traj_index: int) -> TrajectorySample:
    """Single trajectory from (pi, pi); same code path as the batch run."""
    tl, tr, counts = run_gw_ensemble(params, indices=[traj_index])
    return TrajectorySample(theta_l=float(tl[0]), theta_r=float(tr[0]),
                            entropy=0.0, fidelity=1.0,
                            readout_counts=tuple(int(c) for c in counts[0]))


def meanfield_ode_check(theta0, params: SimParams, t: float):
    """Integrate the no-click flow theta_dot = -Omega with fixed-step RK4.

    Serves as an oracle for chains of no-click ``gw_step`` updates: the Euler
    chain converges to this solution at first order in dt. Returns the
    wrapped angle pair at time ``t``.
    """
    n = max(1, int(math.ceil(t / params.dt - 1e-9)))
    h = t / n
    y = np.array([float(theta0[0]), float(theta0[1])])

    def rhs(y):
        wl, wr = drift_rates(y[0], y[1], params.omega_s,
                             params.gamma1, params.gamma2)
        return -np.array([wl, wr])

    for _ in range(n):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return wrap_angle(y)
