"""Full 4-dimensional quantum-jump trajectories and per-trajectory observables."""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels, quantum
from .errors import NumericalError, UndefinedAngleError
from .params import SimParams

PI = math.pi


@dataclass(frozen=True)
class TrajectorySample:
    """Final-time record of one trajectory.

    ``theta_l``, ``theta_r`` are the reduced-Bloch angles, ``entropy`` the
    entanglement entropy in bits, ``fidelity`` the overlap with the product
    state at those angles. Angles and fidelity are NaN when a reduced Bloch
    direction is degenerate (maximally mixed marginal); such samples are
    counted and excluded by :func:`ensemble_averages`.
    """

    theta_l: float
    theta_r: float
    entropy: float
    fidelity: float
    readout_counts: tuple

    @property
    def angles(self):
        return (self.theta_l, self.theta_r)


def jump_step(state, kraus: quantum.KrausSet, u, rand: float):
    """One measurement step: phi = U psi, readout drawn from the Born
    probabilities of phi by inverse CDF in the order r = 0, 1, 2, 3, state
    replaced by the normalized M_r phi. Returns (state', r)."""
    phi = u @ state
    probs = quantum.born_probabilities(phi, kraus)
    total = probs.sum()
    x = rand * total
    acc = 0.0
    r = 3
    for i in range(4):
        acc += probs[i]
        if x < acc:
            r = i
            break
    if probs[r] < 1e-15:
        raise NumericalError(
            f"readout {r} selected with probability {probs[r]:.3e} < 1e-15"
        )
    post = kraus.operators[r] @ phi
    return post / np.linalg.norm(post), r


def gutzwiller_fidelity(state) -> float:
    """Overlap |<theta_l, theta_r | psi>|^2 with the product state along the
    reduced Bloch directions of each site.

    The angles are the marginals' own Bloch angles, not an optimized fit;
    raises :class:`UndefinedAngleError` when a marginal is maximally mixed.
    """
    tl = quantum.bloch_angle(quantum.reduced_bloch(state, "L"))
    tr = quantum.bloch_angle(quantum.reduced_bloch(state, "R"))
    ov = np.vdot(quantum.product_state(tl, tr), np.asarray(state, dtype=complex))
    return min(float(abs(ov) ** 2), 1.0)


def run_exact_ensemble(params: SimParams, indices=None, theta0=(PI, PI),
                       record_stride=0):
    """Evolve many jump trajectories in parallel.

    Returns a dict with final-time arrays ``theta_l``, ``theta_r``,
    ``entropy``, ``fidelity``, per-trajectory readout ``counts`` (n, 4), and,
    when ``record_stride`` > 0, the fixed-stride time series ``n_l`` of the
    left-site population (n, n_steps // record_stride).

    Raises :class:`NumericalError` with the offending trajectory index if any
    trajectory hits a zero-probability branch or a norm collapse.
    """
    if indices is None:
        indices = np.arange(params.n_traj, dtype=np.uint64)
    else:
        indices = np.asarray(indices, dtype=np.uint64)
    n = indices.shape[0]
    n_rec = params.n_steps // record_stride if record_stride > 0 else 0
    out = {
        "theta_l": np.empty(n),
        "theta_r": np.empty(n),
        "entropy": np.empty(n),
        "fidelity": np.empty(n),
        "counts": np.empty((n, 4), dtype=np.int64),
    }
    status = np.empty(n, dtype=np.uint8)
    nl = np.empty((n, n_rec)) if n_rec else np.empty((0, 0))
    _kernels.exact_ensemble(np.uint64(params.master_seed), indices,
                            params.n_steps, params.omega_s,
                            params.gamma1, params.gamma2, params.dt,
                            float(theta0[0]), float(theta0[1]),
                            out["theta_l"], out["theta_r"],
                            out["entropy"], out["fidelity"],
                            out["counts"], status,
                            record_stride, nl)
    bad = np.nonzero(status)[0]
    if bad.size:
        k = int(bad[0])
        raise NumericalError(
            f"trajectory {int(indices[k])} failed with status {int(status[k])} "
            f"({bad.size} trajectories affected)"
        )
    if n_rec:
        out["n_l"] = nl
    return out


def run_exact_trajectory(params: SimParams, traj_index: int) -> TrajectorySample:
    """One trajectory from |11> (theta_l = theta_r = pi); deterministic in
    (master_seed, traj_index) and bit-identical to the batch entry."""
    res = run_exact_ensemble(params, indices=[traj_index])
    return TrajectorySample(theta_l=float(res["theta_l"][0]),
                            theta_r=float(res["theta_r"][0]),
                            entropy=float(res["entropy"][0]),
                            fidelity=float(res["fidelity"][0]),
                            readout_counts=tuple(int(c) for c in res["counts"][0]))


@dataclass(frozen=True)
class EnsembleStats:
    """Means and standard errors of fidelity and entanglement entropy."""

    f_mean: float
    f_se: float
    s_mean: float
    s_se: float
    n_samples: int
    n_excluded: int
    readout_totals: tuple


def _mean_se(values):
    values = np.asarray(values, dtype=float)
    m = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
    return m, se


def ensemble_averages(samples) -> EnsembleStats:
    """Arithmetic means and standard errors over samples.

    Accepts a list of :class:`TrajectorySample` or the dict returned by an
    ensemble run. Samples with undefined (NaN) fidelity are excluded from the
    fidelity average and reported in ``n_excluded``.
    """
    if isinstance(samples, dict):
        fid = np.asarray(samples["fidelity"], dtype=float)
        ent = np.asarray(samples["entropy"], dtype=float)
        counts = np.asarray(samples.get("counts", np.zeros((fid.size, 4))),
                            dtype=np.int64)
    else:
        samples = list(samples)
        if not samples:
            raise ValueError("ensemble_averages needs at least one sample")
        fid = np.array([s.fidelity for s in samples], dtype=float)
        ent = np.array([s.entropy for s in samples], dtype=float)
        counts = np.array([s.readout_counts for s in samples], dtype=np.int64)
    if fid.size == 0:
        raise ValueError("ensemble_averages needs at least one sample")
    good = ~np.isnan(fid)
    n_excluded = int((~good).sum())
    if not good.any():
        raise ValueError("all samples have undefined fidelity")
    f_mean, f_se = _mean_se(fid[good])
    s_mean, s_se = _mean_se(ent[~np.isnan(ent)])
    return EnsembleStats(f_mean=f_mean, f_se=f_se, s_mean=s_mean, s_se=s_se,
                         n_samples=int(fid.size), n_excluded=n_excluded,
                         readout_totals=tuple(int(x) for x in counts.sum(axis=0)))
