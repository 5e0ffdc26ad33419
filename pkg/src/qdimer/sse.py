"""Quantum-state-diffusion backend: continuous Gaussian unraveling of the
same master equation as the jump dynamics.

The monitored operators are fixed by the model: O1 = n_L and O2 = n_R at
rate gamma1 each, O3 = n_L n_R at rate gamma2; the Wiener increments obey
<dW_r dW_r'> = gamma_r dt delta_rr'. The integrator is Euler-Maruyama with
explicit renormalization after every step.
"""

import math

import numpy as np

from . import _kernels, quantum
from .errors import NumericalError
from .exact import TrajectorySample, gutzwiller_fidelity
from .params import SimParams

PI = math.pi

#: SseParams carries no fields beyond SimParams; the operators are fixed.
SseParams = SimParams

#: diagonal eigenvalues of the three monitored operators, basis |00>,|01>,|10>,|11>
SSE_OPERATOR_DIAGONALS = (
    np.array([0.0, 0.0, 1.0, 1.0]),  # n_L
    np.array([0.0, 1.0, 0.0, 1.0]),  # n_R
    np.array([0.0, 0.0, 0.0, 1.0]),  # n_L n_R
)


def sse_step(state, params: SimParams, noise):
    """One Euler-Maruyama update from three standard normal draws.

    d|psi> = -i H dt |psi| - (dt/2) sum_r gamma_r (O_r - <O_r>)^2 |psi>
             + sum_r dW_r (O_r - <O_r>) |psi>,  dW_r = sqrt(gamma_r dt) z_r,
    followed by renormalization.
    """
    psi = np.asarray(state, dtype=complex)
    rates = (params.gamma1, params.gamma1, params.gamma2)
    h = quantum.hamiltonian(params.omega_s)
    d = -1j * params.dt * (h @ psi)
    for diag, g, z in zip(SSE_OPERATOR_DIAGONALS, rates, noise):
        exp = float(np.sum(diag * np.abs(psi) ** 2))
        shifted = diag - exp
        d += (-0.5 * params.dt * g) * (shifted**2) * psi
        d += math.sqrt(g * params.dt) * z * shifted * psi
    new = psi + d
    nrm = np.linalg.norm(new)
    if nrm < 1e-12:
        raise NumericalError(f"norm collapsed to {nrm:.3e} before renormalization")
    return new / nrm


def run_sse_ensemble(params: SimParams, indices=None, theta0=(PI, PI),
                     record_stride=0):
    """Evolve many diffusion trajectories; see :func:`qdimer.exact.run_exact_ensemble`
    for the output layout (no readout counts: the record is continuous)."""
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
    }
    status = np.empty(n, dtype=np.uint8)
    nl = np.empty((n, n_rec)) if n_rec else np.empty((0, 0))
    _kernels.sse_ensemble(np.uint64(params.master_seed), indices,
                          params.n_steps, params.omega_s,
                          params.gamma1, params.gamma2, params.dt,
                          float(theta0[0]), float(theta0[1]),
                          out["theta_l"], out["theta_r"],
                          out["entropy"], out["fidelity"], status,
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


def run_sse_trajectory(params: SimParams, traj_index: int) -> TrajectorySample:
    """One diffusion trajectory from |11>; deterministic in (master_seed, index)."""
    res = run_sse_ensemble(params, indices=[traj_index])
    return TrajectorySample(theta_l=float(res["theta_l"][0]),
                            theta_r=float(res["theta_r"][0]),
                            entropy=float(res["entropy"][0]),
                            fidelity=float(res["fidelity"][0]),
                            readout_counts=(0, 0, 0, 0))


__all__ = ["SseParams", "SSE_OPERATOR_DIAGONALS", "sse_step",
           "run_sse_ensemble", "run_sse_trajectory", "gutzwiller_fidelity"]
