"""Fixed-size linear algebra for the two-qubit dimer Hilbert space.

Basis order is |00>, |01>, |10>, |11> with the left qubit as the most
significant bit. States are length-4 complex vectors, operators 4x4 complex
matrices; everything here is a pure function of its inputs.

Single-qubit states confined to the y-z Bloch plane are parametrized as
|theta> = cos(theta/2)|0> + i sin(theta/2)|1> with theta in (-pi, pi],
so that |0> sits at theta = 0 and |1> at theta = pi.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import UndefinedAngleError, ValidationError

DIM = 4

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# projector onto the clicked (|1>) state of one site
N_SITE = np.array([[0, 0], [0, 1]], dtype=complex)

N_L = np.kron(N_SITE, I2)
N_R = np.kron(I2, N_SITE)
N_B = N_L @ N_R

#: tolerance below which a Bloch direction counts as undefined
ANGLE_EPS = 1e-14


def hamiltonian(omega_s: float) -> np.ndarray:
    """Two-qubit drive H = omega_s (sigma_x (x) I + I (x) sigma_x)."""
    return omega_s * (np.kron(SIGMA_X, I2) + np.kron(I2, SIGMA_X))


def single_qubit_state(theta: float) -> np.ndarray:
    return np.array([math.cos(theta / 2), 1j * math.sin(theta / 2)], dtype=complex)


def product_state(theta_l: float, theta_r: float) -> np.ndarray:
    """Product state |theta_l>|theta_r> as a 4-vector."""
    return np.kron(single_qubit_state(theta_l), single_qubit_state(theta_r))


def normalize(state: np.ndarray) -> np.ndarray:
    nrm = np.linalg.norm(state)
    if nrm < 1e-12:
        raise ValidationError("cannot normalize a (near-)zero state vector")
    return state / nrm


def _check_normalized(state, tol=1e-9):
    nrm = np.linalg.norm(state)
    if abs(nrm - 1.0) > tol:
        raise ValidationError(f"state norm deviates from 1 by {abs(nrm - 1.0):.3e}")


@dataclass(frozen=True)
class KrausSet:
    """The four measurement back-actions of one monitoring step.

    m1, m2 are the one-site click operators (rate gamma1 each), m3 the
    two-site click (rate gamma2) and m0 the no-click complement; together
    they satisfy sum_r m_r^dag m_r = identity.
    """

    m0: np.ndarray
    m1: np.ndarray
    m2: np.ndarray
    m3: np.ndarray
    gamma1: float
    gamma2: float
    dt: float

    @property
    def operators(self):
        return (self.m0, self.m1, self.m2, self.m3)


def build_kraus(gamma1: float, gamma2: float, dt: float) -> KrausSet:
    """Back-action operators at click probabilities p1 = gamma1*dt, p2 = gamma2*dt.

    The no-click operator is the elementwise square root of the diagonal
    I - p1*n_L - p1*n_R - p2*n_L n_R; all click operators are projector
    multiples, so the set is complete by construction.
    """
    if gamma1 < 0 or gamma2 < 0:
        raise ValidationError("rates must be >= 0")
    if dt <= 0:
        raise ValidationError("dt must be > 0")
    p1 = gamma1 * dt
    p2 = gamma2 * dt
    if 2 * p1 + p2 > 1:
        raise ValidationError(
            f"(2*gamma1 + gamma2)*dt = {2 * p1 + p2:g} > 1: no-click operand "
            "is not positive semidefinite (dt too large for these rates)"
        )
    m1 = np.sqrt(p1) * N_L
    m2 = np.sqrt(p1) * N_R
    m3 = np.sqrt(p2) * N_B
    m0_diag = np.sqrt(np.array([1.0, 1.0 - p1, 1.0 - p1, 1.0 - 2 * p1 - p2]))
    m0 = np.diag(m0_diag).astype(complex)
    return KrausSet(m0=m0, m1=m1, m2=m2, m3=m3, gamma1=gamma1, gamma2=gamma2, dt=dt)


def detector_kraus(j1: float, j2: float, dt: float) -> list:
    """Exact ancilla-model back-actions M_(i,j,k) for one monitoring interval.

    Three detector qubits couple to n_L, n_R and n_L n_R with strengths j1,
    j1 and j2; the returned list is indexed by the detector outcome triple
    (i, j, k) in binary order, M[4i + 2j + k]. The trigonometric factors are
    kept exact (no small-dt truncation), so completeness over all eight
    outcomes is an identity. In the continuous-monitoring limit
    j_i = sqrt(gamma_i / dt), the single-click outcomes reduce to the
    operators of :func:`build_kraus` at leading order.
    """
    if j1 < 0 or j2 < 0:
        raise ValidationError("couplings must be >= 0")
    if dt <= 0:
        raise ValidationError("dt must be > 0")
    c1, s1 = math.cos(j1 * dt), math.sin(j1 * dt)
    c2, s2 = math.cos(j2 * dt), math.sin(j2 * dt)
    # single-detector factors on the dimer diagonal
    d_l = {0: np.array([1, 1, c1, c1]), 1: np.array([0, 0, s1, s1])}
    d_r = {0: np.array([1, c1, 1, c1]), 1: np.array([0, s1, 0, s1])}
    d_b = {0: np.array([1, 1, 1, c2]), 1: np.array([0, 0, 0, s2])}
    out = []
    for i in (0, 1):
        for j in (0, 1):
            for k in (0, 1):
                out.append(np.diag(d_l[i] * d_r[j] * d_b[k]).astype(complex))
    return out


def propagator(omega_s: float, dt: float) -> np.ndarray:
    """Exact U = exp(-i H dt) as the tensor product of single-qubit rotations."""
    c, s = math.cos(omega_s * dt), math.sin(omega_s * dt)
    rot = c * I2 - 1j * s * SIGMA_X
    return np.kron(rot, rot)


def born_probabilities(state: np.ndarray, kraus: KrausSet) -> np.ndarray:
    """Born probabilities p_r = <psi| M_r^dag M_r |psi> for r = 0..3."""
    _check_normalized(state)
    probs = np.array([np.linalg.norm(m @ state) ** 2 for m in kraus.operators])
    return probs


@dataclass(frozen=True)
class ReducedBloch:
    """Bloch vector and purity of a one-site reduced density matrix."""

    x: float
    y: float
    z: float
    purity: float

    @property
    def length(self) -> float:
        return math.sqrt(self.x**2 + self.y**2 + self.z**2)


def _reduced_density(state, site):
    psi = np.asarray(state, dtype=complex).reshape(2, 2)
    if site == "L":
        return psi @ psi.conj().T
    if site == "R":
        return psi.T @ psi.conj()
    raise ValidationError(f"site must be 'L' or 'R', got {site!r}")


def reduced_bloch(state: np.ndarray, site: str) -> ReducedBloch:
    """Bloch components of the reduced density matrix of one site."""
    _check_normalized(state)
    rho = _reduced_density(state, site)
    x = 2 * rho[0, 1].real
    y = -2 * rho[0, 1].imag
    z = (rho[0, 0] - rho[1, 1]).real
    purity = 0.5 * (1 + x * x + y * y + z * z)
    return ReducedBloch(x=x, y=y, z=z, purity=purity)


def bloch_angle(b: ReducedBloch) -> float:
    """Angle theta = atan2(y, z) in (-pi, pi], with -pi folded onto +pi."""
    if b.y**2 + b.z**2 <= ANGLE_EPS:
        raise UndefinedAngleError(
            "Bloch vector has no y-z component; the angle is undefined"
        )
    theta = math.atan2(b.y, b.z)
    if theta <= -math.pi:
        theta = math.pi
    return theta


def entanglement_entropy(state: np.ndarray) -> float:
    """Base-2 von Neumann entropy of the left reduced density matrix.

    For a pure two-qubit state the reduced spectrum is (1 +- |b|)/2 with |b|
    the Bloch length; eigenvalues in [-1e-12, 0) are clamped to 0 and
    0*log(0) is taken as 0. Result lies in [0, 1] bits.
    """
    _check_normalized(state)
    b = reduced_bloch(state, "L")
    blen = min(b.length, 1.0)
    ent = 0.0
    for mu in (0.5 * (1 + blen), 0.5 * (1 - blen)):
        if mu < 0:
            if mu < -1e-12:
                raise ValidationError(f"reduced eigenvalue {mu} below clamp window")
            mu = 0.0
        if mu > 0.0:
            ent -= mu * math.log2(mu)
    return ent
