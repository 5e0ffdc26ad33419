"""Simulation parameters shared by all backends."""

import math
from dataclasses import dataclass, replace

from .errors import ValidationError

#: upper bound on dt * omega_s enforcing dt << 1/omega_s
DT_OMEGA_MAX = 1e-2


@dataclass(frozen=True)
class SimParams:
    """Physical and numerical parameters of a monitored-dimer run.

    Times are in units of 1/omega_s and rates in units of omega_s when
    omega_s = 1 (the default). ``gamma1`` is the one-site click rate (the
    same for both qubits), ``gamma2`` the two-site rate. The adimensional
    measurement strengths lambda_i = gamma_i / (4 omega_s) are derived,
    read-only properties.
    """

    omega_s: float = 1.0
    gamma1: float = 0.0
    gamma2: float = 0.0
    dt: float = 1e-3
    t_final: float = 20.0
    n_traj: int = 1
    master_seed: int = 0

    def __post_init__(self):
        if self.omega_s < 0:
            raise ValidationError(f"omega_s must be >= 0, got {self.omega_s}")
        if self.gamma1 < 0 or self.gamma2 < 0:
            raise ValidationError(
                f"rates must be >= 0, got gamma1={self.gamma1}, gamma2={self.gamma2}"
            )
        if self.dt <= 0:
            raise ValidationError(f"dt must be > 0, got {self.dt}")
        if self.dt * self.omega_s > DT_OMEGA_MAX * (1 + 1e-12):
            raise ValidationError(
                f"dt*omega_s = {self.dt * self.omega_s:g} exceeds {DT_OMEGA_MAX:g}; "
                "the step must satisfy dt << 1/omega_s. Reduce --dt."
            )
        if (2 * self.gamma1 + self.gamma2) * self.dt > 1:
            raise ValidationError(
                f"(2*gamma1 + gamma2)*dt = {(2 * self.gamma1 + self.gamma2) * self.dt:g} > 1: "
                "the no-click back-action is not positive semidefinite. Reduce dt."
            )
        if self.t_final <= 0:
            raise ValidationError(f"t_final must be > 0, got {self.t_final}")
        if self.n_traj < 1:
            raise ValidationError(f"n_traj must be >= 1, got {self.n_traj}")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ValidationError("master_seed must fit in an unsigned 64-bit integer")

    @classmethod
    def from_lambdas(cls, lambda1, lambda2, *, omega_s=1.0, **kwargs):
        """Build params from the adimensional strengths, gamma_i = 4 omega_s lambda_i."""
        if lambda1 < 0 or lambda2 < 0:
            raise ValidationError("lambda1 and lambda2 must be >= 0")
        return cls(
            omega_s=omega_s,
            gamma1=4.0 * omega_s * lambda1,
            gamma2=4.0 * omega_s * lambda2,
            **kwargs,
        )

    @property
    def lambda1(self) -> float:
        if self.omega_s == 0:
            raise ValidationError("lambda1 is undefined for omega_s = 0")
        return self.gamma1 / (4.0 * self.omega_s)

    @property
    def lambda2(self) -> float:
        if self.omega_s == 0:
            raise ValidationError("lambda2 is undefined for omega_s = 0")
        return self.gamma2 / (4.0 * self.omega_s)

    @property
    def n_steps(self) -> int:
        """ceil(t_final / dt), tolerant of roundoff in the quotient."""
        return int(math.ceil(self.t_final / self.dt - 1e-9))

    def with_(self, **kwargs) -> "SimParams":
        return replace(self, **kwargs)
