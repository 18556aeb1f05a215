"""Kinematics and nonlinear equations of motion of the 5-DoF boom crane.

Generalized coordinates q = [alpha, beta, d, theta1, theta2]:
    alpha   slew angle of the tower about the vertical axis   [rad]
    beta    luff angle of the boom in its vertical plane      [rad]
    d       rope length                                       [m]
    theta1  tangential payload sway                           [rad]
    theta2  radial payload sway                               [rad]

The model is assembled from the Lagrangian of three bodies: the tower
(inertia I_t about the vertical axis), the boom (point mass m_B at its
midpoint plus luffing inertia I_B), and the point-mass payload hanging
from the boom tip on a rigid rope.  The Coriolis matrix uses the
Christoffel construction, so dM/dt - 2C is skew-symmetric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels

CONDITION_LIMIT = 1e12

# maps the 3 actuator inputs onto the actuated rows of the equations
INPUT_MATRIX = np.vstack([np.eye(3), np.zeros((2, 3))])


class InvalidStateError(ValueError):
    """State violates d > 0 or |theta_i| < pi/2."""


class SingularInertiaError(RuntimeError):
    """Inertia matrix is numerically singular; the state assumptions failed."""


@dataclass(frozen=True)
class CraneParameters:
    """Physical constants of the crane. All strictly positive."""

    tower_inertia: float   # kg m^2, about the vertical axis
    boom_inertia: float    # kg m^2, luffing inertia of the boom
    boom_length: float     # m
    boom_mass: float       # kg
    payload_mass: float    # kg
    gravity: float = 9.81  # m/s^2

    def __post_init__(self):
        for name in ("tower_inertia", "boom_inertia", "boom_length",
                     "boom_mass", "payload_mass", "gravity"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")

    def packed(self) -> np.ndarray:
        return np.array([self.tower_inertia, self.boom_inertia,
                         self.boom_length, self.boom_mass,
                         self.payload_mass, self.gravity])


@dataclass(frozen=True)
class GeneralizedState:
    """Generalized coordinates and velocities (treated as immutable)."""

    q: np.ndarray
    qdot: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float).reshape(5).copy())
        object.__setattr__(self, "qdot", np.asarray(self.qdot, dtype=float).reshape(5).copy())

    @classmethod
    def from_values(cls, alpha=0.0, beta=0.0, rope_length=1.0, theta1=0.0, theta2=0.0,
                    alpha_dot=0.0, beta_dot=0.0, rope_length_dot=0.0,
                    theta1_dot=0.0, theta2_dot=0.0) -> "GeneralizedState":
        return cls(np.array([alpha, beta, rope_length, theta1, theta2]),
                   np.array([alpha_dot, beta_dot, rope_length_dot, theta1_dot, theta2_dot]))

    @property
    def alpha(self) -> float:
        return float(self.q[0])

    @property
    def beta(self) -> float:
        return float(self.q[1])

    @property
    def rope_length(self) -> float:
        return float(self.q[2])

    @property
    def theta1(self) -> float:
        return float(self.q[3])

    @property
    def theta2(self) -> float:
        return float(self.q[4])

    def is_valid(self) -> bool:
        return (np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.qdot))
                and self.q[2] > 0.0
                and abs(self.q[3]) < np.pi / 2 and abs(self.q[4]) < np.pi / 2)

    def validate(self) -> None:
        if not (np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.qdot))):
            raise InvalidStateError("state contains non-finite values")
        if not self.q[2] > 0.0:
            raise InvalidStateError(f"rope length must be positive, got {self.q[2]}")
        if abs(self.q[3]) >= np.pi / 2 or abs(self.q[4]) >= np.pi / 2:
            raise InvalidStateError(
                f"sway angles must satisfy |theta| < pi/2, got ({self.q[3]}, {self.q[4]})")


@dataclass(frozen=True)
class DynamicsMatrices:
    """M, C, G of M(q) qdd + C(q, qd) qd + G(q) = B u, plus the 3/2 block split."""

    M: np.ndarray
    C: np.ndarray
    G: np.ndarray

    @property
    def M11(self) -> np.ndarray:
        return self.M[:3, :3]

    @property
    def M12(self) -> np.ndarray:
        return self.M[:3, 3:]

    @property
    def M21(self) -> np.ndarray:
        return self.M[3:, :3]

    @property
    def M22(self) -> np.ndarray:
        return self.M[3:, 3:]

    @property
    def C11(self) -> np.ndarray:
        return self.C[:3, :3]

    @property
    def C12(self) -> np.ndarray:
        return self.C[:3, 3:]

    @property
    def C21(self) -> np.ndarray:
        return self.C[3:, :3]

    @property
    def C22(self) -> np.ndarray:
        return self.C[3:, 3:]

    @property
    def G1(self) -> np.ndarray:
        return self.G[:3]

    @property
    def G2(self) -> np.ndarray:
        return self.G[3:]


def payload_xyz(q, boom_length: float) -> np.ndarray:
    """Payload position from a raw coordinate 5-vector.

    Dtype-generic (evaluates on complex coordinates too), which the
    verification oracle exploits for exact directional derivatives.
    """
    alpha, beta, d, th1, th2 = q
    x = boom_length * np.cos(beta) + d * np.sin(th2)
    y = d * np.cos(th2) * np.sin(th1)
    z = boom_length * np.sin(beta) - d * np.cos(th1) * np.cos(th2)
    ca, sa = np.cos(alpha), np.sin(alpha)
    return np.array([ca * x - sa * y, sa * x + ca * y, z])


def boom_center_xyz(q, boom_length: float) -> np.ndarray:
    """Boom midpoint position from a raw coordinate 5-vector; dtype-generic."""
    alpha, beta = q[0], q[1]
    half = 0.5 * boom_length
    x = half * np.cos(beta)
    z = half * np.sin(beta)
    ca, sa = np.cos(alpha), np.sin(alpha)
    return np.array([ca * x, sa * x, z])


def payload_position(state: GeneralizedState, params: CraneParameters) -> np.ndarray:
    """World-frame payload position: boom tip plus rope vector."""
    return payload_xyz(state.q, params.boom_length)


def boom_center_position(state: GeneralizedState, params: CraneParameters) -> np.ndarray:
    """World-frame position of the boom midpoint."""
    return boom_center_xyz(state.q, params.boom_length)


def payload_jacobian(state: GeneralizedState, params: CraneParameters) -> np.ndarray:
    """3x5 world-frame Jacobian of payload_position w.r.t. q."""
    J_rot = _kernels.payload_jacobian_rot(state.q, params.packed())
    ca, sa = np.cos(state.q[0]), np.sin(state.q[0])
    Rz = np.array([[ca, -sa, 0.0], [sa, ca, 0.0], [0.0, 0.0, 1.0]])
    return Rz @ J_rot


def dynamics_matrices(state: GeneralizedState, params: CraneParameters) -> DynamicsMatrices:
    """Evaluate M(q), C(q, qd), G(q)."""
    state.validate()
    M, C, G = _kernels.eval_matrices(state.q, state.qdot, params.packed())
    return DynamicsMatrices(M=M, C=C, G=G)


def forward_dynamics(state: GeneralizedState, u, f_ext, params: CraneParameters) -> np.ndarray:
    """Accelerations from M qdd = B u + f_ext - C qd - G (exact linear solve)."""
    state.validate()
    u = np.zeros(3) if u is None else np.asarray(u, dtype=float).reshape(3)
    f_ext = np.zeros(5) if f_ext is None else np.asarray(f_ext, dtype=float).reshape(5)
    M, C, G = _kernels.eval_matrices(state.q, state.qdot, params.packed())
    cond = np.linalg.cond(M)
    if not cond < CONDITION_LIMIT:
        raise SingularInertiaError(
            f"inertia matrix condition number {cond:.3e} exceeds {CONDITION_LIMIT:.0e}")
    return np.linalg.solve(M, INPUT_MATRIX @ u + f_ext - C @ state.qdot - G)


def total_energy(state: GeneralizedState, params: CraneParameters) -> float:
    """Kinetic plus potential energy, datum at the boom pivot height."""
    return float(_kernels.total_energy(state.q, state.qdot, params.packed()))


def potential_energy(state: GeneralizedState, params: CraneParameters) -> float:
    return float(_kernels.potential_energy(state.q, params.packed()))
