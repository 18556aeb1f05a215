"""Reduced actuated dynamics and the swing-damping feedback-linearizing law.

Eliminating the unactuated accelerations through the Schur complement of
the inertia matrix gives

    Mbar qdd1 + Cbar1 qd1 + Cbar2 qd2 + Gbar = U,

which the control input U = Mbar v + Cbar1 qd1 + Cbar2 qd2 + Gbar turns
into qdd1 = v exactly.  The auxiliary input v combines set-point tracking
on the actuated states with a weighted feedback of the sway states:

    v = q1d_dd - K_ad (qd1 - q1d_d) - K_ap (q1 - q1d) - W (K_ud qd2 + K_up q2)

where W is the 3x2 weighting matrix with entries w1 (slew/tangential) and
w2 (luff/radial); w2 may track sign(beta) so the radial sway feedback acts
in the right direction on either side of the vertical.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .dynamics import (CraneParameters, DynamicsMatrices, GeneralizedState,
                       SingularInertiaError)

M22_CONDITION_LIMIT = 1e12

SIGN_OF_BETA = "sign(beta)"


@dataclass(frozen=True)
class ControllerGains:
    """Diagonal gain sets plus the sway weighting entries.

    Gains must be non-negative; strict positivity of all four sets is what
    the stability analysis requires for an asymptotically stable closed
    loop (zero gains are allowed here so the open-loop limits remain
    expressible).
    """

    k_ad: np.ndarray            # actuated damping, 3 diagonals
    k_ap: np.ndarray            # actuated proportional, 3 diagonals
    k_ud: np.ndarray            # sway damping, 2 diagonals
    k_up: np.ndarray            # sway proportional, 2 diagonals
    alpha1: float = -1.0
    alpha2: float | str = SIGN_OF_BETA

    def __post_init__(self):
        object.__setattr__(self, "k_ad", np.asarray(self.k_ad, dtype=float).reshape(3).copy())
        object.__setattr__(self, "k_ap", np.asarray(self.k_ap, dtype=float).reshape(3).copy())
        object.__setattr__(self, "k_ud", np.asarray(self.k_ud, dtype=float).reshape(2).copy())
        object.__setattr__(self, "k_up", np.asarray(self.k_up, dtype=float).reshape(2).copy())
        for name in ("k_ad", "k_ap", "k_ud", "k_up"):
            if np.any(getattr(self, name) < 0.0):
                raise ValueError(f"{name} entries must be non-negative")
        if isinstance(self.alpha2, str) and self.alpha2 != SIGN_OF_BETA:
            raise ValueError(f"alpha2 must be a number or {SIGN_OF_BETA!r}")

    def alpha2_at(self, beta: float) -> float:
        """Resolve the radial weighting entry at a luff angle; sign(0) = 0."""
        if isinstance(self.alpha2, str):
            return float(np.sign(beta))
        return float(self.alpha2)

    def weighting(self, beta: float) -> np.ndarray:
        """The 3x2 sway weighting matrix at a given luff angle."""
        W = np.zeros((3, 2))
        W[0, 0] = self.alpha1
        W[1, 1] = self.alpha2_at(beta)
        return W

    def packed(self) -> np.ndarray:
        """Flat layout consumed by the jitted kernels."""
        if isinstance(self.alpha2, str):
            a2_value, a2_mode = 0.0, 1.0
        else:
            a2_value, a2_mode = float(self.alpha2), 0.0
        return np.concatenate([self.k_ad, self.k_ap, self.k_ud, self.k_up,
                               [self.alpha1, a2_value, a2_mode]])


@dataclass(frozen=True)
class Reference:
    """Actuated set-point [alpha_d, beta_d, d_d] with optional feedforward."""

    q1d: np.ndarray
    q1d_dot: np.ndarray = field(default_factory=lambda: np.zeros(3))
    q1d_ddot: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "q1d", np.asarray(self.q1d, dtype=float).reshape(3).copy())
        object.__setattr__(self, "q1d_dot", np.asarray(self.q1d_dot, dtype=float).reshape(3).copy())
        object.__setattr__(self, "q1d_ddot", np.asarray(self.q1d_ddot, dtype=float).reshape(3).copy())
        if not self.q1d[2] > 0.0:
            raise ValueError(f"desired rope length must be positive, got {self.q1d[2]}")

    def packed(self) -> np.ndarray:
        return np.concatenate([self.q1d, self.q1d_dot, self.q1d_ddot])


@dataclass(frozen=True)
class ReducedDynamics:
    """Schur-complement terms of the actuated subsystem."""

    Mbar: np.ndarray
    Cbar1: np.ndarray
    Cbar2: np.ndarray
    Gbar: np.ndarray


def reduced_dynamics(dm: DynamicsMatrices) -> ReducedDynamics:
    """Eliminate the sway accelerations from the actuated equations."""
    m44, m55 = dm.M[3, 3], dm.M[4, 4]
    small, big = sorted((abs(m44), abs(m55)))
    if small == 0.0 or big / small > M22_CONDITION_LIMIT:
        raise SingularInertiaError(
            f"sway inertia block is ill-conditioned (m44={m44:.3e}, m55={m55:.3e})")
    Mbar, Cbar1, Cbar2, Gbar = _kernels.reduced_terms(dm.M, dm.C, dm.G)
    return ReducedDynamics(Mbar=Mbar, Cbar1=Cbar1, Cbar2=Cbar2, Gbar=Gbar)


def auxiliary_input(state: GeneralizedState, ref: Reference,
                    gains: ControllerGains) -> np.ndarray:
    """The designed actuated acceleration v (see module docstring)."""
    return _kernels.auxiliary_input(state.q, state.qdot, gains.packed(), ref.packed())


def control_input(state: GeneralizedState, rd: ReducedDynamics, v) -> np.ndarray:
    """Actuator forces that realize qdd1 = v on the reduced dynamics."""
    v = np.asarray(v, dtype=float).reshape(3)
    return rd.Mbar @ v + rd.Cbar1 @ state.qdot[:3] + rd.Cbar2 @ state.qdot[3:] + rd.Gbar


@dataclass(frozen=True)
class SwingDampingController:
    """Stateless position controller with active sway damping.

    Callable as ``controller(t, state) -> u`` for use with the simulator.
    """

    params: CraneParameters
    gains: ControllerGains
    reference: Reference

    def __call__(self, t: float, state: GeneralizedState) -> np.ndarray:
        M, C, G = _kernels.eval_matrices(state.q, state.qdot, self.params.packed())
        return _kernels.control_force(state.q, state.qdot, M, C, G,
                                      self.gains.packed(), self.reference.packed())


def hold_position_controller(params: CraneParameters,
                             rope_length: float = 1.0) -> SwingDampingController:
    """Zero-gain controller: v = 0, so the actuated coordinates are pinned.

    Useful for isolating the sway subsystem (the payload then behaves as a
    pendulum on a frozen support).
    """
    gains = ControllerGains(k_ad=np.zeros(3), k_ap=np.zeros(3),
                            k_ud=np.zeros(2), k_up=np.zeros(2),
                            alpha1=0.0, alpha2=0.0)
    ref = Reference(q1d=np.array([0.0, 0.0, rope_length]))
    return SwingDampingController(params=params, gains=gains, reference=ref)
