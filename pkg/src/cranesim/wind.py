"""Trapezoidal wind gusts acting on the payload as an aerodynamic drag force.

The gust speed ramps linearly up, holds, and ramps back down.  The drag
magnitude is 0.5 * rho * V^2 * A_w * C_D; the force direction is either a
fixed world-frame vector or one of two symbolic tags resolved against the
current slew angle each step: ``tangential`` (y-axis of the slew-rotating
frame) and ``radial`` (its x-axis).  The force maps onto the generalized
coordinates through the payload Jacobian (virtual work).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dynamics import CraneParameters, GeneralizedState

log = logging.getLogger(__name__)

TANGENTIAL = "tangential"
RADIAL = "radial"

# typical gust envelope; values outside are accepted but flagged
GUST_DURATION_RANGE = (2.0, 7.0)   # s
GUST_SPEED_RANGE = (4.0, 20.0)     # m/s


@dataclass(frozen=True)
class GustProfile:
    """One trapezoidal gust: zero outside [start_time, start_time + total]."""

    start_time: float
    ramp_up: float
    plateau: float
    ramp_down: float
    peak_speed: float
    direction: object = TANGENTIAL   # tag or world-frame 3-vector

    def __post_init__(self):
        if min(self.ramp_up, self.plateau, self.ramp_down) < 0.0:
            raise ValueError("gust phase durations must be non-negative")
        if isinstance(self.direction, str):
            if self.direction not in (TANGENTIAL, RADIAL):
                raise ValueError(
                    f"direction must be {TANGENTIAL!r}, {RADIAL!r} or a 3-vector")
        else:
            vec = np.asarray(self.direction, dtype=float).reshape(3)
            norm = np.linalg.norm(vec)
            if norm == 0.0:
                raise ValueError("direction vector must be non-zero")
            object.__setattr__(self, "direction", vec / norm)
        total = self.ramp_up + self.plateau + self.ramp_down
        lo, hi = GUST_DURATION_RANGE
        if not lo <= total <= hi:
            log.warning("gust duration %.2f s outside the typical %g-%g s envelope",
                        total, lo, hi)
        lo, hi = GUST_SPEED_RANGE
        if not lo <= self.peak_speed <= hi:
            log.warning("gust peak speed %.2f m/s outside the typical %g-%g m/s envelope",
                        self.peak_speed, lo, hi)

    @property
    def total_duration(self) -> float:
        return self.ramp_up + self.plateau + self.ramp_down

    def packed(self) -> np.ndarray:
        if isinstance(self.direction, str):
            mode = 1.0 if self.direction == TANGENTIAL else 2.0
            dx = dy = dz = 0.0
        else:
            mode = 0.0
            dx, dy, dz = self.direction
        return np.array([self.start_time, self.ramp_up, self.plateau,
                         self.ramp_down, self.peak_speed, mode, dx, dy, dz])


@dataclass(frozen=True)
class DragConfig:
    """Aerodynamic drag model: air density, exposed area, drag coefficient."""

    rho: float = 1.225   # kg/m^3, sea-level air
    area: float = 0.5    # m^2 exposed to the wind
    drag_coefficient: float = 1.05

    def __post_init__(self):
        for name in ("rho", "area", "drag_coefficient"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")

    def packed(self) -> np.ndarray:
        return np.array([self.rho, self.area, self.drag_coefficient])


def wind_speed(t: float, profile: GustProfile) -> float:
    """Piecewise-linear trapezoid speed at time t."""
    return float(_kernels.wind_speed(t, profile.packed()))


def drag_force(t: float, profile: GustProfile, cfg: DragConfig,
               alpha: float = 0.0) -> np.ndarray:
    """World-frame drag force at time t.

    ``alpha`` is the slew angle used to resolve the symbolic tangential /
    radial direction tags; it is ignored for fixed-vector directions.
    """
    F_rot = _kernels.wind_force_rot(t, alpha, profile.packed(), cfg.packed())
    return _kernels.rot_to_world(alpha, F_rot)


def generalized_force(state: GeneralizedState, F, params: CraneParameters) -> np.ndarray:
    """Map a world-frame force on the payload to generalized forces: J^T F."""
    F = np.asarray(F, dtype=float).reshape(3)
    J_rot = _kernels.payload_jacobian_rot(state.q, params.packed())
    ca, sa = np.cos(state.q[0]), np.sin(state.q[0])
    # rotate the force into the slew frame instead of the Jacobian out of it
    F_rot = np.array([ca * F[0] + sa * F[1], -sa * F[0] + ca * F[1], F[2]])
    return J_rot.T @ F_rot


@dataclass(frozen=True)
class WindDisturbance:
    """Gust profile plus drag model, bundled for the simulator."""

    profile: GustProfile
    drag: DragConfig

    def force(self, t: float, state: GeneralizedState) -> np.ndarray:
        return drag_force(t, self.profile, self.drag, alpha=state.q[0])

    def generalized(self, t: float, state: GeneralizedState,
                    params: CraneParameters) -> np.ndarray:
        return generalized_force(state, self.force(t, state), params)
