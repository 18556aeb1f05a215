"""Deterministic fixed-step closed-loop simulation with logging and metrics.

A run integrates the full 5-DoF model with classical RK4.  Control and
wind disturbance are re-evaluated at every internal stage; actuator
saturation clips the commanded input before it reaches the plant, also
per stage.  Runs are pure recurrences of the initial data, so identical
configurations produce bit-identical logs on one platform.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .controller import SwingDampingController, Reference
from .dynamics import CraneParameters, GeneralizedState
from .wind import WindDisturbance

TRAJECTORY_COLUMNS = [
    "t", "alpha", "beta", "d", "theta1", "theta2",
    "alpha_dot", "beta_dot", "d_dot", "theta1_dot", "theta2_dot",
    "u1_cmd", "u2_cmd", "u3_cmd", "u1_app", "u2_app", "u3_app",
    "Fw_x", "Fw_y", "Fw_z", "energy",
]

SETTLING_BAND = 0.02  # fraction of the commanded change

_NO_CTRL = np.zeros(13)
_NO_REF = np.zeros(9)
_NO_REF[2] = 1.0
_NO_WIND = np.zeros(9)
_NO_DRAG = np.array([1.0, 1.0, 1.0])


class SimulationAbort(RuntimeError):
    """A run left the model's validity region; carries the failure point."""

    def __init__(self, message: str, t: float, q: np.ndarray, qdot: np.ndarray):
        super().__init__(message)
        self.t = t
        self.q = q
        self.qdot = qdot


@dataclass(frozen=True)
class SimulationConfig:
    dt: float
    duration: float
    initial_state: GeneralizedState
    saturation: np.ndarray | None = None   # per-input bounds, NaN/inf = unbounded
    disturbance: WindDisturbance | None = None
    record_stride: int = 1

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError("dt must be positive")
        if not self.duration >= self.dt:
            raise ValueError("duration must be at least one step")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")
        if self.saturation is not None:
            sat = np.asarray(self.saturation, dtype=float).reshape(3).copy()
            sat[np.isnan(sat)] = np.inf
            if np.any(sat <= 0.0):
                raise ValueError("saturation bounds must be positive")
            object.__setattr__(self, "saturation", sat)

    def saturation_packed(self) -> np.ndarray:
        if self.saturation is None:
            return np.full(3, np.inf)
        return self.saturation


@dataclass(frozen=True)
class TrajectoryLog:
    """Time-indexed record of one run."""

    t: np.ndarray        # (n,)
    q: np.ndarray        # (n, 5)
    qdot: np.ndarray     # (n, 5)
    u_cmd: np.ndarray    # (n, 3)
    u_app: np.ndarray    # (n, 3)
    wind_force: np.ndarray  # (n, 3) world frame
    energy: np.ndarray   # (n,)

    def __len__(self) -> int:
        return len(self.t)

    def state_at(self, i: int) -> GeneralizedState:
        return GeneralizedState(self.q[i], self.qdot[i])

    def write_csv(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(TRAJECTORY_COLUMNS)
            for i in range(len(self.t)):
                row = ([self.t[i]] + list(self.q[i]) + list(self.qdot[i])
                       + list(self.u_cmd[i]) + list(self.u_app[i])
                       + list(self.wind_force[i]) + [self.energy[i]])
                w.writerow([f"{x:.17g}" for x in row])

    @classmethod
    def read_csv(cls, path) -> "TrajectoryLog":
        data = np.genfromtxt(path, delimiter=",", skip_header=1)
        data = np.atleast_2d(data)
        if data.shape[1] != len(TRAJECTORY_COLUMNS):
            raise ValueError(f"expected {len(TRAJECTORY_COLUMNS)} columns, "
                             f"got {data.shape[1]}")
        return cls(t=data[:, 0], q=data[:, 1:6], qdot=data[:, 6:11],
                   u_cmd=data[:, 11:14], u_app=data[:, 14:17],
                   wind_force=data[:, 17:20], energy=data[:, 20])


def _pack_run_args(controller, disturbance, params: CraneParameters):
    p = params.packed()
    if controller is None:
        has_ctrl, ctrl, ref = False, _NO_CTRL, _NO_REF
    elif isinstance(controller, SwingDampingController):
        has_ctrl = True
        ctrl = controller.gains.packed()
        ref = controller.reference.packed()
    else:
        raise TypeError("controller must be a SwingDampingController or None")
    if disturbance is None:
        has_wind, wind, drag = False, _NO_WIND, _NO_DRAG
    elif isinstance(disturbance, WindDisturbance):
        has_wind = True
        wind = disturbance.profile.packed()
        drag = disturbance.drag.packed()
    else:
        raise TypeError("disturbance must be a WindDisturbance or None")
    return p, has_ctrl, ctrl, ref, has_wind, wind, drag


def step(state: GeneralizedState, controller, disturbance,
         params: CraneParameters, dt: float, t: float = 0.0,
         saturation=None) -> GeneralizedState:
    """One RK4 step of the closed loop starting at time t."""
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    state.validate()
    p, has_ctrl, ctrl, ref, has_wind, wind, drag = _pack_run_args(
        controller, disturbance, params)
    sat = np.full(3, np.inf) if saturation is None else \
        np.asarray(saturation, dtype=float).reshape(3)
    try:
        q, qd = _kernels.rk4_step(t, state.q, state.qdot, dt, p,
                                  has_ctrl, ctrl, ref, sat, has_wind, wind, drag)
    except np.linalg.LinAlgError as exc:
        raise SimulationAbort(
            f"inertia matrix became singular during the step at t={t:.6g} s",
            t, state.q, state.qdot) from exc
    status = _kernels.state_status(q, qd)
    if status != _kernels.OK:
        raise SimulationAbort(_status_message(status, t + dt, q), t + dt, q, qd)
    return GeneralizedState(q, qd)


def _status_message(status: int, t: float, q: np.ndarray) -> str:
    if status == _kernels.NOT_FINITE:
        return f"state became non-finite at t={t:.6g} s"
    if q[2] <= 0.0:
        return f"rope length reached {q[2]:.6g} m at t={t:.6g} s"
    return (f"sway angle left |theta| < pi/2 at t={t:.6g} s "
            f"(theta1={q[3]:.4g}, theta2={q[4]:.4g})")


def run(config: SimulationConfig, controller, params: CraneParameters) -> TrajectoryLog:
    """Integrate the closed loop and return the sampled trajectory."""
    config.initial_state.validate()
    p, has_ctrl, ctrl, ref, has_wind, wind, drag = _pack_run_args(
        controller, config.disturbance, params)
    sat = config.saturation_packed()

    n_steps = int(round(config.duration / config.dt))
    stride = config.record_stride
    n_samples = n_steps // stride + 1

    T = np.empty(n_samples)
    Q = np.empty((n_samples, 5))
    QD = np.empty((n_samples, 5))
    UC = np.empty((n_samples, 3))
    UA = np.empty((n_samples, 3))
    FW = np.empty((n_samples, 3))
    EN = np.empty(n_samples)

    try:
        status, fail_step, q_end, qd_end = _kernels.run_loop(
            config.initial_state.q, config.initial_state.qdot, 0.0, config.dt,
            n_steps, stride, p, has_ctrl, ctrl, ref, sat, has_wind, wind, drag,
            T, Q, QD, UC, UA, FW, EN)
    except np.linalg.LinAlgError as exc:
        raise SimulationAbort(
            "inertia matrix became singular mid-run", math.nan,
            config.initial_state.q, config.initial_state.qdot) from exc
    if status != _kernels.OK:
        t_fail = fail_step * config.dt
        raise SimulationAbort(_status_message(status, t_fail, q_end),
                              t_fail, q_end, qd_end)
    return TrajectoryLog(t=T, q=Q, qdot=QD, u_cmd=UC, u_app=UA,
                         wind_force=FW, energy=EN)


@dataclass(frozen=True)
class RunMetrics:
    """Settling, sway peaks and actuator peaks extracted from a log."""

    settling_time: np.ndarray   # (3,) seconds; NaN when the band is never held
    peak_theta1_deg: float
    peak_theta2_deg: float
    peak_u: np.ndarray          # (3,) applied input peaks
    final_swing_deg: float      # max |theta| at the final sample

    def rows(self):
        names = ["settling_time_alpha_s", "settling_time_beta_s",
                 "settling_time_rope_s", "peak_theta1_deg", "peak_theta2_deg",
                 "peak_u1", "peak_u2", "peak_u3", "final_swing_deg"]
        values = (list(self.settling_time)
                  + [self.peak_theta1_deg, self.peak_theta2_deg]
                  + list(self.peak_u) + [self.final_swing_deg])
        return list(zip(names, values))

    def write_csv(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["metric", "value"])
            for name, value in self.rows():
                w.writerow([name, f"{value:.17g}"])

    @classmethod
    def read_csv(cls, path) -> dict:
        out = {}
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                out[row["metric"]] = float(row["value"])
        return out


def settling_time(t: np.ndarray, value: np.ndarray, target: float,
                  initial: float) -> float:
    """First time after which |value - target| stays inside the 2% band.

    The band is 2% of the commanded change |target - initial| (with a tiny
    absolute floor so an exactly-converged signal settles at its first
    sample). NaN when the band is never held through the end of the log.
    """
    band = max(SETTLING_BAND * abs(target - initial), 1e-12)
    err = np.abs(value - target)
    outside = np.nonzero(err > band)[0]
    if len(outside) == 0:
        return float(t[0])
    last_out = outside[-1]
    if last_out == len(t) - 1:
        return math.nan
    return float(t[last_out + 1])


def metrics(log: TrajectoryLog, ref: Reference) -> RunMetrics:
    """Extract settling times, sway peaks and input peaks from a run."""
    if len(log) == 0:
        raise ValueError("log must be non-empty")
    st = np.array([settling_time(log.t, log.q[:, i], ref.q1d[i], log.q[0, i])
                   for i in range(3)])
    peak1 = float(np.degrees(np.max(np.abs(log.q[:, 3]))))
    peak2 = float(np.degrees(np.max(np.abs(log.q[:, 4]))))
    peak_u = np.max(np.abs(log.u_app), axis=0)
    final_swing = float(np.degrees(max(abs(log.q[-1, 3]), abs(log.q[-1, 4]))))
    return RunMetrics(settling_time=st, peak_theta1_deg=peak1,
                      peak_theta2_deg=peak2, peak_u=peak_u,
                      final_swing_deg=final_swing)
