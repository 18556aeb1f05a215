"""Independent numerical derivation of the equations of motion.

The closed-form matrices in :mod:`cranesim.dynamics` are validated against
accelerations obtained directly from the Lagrangian

    d/dt (dL/dqd) - dL/dq = B u

using nested central finite differences with Richardson extrapolation.
The only code shared with the closed form is the kinematics
(payload_xyz / boom_center_xyz); velocities inside L come from a
complex-step directional derivative of those positions, so the oracle
never touches the analytic Jacobians or the assembled matrices.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dynamics import (CraneParameters, GeneralizedState, INPUT_MATRIX,
                       boom_center_xyz, payload_xyz)

_CSTEP = 1e-200  # complex-step size; derivative exact to machine precision


class OracleConvergenceError(RuntimeError):
    """Finite-difference derivatives did not stabilize under step halving."""


@dataclass(frozen=True)
class OracleConfig:
    """Step sizes (relative) and agreement threshold for the oracle."""

    fd_step_q: float = 1e-5    # coordinate perturbations for dL/dq
    fd_step_t: float = 1e-5    # step of the total time derivative
    fd_step_qd: float = 0.25   # velocity perturbations; L is quadratic in qd,
                               # so central differences are exact at any step
    tolerance: float = 1e-5    # self-consistency threshold (Richardson check)

    def __post_init__(self):
        if not (0.0 < self.fd_step_q <= 1e-2 and 0.0 < self.fd_step_t <= 1e-2):
            raise ValueError("fd steps must lie in (0, 1e-2]")
        if not self.tolerance > 0.0:
            raise ValueError("tolerance must be positive")


def _velocity(position, q, qd, boom_length):
    """Exact d/dt of a position map along qd, via complex step."""
    return np.imag(position(q + 1j * _CSTEP * qd, boom_length)) / _CSTEP


def lagrangian(state: GeneralizedState, params: CraneParameters) -> float:
    """T - U built from kinematics alone."""
    return _lagrangian_raw(state.q, state.qdot, params)


def _lagrangian_raw(q, qd, params: CraneParameters) -> float:
    v_payload = _velocity(payload_xyz, q, qd, params.boom_length)
    v_boom = _velocity(boom_center_xyz, q, qd, params.boom_length)
    kinetic = (0.5 * params.tower_inertia * qd[0] ** 2
               + 0.5 * params.boom_inertia * qd[1] ** 2
               + 0.5 * params.boom_mass * v_boom @ v_boom
               + 0.5 * params.payload_mass * v_payload @ v_payload)
    z_payload = payload_xyz(q, params.boom_length)[2]
    z_boom = boom_center_xyz(q, params.boom_length)[2]
    potential = params.gravity * (params.payload_mass * z_payload
                                  + params.boom_mass * z_boom)
    return kinetic - potential


def _grad_q(q, qd, params, h_rel):
    """dL/dq by central differences at one step size."""
    g = np.empty(5)
    for i in range(5):
        h = h_rel * max(1.0, abs(q[i]))
        qp, qm = q.copy(), q.copy()
        qp[i] += h
        qm[i] -= h
        g[i] = (_lagrangian_raw(qp, qd, params) - _lagrangian_raw(qm, qd, params)) / (2 * h)
    return g


def _grad_qd(q, qd, params, h_rel):
    """dL/dqd by central differences (exact: L is quadratic in qd)."""
    g = np.empty(5)
    for i in range(5):
        h = h_rel * max(1.0, abs(qd[i]))
        vp, vm = qd.copy(), qd.copy()
        vp[i] += h
        vm[i] -= h
        g[i] = (_lagrangian_raw(q, vp, params) - _lagrangian_raw(q, vm, params)) / (2 * h)
    return g


def _velocity_hessian(q, qd, params, h_rel):
    """d2L/dqd2 (the inertia matrix) by exact central second differences."""
    H = np.empty((5, 5))
    L0 = _lagrangian_raw(q, qd, params)
    steps = np.array([h_rel * max(1.0, abs(qd[i])) for i in range(5)])
    for i in range(5):
        hi = steps[i]
        vp, vm = qd.copy(), qd.copy()
        vp[i] += hi
        vm[i] -= hi
        H[i, i] = (_lagrangian_raw(q, vp, params) - 2 * L0
                   + _lagrangian_raw(q, vm, params)) / hi ** 2
        for j in range(i):
            hj = steps[j]
            vpp, vpm, vmp, vmm = qd.copy(), qd.copy(), qd.copy(), qd.copy()
            vpp[i] += hi
            vpp[j] += hj
            vpm[i] += hi
            vpm[j] -= hj
            vmp[i] -= hi
            vmp[j] += hj
            vmm[i] -= hi
            vmm[j] -= hj
            H[i, j] = (_lagrangian_raw(q, vpp, params) - _lagrangian_raw(q, vpm, params)
                       - _lagrangian_raw(q, vmp, params) + _lagrangian_raw(q, vmm, params)
                       ) / (4 * hi * hj)
            H[j, i] = H[i, j]
    return H


def _convective_term(q, qd, params, tau, h_qd):
    """(d/dq dL/dqd) qd by a central difference along the flow direction."""
    gp = _grad_qd(q + tau * qd, qd, params, h_qd)
    gm = _grad_qd(q - tau * qd, qd, params, h_qd)
    return (gp - gm) / (2 * tau)


def _richardson(coarse, fine):
    """Fourth-order combination of two central-difference estimates (h, h/2)."""
    return (4.0 * fine - coarse) / 3.0


def _oracle_terms(q, qd, params, cfg):
    """Richardson-extrapolated dL/dq and convective term, with error estimates."""
    h = cfg.fd_step_q
    gq_c = _grad_q(q, qd, params, h)
    gq_f = _grad_q(q, qd, params, 0.5 * h)
    gq = _richardson(gq_c, gq_f)

    tau = cfg.fd_step_t / max(1.0, float(np.max(np.abs(qd))))
    cv_c = _convective_term(q, qd, params, tau, cfg.fd_step_qd)
    cv_f = _convective_term(q, qd, params, 0.5 * tau, cfg.fd_step_qd)
    cv = _richardson(cv_c, cv_f)

    scale = max(1.0, float(np.max(np.abs(gq))), float(np.max(np.abs(cv))))
    err = max(float(np.max(np.abs(gq - gq_f))), float(np.max(np.abs(cv - cv_f)))) / scale
    return gq, cv, err


def oracle_accelerations(state: GeneralizedState, u, params: CraneParameters,
                         cfg: OracleConfig | None = None) -> np.ndarray:
    """Accelerations solving d/dt dL/dqd - dL/dq = B u, all terms from L alone."""
    cfg = cfg or OracleConfig()
    state.validate()
    q, qd = state.q, state.qdot
    u = np.zeros(3) if u is None else np.asarray(u, dtype=float).reshape(3)

    gq, cv, err = _oracle_terms(q, qd, params, cfg)
    if err > cfg.tolerance:
        raise OracleConvergenceError(
            f"finite-difference estimates disagree by {err:.3e} (> {cfg.tolerance:.1e})")
    M = _velocity_hessian(q, qd, params, cfg.fd_step_qd)
    return np.linalg.solve(M, INPUT_MATRIX @ u + gq - cv)


def sample_states(n: int, seed: int, rng_ranges=None):
    """Seeded random states (and inputs) inside the model's validity region."""
    rng = np.random.default_rng(seed)
    states, inputs = [], []
    for _ in range(n):
        q = np.array([
            rng.uniform(-np.pi, np.pi),    # alpha
            rng.uniform(-1.2, 1.2),        # beta
            rng.uniform(0.5, 8.0),         # d
            rng.uniform(-1.0, 1.0),        # theta1
            rng.uniform(-1.0, 1.0),        # theta2
        ])
        qd = rng.uniform(-1.0, 1.0, size=5) * np.array([0.5, 0.5, 1.0, 1.0, 1.0])
        u = rng.uniform(-1.0, 1.0, size=3) * np.array([2e3, 2e4, 1e3])
        states.append(GeneralizedState(q, qd))
        inputs.append(u)
    return states, inputs


@dataclass(frozen=True)
class MutationSpec:
    """Fault injection for the self-test: flips the sign of one model term.

    Text form: ``flip-sign:row=<0..4>,term=<gravity|coriolis|inertia>``.
    """

    row: int
    term: str

    @classmethod
    def parse(cls, text: str) -> "MutationSpec":
        kind, _, args = text.partition(":")
        if kind != "flip-sign":
            raise ValueError(f"unknown mutation kind {kind!r}")
        row, term = None, None
        for item in args.split(","):
            key, _, value = item.partition("=")
            if key == "row":
                row = int(value)
            elif key == "term":
                term = value
            else:
                raise ValueError(f"unknown mutation argument {key!r}")
        if row is None or row not in range(5):
            raise ValueError("mutation needs row=<0..4>")
        if term not in ("gravity", "coriolis", "inertia"):
            raise ValueError("mutation term must be gravity, coriolis or inertia")
        return cls(row=row, term=term)

    def apply(self, M: np.ndarray, C: np.ndarray, G: np.ndarray):
        M, C, G = M.copy(), C.copy(), G.copy()
        if self.term == "gravity":
            G[self.row] = -G[self.row]
        elif self.term == "coriolis":
            C[self.row, :] = -C[self.row, :]
        else:
            M[self.row, :] = -M[self.row, :]
        return M, C, G


@dataclass(frozen=True)
class TermDiffRow:
    state_id: int
    row_index: int
    closed_form: float
    oracle: float

    @property
    def abs_diff(self) -> float:
        return abs(self.closed_form - self.oracle)

    @property
    def rel_diff(self) -> float:
        scale = max(abs(self.closed_form), abs(self.oracle), 1.0)
        return self.abs_diff / scale


@dataclass(frozen=True)
class TermDiffReport:
    """Row-by-row comparison of closed form vs oracle over a state set."""

    rows: list

    @property
    def max_rel_diff(self) -> float:
        return max(r.rel_diff for r in self.rows)

    def max_rel_by_row(self) -> np.ndarray:
        out = np.zeros(5)
        for r in self.rows:
            out[r.row_index] = max(out[r.row_index], r.rel_diff)
        return out

    def write_csv(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["state_id", "row_index", "closed_form", "oracle",
                        "abs_diff", "rel_diff"])
            for r in self.rows:
                w.writerow([r.state_id, r.row_index,
                            f"{r.closed_form:.17g}", f"{r.oracle:.17g}",
                            f"{r.abs_diff:.17g}", f"{r.rel_diff:.17g}"])


def term_diff_report(states, params: CraneParameters, inputs=None,
                     cfg: OracleConfig | None = None,
                     mutation: MutationSpec | None = None) -> TermDiffReport:
    """Per-row residual table: closed-form row values vs Lagrangian row values.

    Both sides are evaluated at the oracle's own accelerations, so a defect in
    one closed-form term shows up only in its own row.
    """
    from . import _kernels

    if len(states) == 0:
        raise ValueError("state set must be non-empty")
    cfg = cfg or OracleConfig()
    if inputs is None:
        inputs = [np.zeros(3)] * len(states)
    rows = []
    for sid, (state, u) in enumerate(zip(states, inputs)):
        q, qd = state.q, state.qdot
        gq, cv, _ = _oracle_terms(q, qd, params, cfg)
        M_o = _velocity_hessian(q, qd, params, cfg.fd_step_qd)
        qdd = np.linalg.solve(M_o, INPUT_MATRIX @ np.asarray(u, dtype=float) + gq - cv)
        oracle_rows = M_o @ qdd + cv - gq

        M, C, G = _kernels.eval_matrices(q, qd, params.packed())
        if mutation is not None:
            M, C, G = mutation.apply(M, C, G)
        closed_rows = M @ qdd + C @ qd + G

        for i in range(5):
            rows.append(TermDiffRow(state_id=sid, row_index=i,
                                    closed_form=float(closed_rows[i]),
                                    oracle=float(oracle_rows[i])))
    return TermDiffReport(rows=rows)
