"""Linearized sway dynamics under the swing-damping law and Hurwitz checks.

With the actuated coordinates pinned at their set-point, the closed-loop
sway dynamics linearized about z = [theta1, theta1_dot, theta2, theta2_dot] = 0
split into two decoupled companion blocks

    A = [[0, 1,   0, 0  ],
         [a11, a12, 0, 0 ],
         [0, 0,   0, 1  ],
         [0, 0, a21, a22]]

whose entries depend on the gains and the operating point (beta, d):

    a11 = -(g - w1 K_up1 l_B cos(beta)) / d      a12 = w1 K_ud1 l_B cos(beta) / d
    a21 = -(g + w2 K_up2 l_B sin(beta)) / d      a22 = -w2 K_ud2 l_B sin(beta) / d

The closed forms are certified against a finite-difference linearization
of the full nonlinear closed loop (numeric_linearization_check).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .controller import ControllerGains
from .dynamics import CraneParameters

MARGINAL_TOLERANCE = 1e-12  # |Re| below this counts as a zero real part


class Verdict(str, enum.Enum):
    STABLE = "stable"
    MARGINAL = "marginal"
    UNSTABLE = "unstable"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class LinearizedSwingSystem:
    """4x4 closed-loop sway linearization at an operating point."""

    A: np.ndarray
    a11: float
    a12: float
    a21: float
    a22: float
    beta: float
    d: float


def linearized_A(params: CraneParameters, gains: ControllerGains,
                 beta: float, d: float) -> LinearizedSwingSystem:
    """Closed-form entries of the sway linearization at (beta, d)."""
    if not d > 0.0:
        raise ValueError(f"rope length must be positive, got {d}")
    g, l_B = params.gravity, params.boom_length
    w1 = gains.alpha1
    w2 = gains.alpha2_at(beta)
    cb, sb = np.cos(beta), np.sin(beta)
    a11 = -(g - w1 * gains.k_up[0] * l_B * cb) / d
    a12 = w1 * gains.k_ud[0] * l_B * cb / d
    a21 = -(g + w2 * gains.k_up[1] * l_B * sb) / d
    a22 = -w2 * gains.k_ud[1] * l_B * sb / d
    A = np.array([[0.0, 1.0, 0.0, 0.0],
                  [a11, a12, 0.0, 0.0],
                  [0.0, 0.0, 0.0, 1.0],
                  [0.0, 0.0, a21, a22]])
    return LinearizedSwingSystem(A=A, a11=a11, a12=a12, a21=a21, a22=a22,
                                 beta=beta, d=d)


def is_hurwitz(sys: LinearizedSwingSystem):
    """Verdict plus the four eigenvalues of the two companion blocks."""
    eigs = np.concatenate([
        np.linalg.eigvals(np.array([[0.0, 1.0], [sys.a11, sys.a12]])),
        np.linalg.eigvals(np.array([[0.0, 1.0], [sys.a21, sys.a22]])),
    ])
    max_re = float(np.max(eigs.real))
    if max_re > MARGINAL_TOLERANCE:
        return Verdict.UNSTABLE, eigs
    if max_re > -MARGINAL_TOLERANCE:
        return Verdict.MARGINAL, eigs
    return Verdict.STABLE, eigs


def _pinned_sway_rhs(z, params: CraneParameters, gains: ControllerGains,
                     beta: float, d: float) -> np.ndarray:
    """Nonlinear closed-loop sway dynamics with q1 held at its set-point.

    The radial weighting is frozen at its operating-point value, matching
    the constant-beta regime the linearization describes.
    """
    q = np.array([0.0, beta, d, z[0], z[2]])
    qd = np.array([0.0, 0.0, 0.0, z[1], z[3]])
    M, C, G = _kernels.eval_matrices(q, qd, params.packed())
    W = gains.weighting(beta)
    vu = W @ (gains.k_ud * qd[3:] + gains.k_up * q[3:])
    rhs = M[3:, :3] @ vu - C[3:, 3:] @ qd[3:] - G[3:]
    qdd2 = np.linalg.solve(M[3:, 3:], rhs)
    return np.array([z[1], qdd2[0], z[3], qdd2[1]])


def numeric_linearization_check(params: CraneParameters, gains: ControllerGains,
                                beta: float, d: float, step: float = 1e-6):
    """Max entry-wise gap between the closed-form A and a numerical one.

    The numerical A is a central finite difference of the full nonlinear
    pinned-sway dynamics around z = 0. Returns (max_abs_difference, A_numeric).
    """
    sys = linearized_A(params, gains, beta, d)
    A_num = np.empty((4, 4))
    for j in range(4):
        zp, zm = np.zeros(4), np.zeros(4)
        zp[j] += step
        zm[j] -= step
        fp = _pinned_sway_rhs(zp, params, gains, beta, d)
        fm = _pinned_sway_rhs(zm, params, gains, beta, d)
        A_num[:, j] = (fp - fm) / (2 * step)
    return float(np.max(np.abs(A_num - sys.A))), A_num


@dataclass(frozen=True)
class StabilityMapPoint:
    beta: float
    d: float
    verdict: Verdict
    max_real_eigenvalue: float


def stability_map(params: CraneParameters, gains: ControllerGains,
                  betas, ds) -> list:
    """Hurwitz sweep of the sway linearization over a (beta, d) grid."""
    points = []
    for beta in betas:
        for d in ds:
            sys = linearized_A(params, gains, float(beta), float(d))
            verdict, eigs = is_hurwitz(sys)
            points.append(StabilityMapPoint(beta=float(beta), d=float(d),
                                            verdict=verdict,
                                            max_real_eigenvalue=float(np.max(eigs.real))))
    return points
