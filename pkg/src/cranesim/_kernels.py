"""Jitted numerical core shared by the dynamics, controller and simulator.

Everything in here works on plain float64 arrays so numba can compile it.
The public modules wrap these kernels with validated dataclass interfaces.

Conventions:
    q  = [alpha, beta, d, theta1, theta2]
    p  = [I_t, I_B, l_B, m_B, m, g]
    ctrl = [kad(3), kap(3), kud(2), kup(2), alpha1, alpha2_value, alpha2_mode]
           alpha2_mode: 0 -> use alpha2_value, 1 -> sign(beta)
    ref  = [q1d(3), q1d_dot(3), q1d_ddot(3)]
    wind = [t_start, ramp_up, plateau, ramp_down, peak_speed, dir_mode, dx, dy, dz]
           dir_mode: 0 -> fixed world vector (dx,dy,dz), 1 -> tangential, 2 -> radial
    drag = [rho, area, cd]

All positions are expressed in the frame that co-rotates with the slew
angle (x radial, y tangential, z up); kinetic/potential energies and
generalized forces are invariant under that rotation, which keeps the
inertia matrix independent of alpha.
"""

import math

import numpy as np
from numba import njit

# run-loop / rhs status codes
OK = 0
BAD_STATE = 1
NOT_FINITE = 2


@njit(cache=True)
def rot_kinematics(q, p):
    """Payload position r and its Jacobian columns in the rotating frame.

    Returns (r, dr) with dr[:, k] = dr/dx_k for x = (beta, d, theta1, theta2).
    """
    l_B = p[2]
    beta, d, th1, th2 = q[1], q[2], q[3], q[4]
    sb, cb = math.sin(beta), math.cos(beta)
    s1, c1 = math.sin(th1), math.cos(th1)
    s2, c2 = math.sin(th2), math.cos(th2)

    r = np.empty(3)
    r[0] = l_B * cb + d * s2
    r[1] = d * c2 * s1
    r[2] = l_B * sb - d * c1 * c2

    dr = np.empty((3, 4))
    dr[0, 0] = -l_B * sb
    dr[1, 0] = 0.0
    dr[2, 0] = l_B * cb
    dr[0, 1] = s2
    dr[1, 1] = c2 * s1
    dr[2, 1] = -c1 * c2
    dr[0, 2] = 0.0
    dr[1, 2] = d * c2 * c1
    dr[2, 2] = d * s1 * c2
    dr[0, 3] = d * c2
    dr[1, 3] = -d * s2 * s1
    dr[2, 3] = d * c1 * s2
    return r, dr


@njit(cache=True)
def payload_jacobian_rot(q, p):
    """3x5 Jacobian of the payload position w.r.t. q, rotating frame."""
    r, dr = rot_kinematics(q, p)
    J = np.empty((3, 5))
    J[0, 0] = -r[1]
    J[1, 0] = r[0]
    J[2, 0] = 0.0
    for k in range(4):
        for i in range(3):
            J[i, 1 + k] = dr[i, k]
    return J


@njit(cache=True)
def eval_matrices(q, qd, p):
    """Inertia matrix M, Christoffel Coriolis matrix C and gravity vector G."""
    I_t, I_B, l_B, m_B, m, g = p[0], p[1], p[2], p[3], p[4], p[5]
    beta, d, th1, th2 = q[1], q[2], q[3], q[4]
    sb, cb = math.sin(beta), math.cos(beta)
    s1, c1 = math.sin(th1), math.cos(th1)
    s2, c2 = math.sin(th2), math.cos(th2)

    r, dr = rot_kinematics(q, p)

    # second derivatives of r w.r.t. x = (beta, d, theta1, theta2)
    d2r = np.zeros((3, 4, 4))
    d2r[0, 0, 0] = -l_B * cb
    d2r[2, 0, 0] = -l_B * sb
    # (d, theta1)
    d2r[1, 1, 2] = c2 * c1
    d2r[2, 1, 2] = s1 * c2
    # (d, theta2)
    d2r[0, 1, 3] = c2
    d2r[1, 1, 3] = -s2 * s1
    d2r[2, 1, 3] = c1 * s2
    # (theta1, theta1)
    d2r[1, 2, 2] = -d * c2 * s1
    d2r[2, 2, 2] = d * c1 * c2
    # (theta1, theta2)
    d2r[1, 2, 3] = -d * s2 * c1
    d2r[2, 2, 3] = -d * s1 * s2
    # (theta2, theta2)
    d2r[0, 3, 3] = -d * s2
    d2r[1, 3, 3] = -d * c2 * s1
    d2r[2, 3, 3] = d * c1 * c2
    for i in range(3):
        for a in range(4):
            for b in range(a):
                d2r[i, a, b] = d2r[i, b, a]

    # boom centre of mass (half length along the boom)
    half = 0.5 * l_B
    b_x = half * cb
    db = np.empty(3)
    db[0] = -half * sb
    db[1] = 0.0
    db[2] = half * cb

    # payload Jacobian, rotating frame
    J = np.empty((3, 5))
    J[0, 0] = -r[1]
    J[1, 0] = r[0]
    J[2, 0] = 0.0
    for k in range(4):
        for i in range(3):
            J[i, 1 + k] = dr[i, k]

    # boom Jacobian: only alpha and beta columns are non-zero
    JB = np.zeros((3, 5))
    JB[1, 0] = b_x
    JB[0, 1] = db[0]
    JB[2, 1] = db[2]

    M = np.zeros((5, 5))
    M[0, 0] = I_t
    M[1, 1] = I_B
    for i in range(5):
        for j in range(5):
            acc = 0.0
            for a in range(3):
                acc += m * J[a, i] * J[a, j] + m_B * JB[a, i] * JB[a, j]
            M[i, j] += acc

    # dM[k] = dM/dq_k; alpha is cyclic so dM[0] = 0
    dM = np.zeros((5, 5, 5))
    dJ = np.empty((3, 5))
    for k in range(1, 5):
        x = k - 1
        dJ[0, 0] = -dr[1, x]
        dJ[1, 0] = dr[0, x]
        dJ[2, 0] = 0.0
        for j in range(4):
            for i in range(3):
                dJ[i, 1 + j] = d2r[i, x, j]
        for i in range(5):
            for j in range(5):
                acc = 0.0
                for a in range(3):
                    acc += dJ[a, i] * J[a, j] + J[a, i] * dJ[a, j]
                dM[k, i, j] = m * acc
    # boom contribution only depends on beta (k = 1)
    d2b_x, d2b_z = -half * cb, -half * sb
    dJB = np.zeros((3, 5))
    dJB[1, 0] = db[0]  # spin of db
    dJB[0, 1] = d2b_x
    dJB[2, 1] = d2b_z
    for i in range(5):
        for j in range(5):
            acc = 0.0
            for a in range(3):
                acc += dJB[a, i] * JB[a, j] + JB[a, i] * dJB[a, j]
            dM[1, i, j] += m_B * acc

    # Christoffel construction keeps (dM/dt - 2C) skew-symmetric
    C = np.zeros((5, 5))
    for i in range(5):
        for j in range(5):
            acc = 0.0
            for k in range(5):
                acc += (dM[k, i, j] + dM[j, i, k] - dM[i, j, k]) * qd[k]
            C[i, j] = 0.5 * acc

    G = np.zeros(5)
    G[1] = g * l_B * cb * (m + 0.5 * m_B)
    G[2] = -m * g * c1 * c2
    G[3] = m * g * d * s1 * c2
    G[4] = m * g * d * c1 * s2
    return M, C, G


@njit(cache=True)
def potential_energy(q, p):
    l_B, m_B, m, g = p[2], p[3], p[4], p[5]
    beta, d, th1, th2 = q[1], q[2], q[3], q[4]
    z_payload = l_B * math.sin(beta) - d * math.cos(th1) * math.cos(th2)
    return m * g * z_payload + m_B * g * 0.5 * l_B * math.sin(beta)


@njit(cache=True)
def total_energy(q, qd, p):
    M, _, _ = eval_matrices(q, qd, p)
    kin = 0.0
    for i in range(5):
        for j in range(5):
            kin += qd[i] * M[i, j] * qd[j]
    return 0.5 * kin + potential_energy(q, p)


@njit(cache=True)
def forward_dynamics(q, qd, u, f_ext, p):
    """Solve M qdd = B u + f_ext - C qd - G (B puts u on the first 3 rows)."""
    M, C, G = eval_matrices(q, qd, p)
    rhs = np.empty(5)
    for i in range(5):
        acc = f_ext[i] - G[i]
        for j in range(5):
            acc -= C[i, j] * qd[j]
        rhs[i] = acc
    for i in range(3):
        rhs[i] += u[i]
    return np.linalg.solve(M, rhs)


@njit(cache=True)
def reduced_terms(M, C, G):
    """Schur-complement reduction onto the actuated coordinates."""
    x = np.empty((3, 2))
    inv44 = 1.0 / M[3, 3]
    inv55 = 1.0 / M[4, 4]
    for i in range(3):
        x[i, 0] = M[i, 3] * inv44
        x[i, 1] = M[i, 4] * inv55
    Mbar = np.empty((3, 3))
    Cbar1 = np.empty((3, 3))
    Cbar2 = np.empty((3, 2))
    Gbar = np.empty(3)
    for i in range(3):
        for j in range(3):
            Mbar[i, j] = M[i, j] - x[i, 0] * M[3, j] - x[i, 1] * M[4, j]
            Cbar1[i, j] = C[i, j] - x[i, 0] * C[3, j] - x[i, 1] * C[4, j]
        for j in range(2):
            Cbar2[i, j] = C[i, 3 + j] - x[i, 0] * C[3, 3 + j] - x[i, 1] * C[4, 3 + j]
        Gbar[i] = G[i] - x[i, 0] * G[3] - x[i, 1] * G[4]
    return Mbar, Cbar1, Cbar2, Gbar


@njit(cache=True)
def auxiliary_input(q, qd, ctrl, ref):
    """Combined set-point tracking and swing-damping auxiliary acceleration."""
    alpha1 = ctrl[10]
    if ctrl[12] != 0.0:
        beta = q[1]
        alpha2 = 1.0 if beta > 0.0 else (-1.0 if beta < 0.0 else 0.0)
    else:
        alpha2 = ctrl[11]
    swing0 = ctrl[6] * qd[3] + ctrl[8] * q[3]
    swing1 = ctrl[7] * qd[4] + ctrl[9] * q[4]
    v = np.empty(3)
    for i in range(3):
        v[i] = ref[6 + i] - ctrl[i] * (qd[i] - ref[3 + i]) - ctrl[3 + i] * (q[i] - ref[i])
    v[0] -= alpha1 * swing0
    v[1] -= alpha2 * swing1
    return v


@njit(cache=True)
def control_force(q, qd, M, C, G, ctrl, ref):
    """Feedback-linearizing input U = Mbar v + Cbar1 qd1 + Cbar2 qd2 + Gbar."""
    Mbar, Cbar1, Cbar2, Gbar = reduced_terms(M, C, G)
    v = auxiliary_input(q, qd, ctrl, ref)
    u = np.empty(3)
    for i in range(3):
        acc = Gbar[i]
        for j in range(3):
            acc += Mbar[i, j] * v[j] + Cbar1[i, j] * qd[j]
        for j in range(2):
            acc += Cbar2[i, j] * qd[3 + j]
        u[i] = acc
    return u


@njit(cache=True)
def wind_speed(t, wind):
    t0, up, plat, down, peak = wind[0], wind[1], wind[2], wind[3], wind[4]
    s = t - t0
    if s <= 0.0 or s >= up + plat + down:
        return 0.0
    if s < up:
        return peak * s / up
    if s <= up + plat:
        return peak
    return peak * (up + plat + down - s) / down


@njit(cache=True)
def wind_force_rot(t, alpha, wind, drag):
    """Drag force on the payload, expressed in the rotating frame."""
    v = wind_speed(t, wind)
    mag = 0.5 * drag[0] * v * v * drag[1] * drag[2]
    F = np.zeros(3)
    mode = wind[5]
    if mode == 1.0:  # tangential
        F[1] = mag
    elif mode == 2.0:  # radial
        F[0] = mag
    else:  # fixed world direction, rotate into the slew frame
        ca, sa = math.cos(alpha), math.sin(alpha)
        F[0] = mag * (ca * wind[6] + sa * wind[7])
        F[1] = mag * (-sa * wind[6] + ca * wind[7])
        F[2] = mag * wind[8]
    return F


@njit(cache=True)
def rot_to_world(alpha, vec):
    ca, sa = math.cos(alpha), math.sin(alpha)
    out = np.empty(3)
    out[0] = ca * vec[0] - sa * vec[1]
    out[1] = sa * vec[0] + ca * vec[1]
    out[2] = vec[2]
    return out


@njit(cache=True)
def rhs_eval(t, q, qd, p, has_ctrl, ctrl, ref, sat, has_wind, wind, drag):
    """One right-hand-side evaluation of the closed loop.

    Returns (qdd, u_cmd, u_app, F_world).
    """
    M, C, G = eval_matrices(q, qd, p)
    u_cmd = np.zeros(3)
    if has_ctrl:
        u_cmd = control_force(q, qd, M, C, G, ctrl, ref)
    u_app = np.empty(3)
    for i in range(3):
        ui = u_cmd[i]
        if ui > sat[i]:
            ui = sat[i]
        elif ui < -sat[i]:
            ui = -sat[i]
        u_app[i] = ui

    F_world = np.zeros(3)
    f_ext = np.zeros(5)
    if has_wind:
        F_rot = wind_force_rot(t, q[0], wind, drag)
        F_world = rot_to_world(q[0], F_rot)
        J = payload_jacobian_rot(q, p)
        for i in range(5):
            acc = 0.0
            for a in range(3):
                acc += J[a, i] * F_rot[a]
            f_ext[i] = acc

    rhs = np.empty(5)
    for i in range(5):
        acc = f_ext[i] - G[i]
        for j in range(5):
            acc -= C[i, j] * qd[j]
        rhs[i] = acc
    for i in range(3):
        rhs[i] += u_app[i]
    qdd = np.linalg.solve(M, rhs)
    return qdd, u_cmd, u_app, F_world


@njit(cache=True)
def rk4_step(t, q, qd, dt, p, has_ctrl, ctrl, ref, sat, has_wind, wind, drag):
    """Classical RK4 step; control/disturbance re-evaluated at every stage."""
    a1, _, _, _ = rhs_eval(t, q, qd, p, has_ctrl, ctrl, ref, sat, has_wind, wind, drag)
    k1q, k1v = qd, a1

    q2 = q + 0.5 * dt * k1q
    v2 = qd + 0.5 * dt * k1v
    a2, _, _, _ = rhs_eval(t + 0.5 * dt, q2, v2, p, has_ctrl, ctrl, ref, sat, has_wind, wind, drag)
    k2q, k2v = v2, a2

    q3 = q + 0.5 * dt * k2q
    v3 = qd + 0.5 * dt * k2v
    a3, _, _, _ = rhs_eval(t + 0.5 * dt, q3, v3, p, has_ctrl, ctrl, ref, sat, has_wind, wind, drag)
    k3q, k3v = v3, a3

    q4 = q + dt * k3q
    v4 = qd + dt * k3v
    a4, _, _, _ = rhs_eval(t + dt, q4, v4, p, has_ctrl, ctrl, ref, sat, has_wind, wind, drag)
    k4q, k4v = v4, a4

    qn = q + (dt / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)
    vn = qd + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    return qn, vn


@njit(cache=True)
def state_status(q, qd):
    for i in range(5):
        if not (math.isfinite(q[i]) and math.isfinite(qd[i])):
            return NOT_FINITE
    if q[2] <= 0.0:
        return BAD_STATE
    if abs(q[3]) >= 0.5 * math.pi or abs(q[4]) >= 0.5 * math.pi:
        return BAD_STATE
    return OK


@njit(cache=True)
def run_loop(q0, qd0, t0, dt, n_steps, stride, p,
             has_ctrl, ctrl, ref, sat, has_wind, wind, drag,
             T, Q, QD, UC, UA, FW, EN):
    """Fixed-step rollout, logging every `stride`-th step into preallocated arrays.

    Returns (status, step, q, qd); status != OK means the run aborted at
    `step` with the reported state, and the log is valid up to the previous
    sample.
    """
    q = q0.copy()
    qd = qd0.copy()
    sample = 0
    for step in range(n_steps + 1):
        t = t0 + step * dt
        if step % stride == 0 and sample < T.shape[0]:
            _, u_cmd, u_app, F_world = rhs_eval(
                t, q, qd, p, has_ctrl, ctrl, ref, sat, has_wind, wind, drag)
            T[sample] = t
            for i in range(5):
                Q[sample, i] = q[i]
                QD[sample, i] = qd[i]
            for i in range(3):
                UC[sample, i] = u_cmd[i]
                UA[sample, i] = u_app[i]
                FW[sample, i] = F_world[i]
            EN[sample] = total_energy(q, qd, p)
            sample += 1
        if step == n_steps:
            break
        q, qd = rk4_step(t, q, qd, dt, p, has_ctrl, ctrl, ref, sat, has_wind, wind, drag)
        st = state_status(q, qd)
        if st != OK:
            return st, step + 1, q, qd
    return OK, n_steps, q, qd
