import numpy as np
import pytest
from math import sin, cos

from cranesim.dynamics import (GeneralizedState, InvalidStateError,
                               SingularInertiaError, dynamics_matrices,
                               forward_dynamics, payload_position,
                               potential_energy, total_energy)
from conftest import random_valid_states


def state(alpha=0.0, beta=0.0, d=5.0, th1=0.0, th2=0.0, qd=None):
    q = np.array([alpha, beta, d, th1, th2])
    return GeneralizedState(q, np.zeros(5) if qd is None else np.asarray(qd))


class TestKinematics:
    def test_straight_hang_from_horizontal_boom(self, params):
        p = payload_position(state(d=5.0), params)
        assert np.allclose(p, [6.2, 0.0, -5.0], atol=1e-14)

    def test_pure_slew_rotation(self, params):
        p = payload_position(state(alpha=np.pi / 2, d=5.0), params)
        assert np.allclose(p, [0.0, 6.2, -5.0], atol=1e-14)

    def test_gravity_row_matches_potential_gradient(self, params):
        # dU/dtheta1 by central differences must equal the tangential-sway
        # gravity entry produced by the closed form
        s = state(beta=0.3, d=4.0, th1=0.1, th2=0.05)
        h = 1e-6
        up = potential_energy(state(beta=0.3, d=4.0, th1=0.1 + h, th2=0.05), params)
        um = potential_energy(state(beta=0.3, d=4.0, th1=0.1 - h, th2=0.05), params)
        dU = (up - um) / (2 * h)
        G = dynamics_matrices(s, params).G
        assert abs(G[3] - dU) < 1e-6 * max(1.0, abs(dU))


class TestMatrices:
    def test_gravity_vector_at_zero_sway(self, params):
        for alpha in (0.0, 1.1, -2.0):
            G = dynamics_matrices(state(alpha=alpha, d=5.0), params).G
            expected = np.array([0.0,
                                 9.81 * 6.2 * (50.0 + 312.2 / 2),
                                 -50.0 * 9.81, 0.0, 0.0])
            assert np.allclose(G, expected, rtol=1e-14)
            assert abs(G[1] - 1.2535e4) < 1.0

    def test_radial_sway_inertia_entry(self, params):
        dm = dynamics_matrices(state(d=5.0), params)
        assert dm.M[4, 4] == pytest.approx(50.0 * 25.0, rel=1e-14)

    def test_mass_matrix_symmetric(self, params):
        for s in random_valid_states(100, seed=21):
            M = dynamics_matrices(s, params).M
            assert np.max(np.abs(M - M.T)) <= 1e-12 * np.max(np.abs(M))

    def test_mass_matrix_positive_definite(self, params, rng):
        for s in random_valid_states(100, seed=22):
            M = dynamics_matrices(s, params).M
            x = rng.normal(size=5)
            assert x @ M @ x > 0.0
            np.linalg.cholesky(M)

    def test_coriolis_skew_symmetry(self, params, rng):
        # x' (dM/dt - 2C) x == 0 with dM/dt from finite differences along qdot
        eps = 1e-5
        for s in random_valid_states(50, seed=23):
            dm = dynamics_matrices(s, params)
            mp = dynamics_matrices(GeneralizedState(s.q + eps * s.qdot, s.qdot), params).M
            mm = dynamics_matrices(GeneralizedState(s.q - eps * s.qdot, s.qdot), params).M
            S = (mp - mm) / (2 * eps) - 2.0 * dm.C
            x = rng.normal(size=5)
            x /= np.linalg.norm(x)
            assert abs(x @ S @ x) <= 1e-10 * np.linalg.norm(dm.M)

    def test_block_reassembly_exact(self, params):
        for s in random_valid_states(10, seed=24):
            dm = dynamics_matrices(s, params)
            M = np.block([[dm.M11, dm.M12], [dm.M21, dm.M22]])
            C = np.block([[dm.C11, dm.C12], [dm.C21, dm.C22]])
            assert np.array_equal(M, dm.M)
            assert np.array_equal(C, dm.C)
            assert np.array_equal(np.concatenate([dm.G1, dm.G2]), dm.G)

    def test_sway_inertia_block_diagonal(self, params):
        for s in random_valid_states(10, seed=25):
            M22 = dynamics_matrices(s, params).M22
            assert M22[0, 1] == pytest.approx(0.0, abs=1e-9)
            assert M22[1, 0] == pytest.approx(0.0, abs=1e-9)
            assert M22[0, 0] > 0.0 and M22[1, 1] > 0.0

    def test_rejects_invalid_states(self, params):
        with pytest.raises(InvalidStateError):
            dynamics_matrices(state(d=-1.0), params)
        with pytest.raises(InvalidStateError):
            dynamics_matrices(state(th1=np.pi / 2), params)
        with pytest.raises(InvalidStateError):
            dynamics_matrices(state(th2=-np.pi / 2), params)


def equation_rows(q, qd, qdd, p):
    """Hand-expanded rows of the equations of motion.

    Written out term by term, independently of the matrix assembly, as a
    cross-check oracle for M qdd + C qd + G.
    """
    It, IB, lB, mB, m, g = (p.tower_inertia, p.boom_inertia, p.boom_length,
                            p.boom_mass, p.payload_mass, p.gravity)
    al, be, d, t1, t2 = q
    da, db, dd, dt1, dt2 = qd
    aa, ab, add_, at1, at2 = qdd
    Sb, Cb = sin(be), cos(be)
    S1, C1 = sin(t1), cos(t1)
    S2, C2 = sin(t2), cos(t2)
    S2b = sin(2 * be)
    S2t2 = sin(2 * t2)

    r1 = (It * aa + d**2 * aa * m + aa * lB**2 * m * Cb**2
          + (aa * lB**2 * mB * Cb**2) / 4
          - d**2 * at2 * m * S1
          + 2 * dd * d * da * m - 2 * d**2 * dt1 * dt2 * m * C1
          - d**2 * aa * m * C1**2 * C2**2 - da * db * lB**2 * m * S2b
          - (da * db * lB**2 * mB * S2b) / 4 - 2 * dd * d * dt2 * m * S1
          + add_ * lB * m * Cb * C2 * S1
          - 2 * dd * d * da * m * C1**2 * C2**2
          + 2 * d**2 * dt1 * dt2 * m * C1 * C2**2
          + d**2 * at1 * m * C1 * C2 * S2
          + 2 * d * aa * lB * m * Cb * S2 + 2 * dd * da * lB * m * Cb * S2
          - d**2 * dt1**2 * m * C2 * S1 * S2
          + 2 * d * da * dt2 * lB * m * Cb * C2
          - 2 * d * da * db * lB * m * Sb * S2
          + 2 * d**2 * da * dt2 * m * C1**2 * C2 * S2
          + d * at1 * lB * m * Cb * C1 * C2
          + 2 * dd * dt1 * lB * m * Cb * C1 * C2
          + 2 * dd * d * dt1 * m * C1 * C2 * S2
          + d * ab * lB * m * C2 * Sb * S1 - d * at2 * lB * m * Cb * S1 * S2
          - 2 * dd * dt2 * lB * m * Cb * S1 * S2
          + d * db**2 * lB * m * Cb * C2 * S1
          - d * dt1**2 * lB * m * Cb * C2 * S1
          + 2 * d**2 * da * dt1 * m * C1 * C2**2 * S1
          - d * dt2**2 * lB * m * Cb * C2 * S1
          - 2 * d * dt1 * dt2 * lB * m * Cb * C1 * S2)

    r2 = (IB * ab + ab * lB**2 * m + (ab * lB**2 * mB) / 4
          + g * lB * m * Cb + (g * lB * mB * Cb) / 2
          + (da**2 * lB**2 * m * S2b) / 2 + (da**2 * lB**2 * mB * S2b) / 8
          - add_ * lB * m * Sb * S2 - add_ * lB * m * Cb * C1 * C2
          + d * da**2 * lB * m * Sb * S2 + d * dt2**2 * lB * m * Sb * S2
          - d * at2 * lB * m * C2 * Sb - 2 * dd * dt2 * lB * m * C2 * Sb
          + d * at1 * lB * m * Cb * C2 * S1 + d * at2 * lB * m * Cb * C1 * S2
          + 2 * dd * dt1 * lB * m * Cb * C2 * S1
          + 2 * dd * dt2 * lB * m * Cb * C1 * S2
          + d * aa * lB * m * C2 * Sb * S1 + 2 * dd * da * lB * m * C2 * Sb * S1
          + d * dt1**2 * lB * m * Cb * C1 * C2
          + d * dt2**2 * lB * m * Cb * C1 * C2
          - 2 * d * dt1 * dt2 * lB * m * Cb * S1 * S2
          - 2 * d * da * dt2 * lB * m * Sb * S1 * S2
          + 2 * d * da * dt1 * lB * m * C1 * C2 * Sb)

    r3 = (add_ * m - d * da**2 * m - d * dt2**2 * m - d * dt1**2 * m * C2**2
          - g * m * C1 * C2
          + d * da**2 * m * C1**2 * C2**2 - ab * lB * m * Sb * S2
          - da**2 * lB * m * Cb * S2
          - db**2 * lB * m * Cb * S2 + 2 * d * da * dt2 * m * S1
          - ab * lB * m * Cb * C1 * C2
          + aa * lB * m * Cb * C2 * S1 + db**2 * lB * m * C1 * C2 * Sb
          - 2 * d * da * dt1 * m * C1 * C2 * S2
          - 2 * da * db * lB * m * C2 * Sb * S1)

    r4 = d * m * C2 * (g * S1 + 2 * dd * dt1 * C2 + d * at1 * C2
                       - db**2 * lB * Sb * S1
                       - 2 * d * dt1 * dt2 * S2 + aa * lB * Cb * C1
                       + d * aa * C1 * S2 + 2 * dd * da * C1 * S2
                       + ab * lB * Cb * S1 - d * da**2 * C1 * C2 * S1
                       + 2 * d * da * dt2 * C1 * C2
                       - 2 * da * db * lB * C1 * Sb)

    r5 = -d * m * (d * aa * S1 - 2 * dd * dt2 - d * at2 + 2 * dd * da * S1
                   - g * C1 * S2
                   - (d * dt1**2 * S2t2) / 2 + da**2 * lB * Cb * C2
                   + db**2 * lB * Cb * C2
                   + ab * lB * C2 * Sb + db**2 * lB * C1 * Sb * S2
                   + d * da**2 * C1**2 * C2 * S2
                   + 2 * d * da * dt1 * C1 * C2**2
                   - ab * lB * Cb * C1 * S2 + aa * lB * Cb * S1 * S2
                   - 2 * da * db * lB * Sb * S1 * S2)
    return np.array([r1, r2, r3, r4, r5])


class TestEquationRows:
    def test_matrix_form_matches_hand_expansion(self, params, rng):
        # the matrix form must reproduce every hand-expanded row for any qdd
        for s in random_valid_states(50, seed=31):
            qdd = rng.uniform(-2.0, 2.0, 5)
            dm = dynamics_matrices(s, params)
            lhs = dm.M @ qdd + dm.C @ s.qdot + dm.G
            rows = equation_rows(s.q, s.qdot, qdd, params)
            rel = np.abs(lhs - rows) / np.maximum(1.0, np.abs(rows))
            assert np.max(rel) <= 1e-10

    def test_sway_rows_tight_agreement(self, params, rng):
        # the two sway rows carry no ambiguous symbols; hold them to 1e-12
        for s in random_valid_states(50, seed=32):
            qdd = rng.uniform(-2.0, 2.0, 5)
            dm = dynamics_matrices(s, params)
            lhs = (dm.M @ qdd + dm.C @ s.qdot + dm.G)[3:]
            rows = equation_rows(s.q, s.qdot, qdd, params)[3:]
            assert np.max(np.abs(lhs - rows) / np.maximum(1.0, np.abs(rows))) <= 1e-12


class TestForwardDynamics:
    def test_gravity_compensation_equilibrium(self, params):
        s = state(beta=0.4, d=5.0)
        G1 = dynamics_matrices(s, params).G1
        qdd = forward_dynamics(s, G1, None, params)
        assert np.max(np.abs(qdd)) < 1e-12

    def test_straight_hang_is_sway_equilibrium(self, params):
        # G2 vanishes at theta = 0, so the hang is an equilibrium of the
        # sway subsystem whenever the actuated axes are held (gravity
        # compensated); the tangential row also decouples there
        s = state(beta=0.4, d=5.0)
        dm = dynamics_matrices(s, params)
        assert np.array_equal(dm.G2, np.zeros(2))
        qdd = forward_dynamics(s, None, None, params)
        assert abs(qdd[3]) < 1e-12
        qdd_held = forward_dynamics(s, dm.G1, None, params)
        assert np.allclose(qdd_held, 0.0, atol=1e-12)

    def test_singular_inertia_guard(self, params):
        s = state(d=5.0, th2=np.pi / 2 - 1e-7)
        with pytest.raises(SingularInertiaError):
            forward_dynamics(s, None, None, params)


class TestEnergy:
    def test_potential_at_straight_hang(self, params):
        e = total_energy(state(d=5.0), params)
        assert e == pytest.approx(-50.0 * 9.81 * 5.0, rel=1e-12)

    def test_kinetic_part_zero_at_rest(self, params):
        for s in random_valid_states(10, seed=33):
            at_rest = GeneralizedState(s.q, np.zeros(5))
            assert total_energy(at_rest, params) == pytest.approx(
                potential_energy(at_rest, params), rel=1e-12)
