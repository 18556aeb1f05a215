import numpy as np
import pytest

from cranesim.controller import ControllerGains
from cranesim.stability import (Verdict, is_hurwitz, linearized_A,
                                numeric_linearization_check, stability_map)


def zero_gains():
    return ControllerGains(k_ad=np.zeros(3), k_ap=np.zeros(3),
                           k_ud=np.zeros(2), k_up=np.zeros(2),
                           alpha1=-1.0, alpha2="sign(beta)")


class TestClosedFormEntries:
    def test_reference_values_at_horizontal_boom(self, params, gains):
        sys = linearized_A(params, gains, beta=0.0, d=5.0)
        assert sys.a11 == pytest.approx(-(9.81 + 10 * 6.2) / 5, rel=1e-12)
        assert sys.a11 == pytest.approx(-14.362, abs=1e-3)
        assert sys.a12 == pytest.approx(-120 * 6.2 / 5, rel=1e-12)
        assert sys.a12 == pytest.approx(-148.8, abs=1e-9)

    def test_radial_block_at_beta_zero(self, params, gains):
        # sign(0) = 0 disables the radial feedback entirely
        sys = linearized_A(params, gains, beta=0.0, d=5.0)
        assert sys.a21 == pytest.approx(-9.81 / 5.0, rel=1e-12)
        assert sys.a22 == 0.0

    def test_zero_gains_reduce_to_open_pendulum(self, params):
        sys = linearized_A(params, zero_gains(), beta=0.7, d=4.0)
        assert sys.a11 == pytest.approx(-9.81 / 4.0, rel=1e-12)
        assert sys.a21 == pytest.approx(-9.81 / 4.0, rel=1e-12)
        assert sys.a12 == 0.0 and sys.a22 == 0.0

    def test_sparsity_pattern(self, params, gains):
        A = linearized_A(params, gains, beta=0.3, d=5.0).A
        assert A[0, 1] == 1.0 and A[2, 3] == 1.0
        assert np.all(A[0:2, 2:4] == 0.0) and np.all(A[2:4, 0:2] == 0.0)

    def test_rejects_nonpositive_rope(self, params, gains):
        with pytest.raises(ValueError):
            linearized_A(params, gains, beta=0.1, d=0.0)


class TestHurwitz:
    def test_reference_gains_stable(self, params, gains):
        verdict, eigs = is_hurwitz(linearized_A(params, gains, beta=0.5, d=5.0))
        assert verdict is Verdict.STABLE
        assert len(eigs) == 4
        assert np.all(eigs.real < 0.0)

    def test_zero_gains_marginal(self, params):
        verdict, eigs = is_hurwitz(linearized_A(params, zero_gains(), beta=0.5, d=5.0))
        assert verdict is Verdict.MARGINAL
        omega = np.sqrt(9.81 / 5.0)
        assert np.allclose(np.sort(np.abs(eigs.imag)), [omega] * 4, rtol=1e-12)
        assert np.allclose(eigs.real, 0.0, atol=1e-12)

    def test_positive_weighting_destabilizes(self, params):
        g = ControllerGains(k_ad=[100, 100, 150], k_ap=[10, 20, 50],
                            k_ud=[120, 120], k_up=[100, 100],
                            alpha1=+1.0, alpha2="sign(beta)")
        sys = linearized_A(params, g, beta=0.0, d=5.0)
        assert sys.a11 > 0.0
        verdict, _ = is_hurwitz(sys)
        assert verdict is Verdict.UNSTABLE

    def test_sign_test_equivalence(self, params, rng):
        # Hurwitz <=> a11 < 0 and a12 < 0, per companion block
        for _ in range(1000):
            g = ControllerGains(
                k_ad=[1, 1, 1], k_ap=[1, 1, 1],
                k_ud=rng.uniform(0.01, 200.0, 2),
                k_up=rng.uniform(0.01, 200.0, 2),
                alpha1=rng.choice([-1.0, 1.0]) * rng.uniform(0.1, 2.0),
                alpha2=rng.choice([-1.0, 1.0]) * rng.uniform(0.1, 2.0))
            beta = rng.uniform(0.05, 1.5)
            d = rng.uniform(0.5, 20.0)
            sys = linearized_A(params, g, beta, d)
            verdict, _ = is_hurwitz(sys)
            sign_stable = (sys.a11 < 0 and sys.a12 < 0
                           and sys.a21 < 0 and sys.a22 < 0)
            assert (verdict is Verdict.STABLE) == sign_stable


class TestNumericLinearization:
    def test_matches_closed_form(self, params, gains):
        for beta, d in [(0.1, 1.0), (0.55, 5.5), (1.0, 10.0), (0.3, 2.0), (1.45, 18.0)]:
            dev, _ = numeric_linearization_check(params, gains, beta, d)
            assert dev < 1e-6

    def test_zero_gains_give_open_loop_pendulum(self, params):
        dev, A_num = numeric_linearization_check(params, zero_gains(), 0.4, 5.0)
        assert dev < 1e-6
        assert A_num[1, 0] == pytest.approx(-9.81 / 5.0, rel=1e-6)

    def test_extreme_operating_point(self, params, gains):
        dev, _ = numeric_linearization_check(params, gains,
                                             beta=np.pi / 2 - 0.05, d=0.3)
        assert dev < 1e-6

    def test_blocks_decouple(self, params, gains):
        for beta, d in [(0.2, 3.0), (0.9, 8.0)]:
            _, A_num = numeric_linearization_check(params, gains, beta, d)
            cross = np.abs(np.concatenate([A_num[0:2, 2:4].ravel(),
                                           A_num[2:4, 0:2].ravel()]))
            assert np.max(cross) < 1e-8


class TestStabilityMap:
    def test_reference_gains_stable_on_grid(self, params, gains):
        points = stability_map(params, gains,
                               np.linspace(0.05, 1.5, 11),
                               np.linspace(0.5, 20.0, 11))
        assert len(points) == 121
        assert all(p.verdict is Verdict.STABLE for p in points)

    def test_beta_zero_marks_marginal_radial_block(self, params, gains):
        points = stability_map(params, gains, [0.0], [5.0])
        assert points[0].verdict is Verdict.MARGINAL

    def test_zero_gains_marginal_everywhere(self, params):
        points = stability_map(params, zero_gains(), [0.2, 0.8], [2.0, 10.0])
        assert all(p.verdict is Verdict.MARGINAL for p in points)
