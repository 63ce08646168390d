import numpy as np
import pytest

from arflow import (
    AttractionPotential,
    Exponents,
    InverseCDF,
    ReferenceProfile,
    sample_profile,
    steady_qr1,
    steady_residual,
    uniform_state,
)
from arflow.measures import midpoint_grid
from arflow.steady import invert_increasing, shifted_profile_mlt1


class TestInvertIncreasing:
    def test_cubic(self):
        f = lambda x: x**3
        targets = np.array([-8.0, 0.0, 27.0])
        roots = invert_increasing(f, targets, -1.0, 1.0)
        assert np.allclose(roots, [-2.0, 0.0, 3.0], atol=1e-10)

    def test_bracket_expansion(self):
        f = lambda x: x + 100.0
        root = invert_increasing(f, [0.0], 0.0, 1.0)
        assert root[0] == pytest.approx(-100.0, abs=1e-10)


class TestSteadyQr1:
    def test_q2_uniform_recovers_datum(self, uniform_profile):
        n = 400
        ss = steady_qr1(uniform_profile, 2.0, n)
        assert ss.kind == "qa_gt_1"
        z = midpoint_grid(n)
        assert np.max(np.abs(ss.Xstar.x_values - z)) <= 1e-10
        assert ss.x_lo == pytest.approx(0.0, abs=1e-10)
        assert ss.x_zero == pytest.approx(0.5, abs=1e-10)
        assert ss.x_hi == pytest.approx(1.0, abs=1e-10)

    def test_q1_mass_two_window(self, dense2_profile):
        n = 200
        ss = steady_qr1(dense2_profile, 1.0, n)
        assert ss.kind == "qa_eq_1_shift"
        z = midpoint_grid(n)
        assert np.max(np.abs(ss.Xstar.x_values - (z + 0.5) / 2.0)) <= 1e-14
        assert ss.x_lo == pytest.approx(0.25, abs=1e-12)
        assert ss.x_hi == pytest.approx(0.75, abs=1e-12)
        assert ss.x_zero == pytest.approx(0.5, abs=1e-12)

    def test_q1_unit_mass_is_datum(self, uniform_profile):
        n = 100
        ss = steady_qr1(uniform_profile, 1.0, n)
        z = midpoint_grid(n)
        assert np.array_equal(ss.Xstar.x_values, uniform_profile.quantile(z))

    def test_q1_small_mass_none(self, half_profile):
        ss = steady_qr1(half_profile, 1.0, 50)
        assert ss.kind == "none_exists"
        assert ss.Xstar is None

    def test_u_levels(self, gap_profile):
        n = 400
        for q_a in (1.5, 2.0):
            ss = steady_qr1(gap_profile, q_a, n)
            pot = AttractionPotential.build(gap_profile, q_a, num_nodes=n)
            assert pot(ss.x_lo) == pytest.approx(-1.0, abs=1e-10)
            assert pot(ss.x_zero) == pytest.approx(0.0, abs=1e-10)
            assert pot(ss.x_hi) == pytest.approx(1.0, abs=1e-10)
            assert ss.x_lo < ss.x_zero < ss.x_hi

    def test_strictly_increasing_and_median(self, uniform_profile):
        n = 400
        ss = steady_qr1(uniform_profile, 1.7, n)
        assert np.all(np.diff(ss.Xstar.x_values) > 0)
        i_med = n // 2
        assert abs(ss.Xstar.x_values[i_med] - ss.x_zero) <= 2.0 / n

    def test_density_reconstruction(self, uniform_profile):
        # reconstructed steady density matches (1/2) dU/dx at interior nodes
        n = 400
        q_a = 1.5
        ss = steady_qr1(uniform_profile, q_a, n)
        pot = AttractionPotential.build(uniform_profile, q_a, num_nodes=n)
        x = ss.Xstar.x_values
        dx = np.diff(x)
        dens = (1.0 / n) / dx
        du = np.diff(pot(x))
        half_slope = 0.5 * du / dx
        rel = np.abs(dens - half_slope) / half_slope
        assert np.max(rel[5:-5]) <= 5e-2


class TestShiftedProfile:
    def test_half_mass_window(self, half_profile):
        n = 200
        sp = shifted_profile_mlt1(half_profile, n)
        assert sp.window == (0.25, 0.75)
        z = midpoint_grid(n)
        inside = sp.escape == 0
        assert np.allclose(sp.values[inside], 2.0 * (z[inside] - 0.25), atol=1e-12)
        assert np.all(np.isnan(sp.values[~inside]))

    def test_escape_signs(self, half_profile):
        n = 200
        sp = shifted_profile_mlt1(half_profile, n)
        z = midpoint_grid(n)
        assert np.all(sp.escape[z < 0.25] == -1)
        assert np.all(sp.escape[z > 0.75] == 1)

    def test_requires_small_mass(self, dense2_profile):
        with pytest.raises(ValueError):
            shifted_profile_mlt1(dense2_profile, 50)


class TestSteadyResidual:
    def test_constructed_state(self, dense2_profile):
        n = 300
        for q_a in (1.0, 1.5, 2.0):
            ss = steady_qr1(dense2_profile, q_a, n)
            res = steady_residual(ss.Xstar, dense2_profile, Exponents(q_a, 1.0))
            assert res <= 5.0 / n

    def test_far_from_equilibrium(self, uniform_profile):
        n = 64
        X = InverseCDF(np.full(n, 3.0))
        pot = AttractionPotential.build(uniform_profile, 2.0, num_nodes=n)
        res = steady_residual(X, uniform_profile, Exponents(2.0, 1.0))
        z1 = 0.5 / n
        assert res >= abs(2.0 * z1 - 1.0 - pot(3.0)) - 1e-12
        assert res > 0.0

    def test_q2_balanced_translate(self, uniform_profile):
        # m = 1, com(mu) = com(omega): the rhs vanishes identically
        n = 80
        X = sample_profile(uniform_profile, n)
        res = steady_residual(X, uniform_profile, Exponents(2.0, 2.0))
        assert res <= 1e-12
        shifted = ReferenceProfile([2.0, 3.0], [1.0])
        X2 = uniform_state(1.0, 4.0, n)
        res2 = steady_residual(X2, shifted, Exponents(2.0, 2.0))
        assert res2 <= 1e-12
