import numpy as np
import pytest

from arflow import (
    AttractionPotential,
    Exponents,
    MassQuadrature,
    attraction_U,
    lipschitz_lambda,
    psi,
    psi_double_prime,
    psi_prime,
)


class TestExponents:
    def test_valid(self):
        e = Exponents(1.7, 1.3)
        assert e.regime == "attraction_dominated"
        assert Exponents(1.5, 1.5).regime == "balanced"

    def test_invalid(self):
        with pytest.raises(ValueError):
            Exponents(1.3, 1.7)
        with pytest.raises(ValueError):
            Exponents(2.5, 1.0)
        with pytest.raises(ValueError):
            Exponents(1.5, 0.5)


class TestPsi:
    def test_values(self):
        assert psi(2.0, -3.0) == 9.0
        assert psi(1.0, -3.0) == 3.0
        assert psi(1.5, 4.0) == 8.0

    def test_range_check(self):
        with pytest.raises(ValueError):
            psi(2.5, 1.0)
        with pytest.raises(ValueError):
            psi_prime(0.5, 1.0)

    def test_prime_quadratic(self, rng):
        x = rng.uniform(-5.0, 5.0, 20)
        assert np.allclose(psi_prime(2.0, x), 2.0 * x, atol=0.0)

    def test_prime_at_zero(self):
        for q in (1.0, 1.3, 1.7, 2.0):
            assert psi_prime(q, 0.0) == 0.0

    def test_prime_value(self):
        assert psi_prime(1.5, -4.0) == pytest.approx(-3.0, abs=1e-14)

    def test_prime_odd(self, rng):
        x = rng.uniform(0.01, 5.0, 50)
        for q in (1.0, 1.2, 1.5, 2.0):
            assert np.array_equal(psi_prime(q, -x), -psi_prime(q, x))

    def test_double_prime(self):
        assert psi_double_prime(2.0, 0.0) == 2.0
        assert psi_double_prime(2.0, 7.0) == 2.0
        assert psi_double_prime(1.5, 4.0) == pytest.approx(0.375, abs=1e-14)
        with pytest.raises(ValueError):
            psi_double_prime(1.5, 0.0)
        with pytest.raises(ValueError):
            psi_double_prime(1.0, np.array([1.0, 0.0]))

    def test_finite_difference(self):
        # central difference converges at order min(2, q) away from 0
        x = 0.7
        for q in (1.3, 1.7, 2.0):
            errs = []
            for h in (1e-3, 1e-4):
                fd = (psi(q, x + h) - psi(q, x - h)) / (2.0 * h)
                errs.append(abs(fd - psi_prime(q, x)))
            assert errs[0] <= 1e-5
            assert errs[1] <= max(errs[0] / 50.0, 1e-12)


class TestAttractionU:
    def test_quadratic_affine(self, uniform_profile):
        pot = AttractionPotential.build(uniform_profile, 2.0, num_nodes=200)
        assert attraction_U(pot, 1.0) == pytest.approx(1.0, abs=1e-12)
        assert attraction_U(pot, 0.5) == pytest.approx(0.0, abs=1e-12)

    def test_q1_left_of_support(self, dense2_profile):
        pot = AttractionPotential.build(dense2_profile, 1.0, num_nodes=100)
        assert attraction_U(pot, -3.0) == -2.0

    def test_q1_median(self, dense2_profile):
        pot = AttractionPotential.build(dense2_profile, 1.0, num_nodes=100)
        assert attraction_U(pot, 0.5) == pytest.approx(0.0, abs=1e-14)

    def test_q1_bounded(self, gap_profile):
        pot = AttractionPotential.build(gap_profile, 1.0, num_nodes=100)
        x = np.linspace(-5.0, 8.0, 300)
        u = attraction_U(pot, x)
        m = gap_profile.mass
        assert np.all(np.abs(u) <= m + 1e-12)

    def test_nondecreasing(self, gap_profile):
        for q_a in (1.0, 1.4, 1.8, 2.0):
            pot = AttractionPotential.build(gap_profile, q_a, num_nodes=150)
            x = np.linspace(-4.0, 7.0, 400)
            u = attraction_U(pot, x)
            assert np.all(np.diff(u) >= -1e-12)

    def test_lipschitz_finite_difference(self, uniform_profile, rng):
        for q_a in (1.0, 1.5, 2.0):
            pot = AttractionPotential.build(uniform_profile, q_a, num_nodes=400)
            lam = lipschitz_lambda(pot)
            a = rng.uniform(-2.0, 3.0, 200)
            b = rng.uniform(-2.0, 3.0, 200)
            du = np.abs(attraction_U(pot, a) - attraction_U(pot, b))
            assert np.all(du <= lam * np.abs(a - b) + 1e-2)

    def test_callable(self, uniform_profile):
        pot = AttractionPotential.build(uniform_profile, 2.0)
        assert pot(1.0) == attraction_U(pot, 1.0)


class TestLipschitzLambda:
    def test_q1(self, uniform_profile):
        pot = AttractionPotential.build(uniform_profile, 1.0)
        assert lipschitz_lambda(pot) == 2.0

    def test_q2(self, uniform_profile):
        pot = AttractionPotential.build(uniform_profile, 2.0)
        assert lipschitz_lambda(pot) == 2.0

    def test_intermediate(self, uniform_profile):
        pot = AttractionPotential.build(uniform_profile, 1.5)
        assert lipschitz_lambda(pot) == pytest.approx(3.75, abs=1e-14)
