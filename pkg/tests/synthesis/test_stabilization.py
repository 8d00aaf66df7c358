"""Tests for the Bezout pair and the controller parameterization."""

import math

import numpy as np
import pytest

from hinf_delay.core.lti import RationalTF, poly
from hinf_delay.synthesis.stabilization import (
    controller_from_Q, interpolate_bezout, q1_removable_residual, recover_Q1, sensitivity,
)
from hinf_delay.utils.errors import EvaluationError, SynthesisError


def random_stable_Q1(seed):
    """Proper rational Q1 with poles in the open left half plane."""
    rng = np.random.default_rng(seed)
    p1, p2 = rng.uniform(0.5, 5.0, 2)
    return RationalTF(poly(*rng.uniform(-0.3, 0.3, 3)), poly(1.0, 1.0 / p1) * poly(1.0, 1.0 / p2))


class TestBezout:
    """Test suite for solve_bezout."""

    @pytest.mark.unit
    def test_Y_is_constant_inverse_of_M_at_zero(self, fact, bez):
        expected = (2.0 * math.exp(-1.5) + 12.0) / 4.0
        assert bez.Y.degree == (0, 0)
        assert bez.Y(0.0) == pytest.approx(expected)
        assert bez.Y(0.0) == pytest.approx(3.1116, abs=1e-4)

    @pytest.mark.unit
    def test_interpolation_condition(self, fact, bez):
        assert abs(1.0 - fact.M(3.0) * bez.Y(3.0)) < 1e-12

    @pytest.mark.unit
    def test_residual_on_axis_and_right_half_plane(self, bez, grid):
        assert np.max(bez.residual(grid.s)) < 1e-9
        rng = np.random.default_rng(5)
        s = rng.uniform(0.01, 5.0, 100) + 1j * rng.uniform(-20.0, 20.0, 100)
        assert np.max(bez.residual(s)) < 1e-9

    @pytest.mark.unit
    def test_X_finite_at_plant_zero(self, bez):
        value = bez.X(3.0)
        assert np.isfinite(value)
        assert value == pytest.approx(bez.X(3.0 + 2e-4), rel=1e-3)


class TestInterpolation:
    """Test suite for the general interpolant Y = p(s)/(s+1)^(n-1)."""

    @pytest.mark.unit
    def test_two_zeros(self):
        zeros = [1.0, 2.0]
        m_values = [0.5, -0.25]
        Y = interpolate_bezout(zeros, m_values)
        assert Y.degree == (1, 1)
        for z, m in zip(zeros, m_values):
            assert Y(z) * m == pytest.approx(1.0)

    @pytest.mark.unit
    def test_three_zeros_conjugate_pair(self):
        zeros = [2.0, 1.0 + 1.0j, 1.0 - 1.0j]
        m_values = [0.5, 0.3 + 0.2j, 0.3 - 0.2j]
        Y = interpolate_bezout(zeros, m_values)
        assert not np.iscomplexobj(Y.num.coef)
        for z, m in zip(zeros, m_values):
            assert Y(z) * m == pytest.approx(1.0)

    @pytest.mark.unit
    def test_repeated_zeros(self):
        with pytest.raises(SynthesisError) as exc:
            interpolate_bezout([2.0, 2.0], [1.0, 1.0])
        assert exc.value.code == "repeated_zeros"

    @pytest.mark.unit
    def test_degenerate_m(self):
        with pytest.raises(SynthesisError) as exc:
            interpolate_bezout([2.0], [0.0])
        assert exc.value.code == "degenerate_m"


class TestParameterization:
    """Test suite for controller_from_Q, sensitivity and recover_Q1."""

    @pytest.mark.unit
    def test_central_controller_sensitivity(self, fact, bez):
        central = controller_from_Q(fact, bez, RationalTF.constant(0.0))
        S = sensitivity(fact, central)(1j)
        assert abs(S - fact.M(1j) * bez.Y(1j)) < 1e-10

    @pytest.mark.unit
    def test_central_controller_recovers_zero(self, fact, bez, grid):
        central = controller_from_Q(fact, bez, RationalTF.constant(0.0))
        assert np.max(np.abs(recover_Q1(fact, bez, central)(grid.s))) < 1e-9

    @pytest.mark.unit
    @pytest.mark.parametrize("seed", range(5))
    def test_round_trip(self, fact, bez, seed):
        Q1 = random_stable_Q1(seed)
        C = controller_from_Q(fact, bez, Q1)
        s = 1j * np.random.default_rng(seed).uniform(-50.0, 50.0, 100)
        np.testing.assert_allclose(recover_Q1(fact, bez, C)(s), Q1(s), atol=1e-8)

    @pytest.mark.unit
    @pytest.mark.parametrize("seed", range(5))
    def test_closed_loop_identities(self, fact, bez, seed):
        Q1 = random_stable_Q1(seed)
        C = controller_from_Q(fact, bez, Q1)
        s = 1j * np.random.default_rng(100 + seed).uniform(-50.0, 50.0, 100)
        S = sensitivity(fact, C)(s)
        inner = bez.Y(s) - fact.N_i(s) * Q1(s)
        np.testing.assert_allclose(S, fact.M(s) * inner, atol=1e-9)
        N_X_MQ = fact.N(s) * (bez.X(s) + fact.M(s) * Q1(s) / fact.N_o(s))
        np.testing.assert_allclose(1.0 - S, N_X_MQ, atol=1e-9)

    @pytest.mark.unit
    def test_degenerate_denominator(self, fact, bez):
        """Q1 = Y/N_i makes Y - N_i Q1 vanish identically."""
        Q1 = lambda s: bez.Y(s) / fact.N_i(s)
        with pytest.raises(EvaluationError) as exc:
            controller_from_Q(fact, bez, Q1)(1j)
        assert exc.value.code == "degenerate_denominator"


class TestRemovableCondition:
    """Test suite for q1_removable_residual at the plant zero."""

    @pytest.mark.unit
    def test_central_controller(self, fact, bez):
        central = controller_from_Q(fact, bez, RationalTF.constant(0.0))
        assert q1_removable_residual(fact, bez, central) < 1e-9

    @pytest.mark.unit
    def test_pole_at_plant_zero(self, fact, bez):
        """C = 1/(s - a) keeps PC(a) = P'(a) = 1/2, so S(a) = 2/3 and Y - S/M stays at Y/3."""
        C = RationalTF(poly(1.0), poly(-3.0, 1.0))
        residual = q1_removable_residual(fact, bez, C)
        assert residual == pytest.approx(bez.Y(0.0).real / 3.0, rel=1e-3)
