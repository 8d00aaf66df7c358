"""Tests for the residue expansion and impulse response of the FIR block."""

import dataclasses

import numpy as np
import pytest

from hinf_delay.core.lti import FrequencyGrid, RationalTF, poly
from hinf_delay.synthesis.fir_analysis import (
    expand, finite_support_residual, impulse_response, sample_trace,
)
from hinf_delay.utils.errors import SynthesisError
from tests.conftest import EXAMPLE_DELTA_WEIGHT


def reference_impulse(t):
    return -0.27 * np.exp(3 * t) + 7.16 * np.cos(1.77 * t) + 0.36 * np.sin(1.77 * t)


class TestExpand:
    """Test suite for the partial fraction expansion."""

    @pytest.mark.acceptance
    def test_poles(self, expansion):
        poles = sorted(expansion.poles, key=lambda p: p.imag)
        np.testing.assert_allclose(poles, [-1.7743j, 3.0, 1.7743j], atol=1e-3)

    @pytest.mark.acceptance
    def test_delta_weight(self, expansion):
        time, weight = expansion.delta_atom
        assert time == 0.5
        assert weight == pytest.approx(EXAMPLE_DELTA_WEIGHT, abs=2e-2)

    @pytest.mark.unit
    def test_direct_term_is_limit_of_B(self, controller, expansion):
        assert controller.B(1e12) == pytest.approx(expansion.direct_B, abs=1e-10)

    @pytest.mark.unit
    def test_conjugate_residues(self, expansion):
        upper = int(np.argmax(expansion.poles.imag))
        lower = int(np.argmin(expansion.poles.imag))
        for residues in (expansion.residues_A, expansion.residues_B):
            assert abs(residues[lower] - np.conj(residues[upper])) < 1e-12

    @pytest.mark.unit
    def test_partial_fraction_round_trip(self, controller, expansion):
        s = FrequencyGrid.log_spaced(1e-2, 1e2, 200).s
        direct = controller.A(s) + controller.B(s) * np.exp(-controller.h * s)
        np.testing.assert_allclose(expansion.frequency_response(s), direct, rtol=1e-9, atol=1e-9)

    @pytest.mark.unit
    def test_repeated_roots(self, controller):
        D = poly(0.0, 0.0, 1.0, 1.0)
        repeated = dataclasses.replace(controller, A=RationalTF(poly(1.0), D), B=RationalTF(poly(1.0), D))
        with pytest.raises(SynthesisError) as exc:
            expand(repeated)
        assert exc.value.code == "repeated_denominator_roots"


class TestFiniteSupport:
    """Test suite for the finite duration of the impulse response."""

    @pytest.mark.acceptance
    def test_residual(self, expansion):
        assert finite_support_residual(expansion) < 1e-6

    @pytest.mark.unit
    def test_perturbed_B_breaks_support(self, controller):
        coefficients = controller.B.num.coef.copy()
        coefficients[1] *= 1.01
        perturbed = dataclasses.replace(controller, B=RationalTF(poly(*coefficients), controller.B.den))
        assert finite_support_residual(expand(perturbed)) > 1e-3

    @pytest.mark.unit
    def test_zero_blocks(self, controller):
        D = controller.A.den
        zero = dataclasses.replace(controller, A=RationalTF(poly(0.0), D), B=RationalTF(poly(0.0), D))
        assert finite_support_residual(expand(zero)) == 0.0

    @pytest.mark.acceptance
    def test_vanishes_after_delay(self, expansion):
        t, values, atoms = sample_trace(expansion, 1.5, 1e-3)
        peak = np.max(np.abs(values[t < 0.5]))
        assert np.max(np.abs(values[t > 0.5 + 1e-9])) < 1e-6 * peak
        assert abs(impulse_response(expansion, 1.0)) < 1e-6 * peak
        assert atoms == [expansion.delta_atom]


class TestImpulseResponse:
    """Test suite for the regular part of the impulse response."""

    @pytest.mark.acceptance
    @pytest.mark.parametrize("t", [0.1, 0.25, 0.4])
    def test_reference_shape(self, expansion, t):
        assert impulse_response(expansion, t) == pytest.approx(reference_impulse(t), rel=2e-2)

    @pytest.mark.unit
    def test_initial_value(self, controller, expansion):
        """Sum of the A residues equals lim s A(s)."""
        expected = controller.A.num.coef[2] / controller.A.den.coef[3]
        assert impulse_response(expansion, 0.0) == pytest.approx(expected, rel=1e-9)

    @pytest.mark.unit
    def test_atom_outside_short_window(self, expansion):
        t, values, atoms = sample_trace(expansion, 0.3, 0.1)
        assert atoms == []
        assert t[-1] == pytest.approx(0.3)
        assert values.shape == t.shape
