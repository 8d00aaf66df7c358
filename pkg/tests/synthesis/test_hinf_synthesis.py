"""Tests for gamma scalars, the interpolation matrix and the gamma search."""

import numpy as np
import pytest

from hinf_delay.core.config import PlantParams, SearchConfig, WeightConfig
from hinf_delay.synthesis.hinf_synthesis import (
    admissible_interval, build_M_gamma, find_gamma_opt, gamma_scalars, null_vector,
    scan_gamma, sigma_min_ratio,
)
from hinf_delay.synthesis.plant_factory import factor_plant
from hinf_delay.utils.errors import SynthesisError
from tests.conftest import EXAMPLE_GAMMA_OPT


def random_weights(count, seed=13):
    rng = np.random.default_rng(seed)
    return [
        WeightConfig(rho=rng.uniform(0.2, 1.0), alpha=rng.uniform(0.05, 0.3), beta=rng.uniform(0.2, 0.8))
        for _ in range(count)
    ]


class TestGammaScalars:
    """Test suite for gamma_scalars and admissible_interval."""

    @pytest.mark.unit
    def test_admissible_interval(self, example_weights):
        lower, upper = admissible_interval(example_weights)
        assert lower == pytest.approx(0.5 / np.sqrt(1.04))
        assert lower == pytest.approx(0.4903, abs=1e-4)
        assert upper == pytest.approx(2.5)

    @pytest.mark.unit
    def test_small_rho_picks_alpha(self):
        assert admissible_interval(WeightConfig(rho=1e-9, alpha=0.1, beta=0.4)) == pytest.approx((0.1, 2.5))

    @pytest.mark.unit
    def test_example_gamma(self, example_weights):
        g = gamma_scalars(example_weights, EXAMPLE_GAMMA_OPT)
        assert g.omega_gamma == pytest.approx(1.774, abs=1e-3)
        assert g.a_gamma == pytest.approx(0.4881, abs=1e-4)
        assert g.b_gamma == pytest.approx(0.5020, abs=1e-4)
        s = 0.3 + 0.8j
        expected = EXAMPLE_GAMMA_OPT * (0.4 - s) / (g.a_gamma + g.b_gamma * s)
        assert g.F_gamma(s) == pytest.approx(expected)

    @pytest.mark.unit
    def test_upper_end_gives_zero_frequency(self, example_weights):
        assert gamma_scalars(example_weights, 1.0 / 0.4).omega_gamma == 0.0

    @pytest.mark.unit
    @pytest.mark.parametrize("gamma", [0.3, 3.0, -1.0])
    def test_out_of_interval(self, example_weights, gamma):
        with pytest.raises(SynthesisError) as exc:
            gamma_scalars(example_weights, gamma)
        assert exc.value.code == "out_of_interval"

    @pytest.mark.unit
    def test_radicands_positive_inside_interval(self):
        rng = np.random.default_rng(17)
        for w in random_weights(100):
            lower, upper = admissible_interval(w)
            g = gamma_scalars(w, rng.uniform(lower, upper) * (1 - 1e-9) + lower * 1e-9)
            assert g.a_gamma > 0 and g.b_gamma > 0 and g.omega_gamma > 0


class TestMGamma:
    """Test suite for the interpolation matrix and its singular values."""

    @pytest.mark.unit
    def test_real_rows_at_plant_zero(self, fact, example_weights):
        Mg = build_M_gamma(fact, example_weights, gamma_scalars(example_weights, 0.8))
        assert Mg.shape == (4, 4)
        assert np.all(Mg[[1, 3]].imag == 0)

    @pytest.mark.unit
    def test_unimodular_entry_on_axis(self, fact):
        rng = np.random.default_rng(19)
        for w in random_weights(20):
            lower, upper = admissible_interval(w)
            g = gamma_scalars(w, rng.uniform(lower, upper))
            Mg = build_M_gamma(fact, w, g)
            assert abs(Mg[0, 2]) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.unit
    def test_nearly_singular_at_reference_gamma(self, fact, example_weights):
        Mg = build_M_gamma(fact, example_weights, gamma_scalars(example_weights, EXAMPLE_GAMMA_OPT))
        assert sigma_min_ratio(Mg) < 1e-3

    @pytest.mark.unit
    def test_sigma_ratio_identity(self):
        assert sigma_min_ratio(np.eye(4)) == pytest.approx(1.0)

    @pytest.mark.unit
    def test_sigma_ratio_duplicated_row(self):
        Mg = np.random.default_rng(2).normal(size=(4, 4)) + 0j
        Mg[3] = Mg[1]
        assert sigma_min_ratio(Mg) < 1e-14

    @pytest.mark.unit
    def test_sigma_ratio_known_singular_values(self):
        rng = np.random.default_rng(4)
        U, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
        V, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
        Mg = U @ np.diag([4.0, 3.0, 2.0, 1.0]) @ V.conj().T
        assert sigma_min_ratio(Mg) == pytest.approx(0.25, abs=1e-12)

    @pytest.mark.unit
    def test_null_vector_of_rank_deficient_matrix(self):
        Mg = np.diag([1.0, 2.0, 3.0, 0.0]).astype(complex)
        l, imag_residue = null_vector(Mg)
        np.testing.assert_allclose(l, [0.0, 0.0, 0.0, 1.0], atol=1e-15)
        assert imag_residue == 0.0


class TestGammaSearch:
    """Test suite for find_gamma_opt on the example design."""

    @pytest.mark.acceptance
    def test_gamma_opt(self, gamma_result, example_weights):
        lower, upper = admissible_interval(example_weights)
        assert gamma_result.gamma_opt == pytest.approx(EXAMPLE_GAMMA_OPT, abs=1e-3)
        assert lower < gamma_result.gamma_opt < upper

    @pytest.mark.acceptance
    def test_singularity_and_null_vector(self, gamma_result, fact, example_weights):
        assert gamma_result.ratio_at_opt < 1e-8
        Mg = build_M_gamma(fact, example_weights, gamma_scalars(example_weights, gamma_result.gamma_opt))
        assert np.linalg.norm(gamma_result.l) == pytest.approx(1.0)
        assert np.linalg.norm(Mg @ gamma_result.l) < 1e-7
        assert gamma_result.imag_residue < 1e-6

    @pytest.mark.acceptance
    def test_null_vector_ratio(self, gamma_result):
        l10, l11, l20, l21 = gamma_result.l
        assert l20 / l21 == pytest.approx(3.725 / 2.0, abs=2e-3)

    @pytest.mark.unit
    def test_largest_candidate_is_returned(self, gamma_result):
        assert gamma_result.candidates
        assert max(gamma_result.candidates) == gamma_result.gamma_opt

    @pytest.mark.unit
    def test_scan_curve(self, gamma_result, example_weights):
        gammas, ratios = np.array(gamma_result.curve).T
        lower, upper = admissible_interval(example_weights)
        assert gammas.size == 4000
        assert np.all(np.isfinite(ratios))
        assert gammas[0] > lower and gammas[-1] < upper

    @pytest.mark.unit
    def test_threaded_scan_matches(self, fact, example_weights):
        search = SearchConfig(points=400)
        serial = scan_gamma(fact, example_weights, search, workers=1)
        threaded = scan_gamma(fact, example_weights, search, workers=3)
        np.testing.assert_array_equal(serial[0], threaded[0])
        np.testing.assert_array_equal(serial[1], threaded[1])

    @pytest.mark.unit
    def test_no_singular_gamma(self, fact, example_weights):
        with pytest.raises(SynthesisError) as exc:
            find_gamma_opt(fact, example_weights, SearchConfig(points=200, accept=1e-300))
        assert exc.value.code == "no_singular_gamma"

    @pytest.mark.unit
    def test_no_crossing_in_admissible_interval(self):
        """The ratio stays bounded away from zero for this valid parameter set."""
        fact = factor_plant(PlantParams(k=1.469, a=2.631, b=0.543, h=0.338))
        weights = WeightConfig(rho=0.911, alpha=0.122, beta=0.664)
        with pytest.raises(SynthesisError) as exc:
            find_gamma_opt(fact, weights)
        assert exc.value.code == "no_singular_gamma"
