"""Tests for the Monte-Carlo search and the matrix-inequality checkers."""

import numpy as np
import pytest

from alphaz_fidelity.channels import ChannelClass, channel_class_extrema, random_cptp
from alphaz_fidelity.errors import ParameterError, ValidationError
from alphaz_fidelity.fidelity import OrbitFunctional, ParamPoint
from alphaz_fidelity.oracle import (
    check_alt,
    check_golden_thompson,
    commuting_hermitian_pair,
    dpi_margin,
    mc_channel_extrema,
    mc_orbit_extrema,
    mc_pure_state_extrema,
    mixture_margin,
    random_hermitian,
    rearrangement_bounds,
    refine,
)
from alphaz_fidelity.orbits import orbit_max
from alphaz_fidelity.states import make_rng, maximally_mixed, random_density


class TestMonteCarlo:
    """Test empirical extremum searches."""

    def test_rejects_no_trials(self, diag_rho, diag_sigma, concave_point):
        """Test trials < 1 is refused."""
        with pytest.raises(ParameterError):
            mc_orbit_extrema(diag_rho, diag_sigma, concave_point, trials=0)

    def test_seeded_search_is_reproducible(self, random_pair, concave_point):
        """Test the same seed gives the same extrema."""
        rho, sigma = random_pair
        first = mc_orbit_extrema(rho, sigma, concave_point, trials=50, refine_steps=10, seed=8)
        second = mc_orbit_extrema(rho, sigma, concave_point, trials=50, refine_steps=10, seed=8)
        assert first.emp_max == second.emp_max
        assert first.emp_min == second.emp_min

    def test_refine_stays_on_unitaries(self, random_pair, convex_point):
        """Test local refinement keeps U unitary, never loses ground and stays below the orbit maximum."""
        rho, sigma = random_pair
        functional = OrbitFunctional(rho, sigma, convex_point)
        start = np.eye(3, dtype=complex)
        best, u = refine(functional, start, steps=50, rng=make_rng(3), maximize=True)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(3), atol=1e-10)
        assert best >= functional.value(start)
        assert best == pytest.approx(functional.value(u), abs=1e-12)
        assert best <= orbit_max(rho, sigma, convex_point).value + 1e-9

    def test_pure_state_envelope(self, diag_rho, concave_point):
        """Test sampled pure states stay above lambda_min(rho)."""
        envelope = mc_pure_state_extrema(diag_rho, concave_point, samples=200, seed=1)
        assert envelope.emp_min >= 0.3 - 1e-12

    def test_channel_envelope(self, diag_rho, diag_sigma, concave_point):
        """Test random channels stay above the closed-form minimum."""
        low = channel_class_extrema(diag_rho, diag_sigma, ChannelClass.ALL, concave_point).value
        envelope = mc_channel_extrema(diag_rho, diag_sigma, concave_point, ChannelClass.ALL, samples=100, seed=2)
        assert envelope.emp_min >= low - 1e-10


class TestInequalities:
    """Test the inequality checkers."""

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_golden_thompson(self, seed):
        """Test Tr[e^A e^B] >= Tr[e^(A+B)]."""
        result = check_golden_thompson(random_hermitian(3, seed), random_hermitian(3, seed + 10))
        assert result.margin >= -1e-10
        assert not result.commuting

    def test_golden_thompson_commuting_equality(self):
        """Test equality for commuting A and B."""
        a, b = commuting_hermitian_pair(3, 4)
        result = check_golden_thompson(a, b)
        assert result.commuting
        assert abs(result.margin) < 1e-9

    def test_golden_thompson_rejects_non_hermitian(self):
        """Test non-Hermitian input is refused."""
        with pytest.raises(ValidationError):
            check_golden_thompson([[0.0, 1.0], [0.0, 0.0]], np.eye(2))

    def test_alt_equality_at_r_one(self):
        """Test both sides agree at r = 1."""
        a, b = random_density(3, seed=1).matrix, random_density(3, seed=2).matrix
        assert check_alt(a, b, q=2.0, r=1.0) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("r", [0.5, 2.0])
    def test_alt_margin(self, r):
        """Test the signed margin is non-negative on both sides of r = 1."""
        a, b = random_density(3, seed=3).matrix, random_density(3, seed=4).matrix
        assert check_alt(a, b, q=2.0, r=r) >= -1e-12

    def test_alt_rejects_non_positive(self):
        """Test q, r must be positive."""
        with pytest.raises(ParameterError):
            check_alt(np.eye(2), np.eye(2), q=0.0, r=1.0)

    def test_rearrangement_on_maximally_mixed(self):
        """Test all three quantities coincide for I/d."""
        bounds = rearrangement_bounds(maximally_mixed(3), random_density(3, seed=5))
        assert bounds.lower == pytest.approx(1 / 3)
        assert bounds.value == pytest.approx(1 / 3)
        assert bounds.upper == pytest.approx(1 / 3)

    def test_rearrangement_random(self, random_pair):
        """Test the sandwich on a random pair."""
        rho, sigma = random_pair
        assert rearrangement_bounds(rho, sigma).holds()

    @pytest.mark.parametrize("alpha,z", [(0.5, 0.5), (2.0, 1.5)])
    def test_data_processing(self, random_pair, alpha, z):
        """Test processing by a channel cannot raise the divergence."""
        rho, sigma = random_pair
        p = ParamPoint.of(alpha, z)
        channel = random_cptp(3, 2, seed=6)
        margin = dpi_margin(rho, sigma, channel, p)
        assert (margin if alpha < 1 else -margin) <= 1e-9

    @pytest.mark.parametrize("alpha,z", [(0.5, 0.5), (2.0, 1.5)])
    def test_mixture_margin(self, alpha, z):
        """Test concavity or convexity of T in sigma."""
        rho = random_density(3, seed=7)
        sigmas = [random_density(3, seed=8), random_density(3, seed=9)]
        margin = mixture_margin(rho, sigmas, [0.3, 0.7], ParamPoint.of(alpha, z))
        assert margin.trace_margin >= -1e-10

    def test_mixture_margin_rejects_weights(self, diag_rho, concave_point):
        """Test one weight per state."""
        with pytest.raises(ValidationError):
            mixture_margin(diag_rho, [diag_rho], [0.5, 0.5], concave_point)
