"""Tests for closed-form extrema over the unitary orbit."""

import math

import numpy as np
import pytest

from alphaz_fidelity.errors import ParameterError, PreconditionError, RangeError, UnsupportedRegionError
from alphaz_fidelity.fidelity import ParamPoint, alpha_z_fidelity
from alphaz_fidelity.oracle import mc_orbit_extrema
from alphaz_fidelity.orbits import (
    ORBIT_MIN_REGION,
    ExtremumKind,
    GeodesicPath,
    Pairing,
    geodesic_path,
    orbit_max,
    orbit_min,
    orbit_min_covered,
    orbit_path_value,
    orbit_renyi_extrema,
    solve_orbit_target,
)
from alphaz_fidelity.states import density_from_spectrum, pure_state

ALIGNED_HALF = (math.sqrt(0.42) + math.sqrt(0.12)) ** 2
REVERSED_HALF = (math.sqrt(0.28) + math.sqrt(0.18)) ** 2
ALIGNED_TWO = math.sqrt(0.49 / 0.6 + 0.09 / 0.4)
REVERSED_TWO = math.sqrt(0.49 / 0.4 + 0.09 / 0.6)


class TestOrbitMax:
    """Test the orbit maximum."""

    def test_alpha_below_one_aligned(self, diag_rho, diag_sigma):
        """Test the aligned pairing for alpha < 1, independent of z."""
        ext = orbit_max(diag_rho, diag_sigma, ParamPoint.of(0.5, 3.0))
        assert ext.value == pytest.approx(0.98900, abs=1e-5)
        assert ext.value == pytest.approx(ALIGNED_HALF, abs=1e-12)
        assert ext.pairing is Pairing.ALIGNED
        assert ext.kind is ExtremumKind.MAX

    def test_alpha_above_one_reversed(self, diag_rho, diag_sigma, convex_point):
        """Test the reversed pairing for alpha > 1."""
        ext = orbit_max(diag_rho, diag_sigma, convex_point)
        assert ext.value == pytest.approx(1.17260, abs=1e-5)
        assert ext.pairing is Pairing.REVERSED

    @pytest.mark.parametrize("alpha,z", [(0.5, 0.5), (0.3, 2.0), (2.0, 1.5), (3.0, 0.7)])
    def test_achieving_unitary_attains_value(self, diag_rho, rotated_sigma, alpha, z):
        """Test F(rho, U sigma U*) equals the closed form at the returned unitary."""
        p = ParamPoint.of(alpha, z)
        ext = orbit_max(diag_rho, rotated_sigma, p)
        f = alpha_z_fidelity(diag_rho, rotated_sigma.evolve(ext.achieving_unitary), p).fidelity
        assert f == pytest.approx(ext.value, abs=1e-10)

    def test_alpha_one_refused(self, diag_rho, diag_sigma):
        """Test alpha = 1 is refused."""
        with pytest.raises(ParameterError):
            orbit_max(diag_rho, diag_sigma, ParamPoint.of(1.0, 1.0))

    def test_rank_deficient_sigma_above_one(self, diag_rho, convex_point):
        """Test alpha > 1 needs a full-rank sigma."""
        with pytest.raises(PreconditionError, match="full-rank"):
            orbit_max(diag_rho, pure_state([1.0, 0.0]), convex_point)

    def test_rank_deficient_sigma_below_one(self, diag_rho, concave_point):
        """Test alpha < 1 accepts a pure sigma and gives lambda_max(rho)."""
        ext = orbit_max(diag_rho, pure_state([0.0, 1.0]), concave_point)
        assert ext.value == pytest.approx(0.7, abs=1e-12)


class TestOrbitMin:
    """Test the orbit minimum and its coverage."""

    def test_z_below_one_alpha_below_one(self, diag_rho, diag_sigma, concave_point):
        """Test the reversed pairing."""
        ext = orbit_min(diag_rho, diag_sigma, concave_point)
        assert ext.value == pytest.approx(REVERSED_HALF, abs=1e-12)
        assert ext.value == pytest.approx(0.908998, abs=1e-6)
        assert ext.pairing is Pairing.REVERSED

    def test_z_below_one_alpha_above_one(self, diag_rho, diag_sigma):
        """Test the aligned pairing for alpha > 1, z < 1."""
        ext = orbit_min(diag_rho, diag_sigma, ParamPoint.of(2.0, 0.7))
        assert ext.value == pytest.approx(ALIGNED_TWO, abs=1e-12)
        assert ext.pairing is Pairing.ALIGNED

    def test_convex_region(self, diag_rho, diag_sigma, convex_point):
        """Test the aligned pairing in the convex region."""
        assert orbit_min(diag_rho, diag_sigma, convex_point).value == pytest.approx(1.020621, abs=1e-6)

    def test_uncovered_region(self, diag_rho, diag_sigma):
        """Test (0.5, 2) has no closed form and the error states the covered region."""
        with pytest.raises(UnsupportedRegionError) as info:
            orbit_min(diag_rho, diag_sigma, ParamPoint.of(0.5, 2.0))
        assert info.value.stated_region == ORBIT_MIN_REGION

    @pytest.mark.parametrize(
        "alpha,z,covered",
        [(0.5, 0.5, True), (0.5, 2.0, False), (2.0, 0.7, True), (2.0, 1.5, True), (3.0, 1.5, False), (1.0, 0.5, False)],
    )
    def test_coverage(self, alpha, z, covered):
        """Test the coverage predicate."""
        assert orbit_min_covered(ParamPoint.of(alpha, z)) is covered

    def test_min_below_max(self, random_pair):
        """Test min <= max on a random pair."""
        rho, sigma = random_pair
        for p in (ParamPoint.of(0.5, 0.5), ParamPoint.of(2.0, 1.5), ParamPoint.of(3.0, 2.5)):
            assert orbit_min(rho, sigma, p).value <= orbit_max(rho, sigma, p).value + 1e-12


class TestAgainstSampling:
    """Test the closed forms bound a Monte-Carlo search."""

    @pytest.mark.parametrize("alpha,z", [(0.5, 0.5), (2.0, 1.5)])
    def test_sandwich(self, random_pair, alpha, z):
        """Test sampled values never leave [orbit_min, orbit_max]."""
        rho, sigma = random_pair
        p = ParamPoint.of(alpha, z)
        mc = mc_orbit_extrema(rho, sigma, p, trials=300, refine_steps=50, seed=3)
        assert mc.emp_max <= orbit_max(rho, sigma, p).value + 1e-9
        assert mc.emp_min >= orbit_min(rho, sigma, p).value - 1e-9

    def test_closure_d2(self, diag_rho, diag_sigma, convex_point):
        """Test the search gets within 1e-3 of the maximum for d = 2."""
        mc = mc_orbit_extrema(diag_rho, diag_sigma, convex_point, trials=2000, refine_steps=200, seed=42)
        assert REVERSED_TWO - 1e-3 <= mc.emp_max <= REVERSED_TWO + 1e-9


class TestOrbitInterval:
    """Test traversal of the orbit interval."""

    @pytest.mark.parametrize("alpha,z", [(0.5, 0.5), (2.0, 1.5)])
    def test_solve_target(self, random_pair, alpha, z):
        """Test an interior target is reached."""
        rho, sigma = random_pair
        p = ParamPoint.of(alpha, z)
        low, high = orbit_min(rho, sigma, p).value, orbit_max(rho, sigma, p).value
        target = low + 0.37 * (high - low)
        solution = solve_orbit_target(rho, sigma, target, p)
        assert 0.0 <= solution.t <= 1.0
        assert solution.achieved == pytest.approx(target, abs=1e-8)

    def test_endpoint_targets(self, diag_rho, rotated_sigma, convex_point):
        """Test targets at the ends of the interval."""
        high = orbit_max(diag_rho, rotated_sigma, convex_point).value
        assert solve_orbit_target(diag_rho, rotated_sigma, high, convex_point).achieved == pytest.approx(high, abs=1e-8)

    def test_target_out_of_range(self, diag_rho, diag_sigma, convex_point):
        """Test a target above the maximum is refused."""
        with pytest.raises(RangeError):
            solve_orbit_target(diag_rho, diag_sigma, REVERSED_TWO + 1e-3, convex_point)

    @pytest.mark.parametrize("alpha,z", [(0.5, 2.0), (2.0, 0.7)])
    def test_uncovered_region(self, diag_rho, diag_sigma, alpha, z):
        """Test traversal outside the covered region is refused."""
        with pytest.raises(UnsupportedRegionError):
            solve_orbit_target(diag_rho, diag_sigma, 1.0, ParamPoint.of(alpha, z))

    def test_geodesic_endpoints(self, random_pair, convex_point):
        """Test the path starts at the minimum and ends at the maximum."""
        rho, sigma = random_pair
        path = geodesic_path(rho, sigma, convex_point)
        assert orbit_path_value(rho, sigma, path, 0.0, convex_point) == pytest.approx(
            orbit_min(rho, sigma, convex_point).value, abs=1e-8
        )
        assert orbit_path_value(rho, sigma, path, 1.0, convex_point) == pytest.approx(
            orbit_max(rho, sigma, convex_point).value, abs=1e-8
        )

    def test_path_parameter_range(self):
        """Test t outside [0, 1] is refused."""
        path = GeodesicPath(l0=np.zeros((2, 2), dtype=complex), l1=np.zeros((2, 2), dtype=complex))
        with pytest.raises(ParameterError):
            path.unitary_at(1.5)


class TestOrbitRenyi:
    """Test orbit extrema of the Renyi divergence."""

    def test_alpha_two(self, diag_rho, diag_sigma, convex_point):
        """Test max from the reversed pairing and min from the aligned one."""
        extrema = orbit_renyi_extrema(diag_rho, diag_sigma, convex_point)
        assert extrema.max == pytest.approx(0.31846, abs=1e-5)
        assert extrema.min == pytest.approx(math.log(0.49 / 0.6 + 0.09 / 0.4), abs=1e-12)

    def test_alpha_half(self, diag_rho, diag_sigma, concave_point):
        """Test the sign flip of the log map below alpha = 1."""
        extrema = orbit_renyi_extrema(diag_rho, diag_sigma, concave_point)
        assert extrema.min == pytest.approx(0.01106, abs=1e-5)
        assert extrema.max == pytest.approx(-math.log(REVERSED_HALF), abs=1e-12)

    def test_uncovered_max(self, diag_rho, diag_sigma):
        """Test the maximum is None where the fidelity minimum has no closed form."""
        extrema = orbit_renyi_extrema(diag_rho, diag_sigma, ParamPoint.of(0.5, 3.0))
        assert extrema.max is None
        assert extrema.min is not None

    def test_rank_deficient_sigma(self, diag_rho, concave_point):
        """Test a rank-deficient sigma is refused."""
        with pytest.raises(PreconditionError):
            orbit_renyi_extrema(diag_rho, density_from_spectrum([1.0, 0.0]), concave_point)
