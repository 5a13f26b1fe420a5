"""Tests for Kraus channels and channel-evolution extrema."""

import logging
import math

import numpy as np
import pytest

from alphaz_fidelity.channels import (
    ChannelClass,
    ChannelTag,
    KrausChannel,
    channel_class_extrema,
    channel_class_renyi_extrema,
    channel_from_json,
    channel_to_json,
    heisenberg_weyl,
    identity_channel,
    majorization_margins,
    mixed_unitary,
    pinching,
    pure_state_extrema,
    random_cptp,
    random_mixed_unitary,
    replacement,
    unital_majorization_check,
)
from alphaz_fidelity.errors import PreconditionError, UnsupportedRegionError, ValidationError
from alphaz_fidelity.fidelity import ParamPoint, alpha_z_fidelity
from alphaz_fidelity.states import UnitaryMatrix, density_from_spectrum, haar_unitary, maximally_mixed, random_density


class TestKrausChannel:
    """Test channel construction and tag derivation."""

    def test_identity_tags(self):
        """Test the identity channel is CPTP, unital and mixed unitary."""
        channel = identity_channel(3)
        assert channel.class_tags == frozenset({ChannelTag.CPTP, ChannelTag.UNITAL, ChannelTag.MIXED_UNITARY})

    def test_rejects_non_trace_preserving(self):
        """Test a family with sum K*K != I is refused."""
        with pytest.raises(ValidationError, match="trace preserving"):
            KrausChannel.from_kraus([0.5 * np.eye(2)])

    def test_rejects_unsatisfied_tag(self):
        """Test a requested tag must hold for the operators."""
        with pytest.raises(ValidationError, match="pinching"):
            KrausChannel.from_kraus([np.eye(2)], tags=["pinching"])

    def test_rejects_unknown_tag(self):
        """Test an unknown tag name is refused."""
        with pytest.raises(ValidationError, match="unknown channel tag"):
            KrausChannel.from_kraus([np.eye(2)], tags=["teleport"])

    def test_pinching_diagonalizes(self):
        """Test pinching in the computational basis keeps only the diagonal."""
        channel = pinching(UnitaryMatrix.identity(3))
        rho = random_density(3, seed=6)
        assert channel.has(ChannelTag.PINCHING)
        assert channel.has(ChannelTag.UNITAL)
        np.testing.assert_allclose(channel.apply(rho).matrix, np.diag(np.diag(rho.matrix)), atol=1e-14)

    def test_replacement_outputs_tau(self):
        """Test Phi(X) = Tr(X) tau."""
        tau = random_density(3, seed=7)
        channel = replacement(tau)
        assert channel.has(ChannelTag.REPLACEMENT)
        assert not channel.has(ChannelTag.UNITAL)
        np.testing.assert_allclose(channel.apply(random_density(3, seed=8)).matrix, tau.matrix, atol=1e-12)

    def test_heisenberg_weyl_depolarizes(self):
        """Test the uniform mixture of displacement operators sends every state to I/d."""
        ops = heisenberg_weyl(3)
        assert len(ops) == 9
        channel = mixed_unitary([1 / 9] * 9, ops)
        np.testing.assert_allclose(channel.apply(random_density(3, seed=9)).matrix, np.eye(3) / 3, atol=1e-12)

    def test_random_channels(self):
        """Test random constructors satisfy their classes."""
        assert random_cptp(3, 2, seed=1).has(ChannelTag.CPTP)
        channel = random_mixed_unitary(3, 3, seed=1)
        assert channel.has(ChannelTag.UNITAL)
        assert channel.has(ChannelTag.MIXED_UNITARY)

    def test_dimension_mismatch(self):
        """Test applying to a state of another dimension is refused."""
        with pytest.raises(ValidationError):
            identity_channel(2).apply(maximally_mixed(3))

    def test_json(self):
        """Test the JSON form re-validates and keeps tags."""
        channel = channel_from_json(channel_to_json(pinching(haar_unitary(2, 3))))
        assert channel.has(ChannelTag.PINCHING)

    def test_json_names_field(self):
        """Test a malformed payload names the field."""
        with pytest.raises(ValidationError, match="'kraus'"):
            channel_from_json({"dim": 2})


class TestPureStateExtrema:
    """Test extrema over pure states."""

    def test_concave_minimum(self, diag_rho, concave_point):
        """Test lambda_min(rho), attained at the bottom eigenvector."""
        ext = pure_state_extrema(diag_rho, concave_point)
        assert ext.kind == "min"
        assert ext.value == pytest.approx(0.3)
        assert alpha_z_fidelity(diag_rho, ext.state, concave_point).fidelity == pytest.approx(0.3, abs=1e-12)

    def test_convex_maximum(self, diag_rho, convex_point):
        """Test lambda_max(rho), attained at the top eigenvector on its support."""
        ext = pure_state_extrema(diag_rho, convex_point)
        assert ext.kind == "max"
        assert ext.value == pytest.approx(0.7)
        value = alpha_z_fidelity(diag_rho, ext.state, convex_point, strict=False)
        assert value.fidelity == pytest.approx(0.7, abs=1e-12)

    def test_uncovered(self, diag_rho):
        """Test (alpha, z) outside both regions."""
        with pytest.raises(UnsupportedRegionError):
            pure_state_extrema(diag_rho, ParamPoint.of(0.3, 0.5))


class TestChannelExtrema:
    """Test extrema over channel classes."""

    def test_all_channels_on_maximally_mixed(self, concave_point):
        """Test the minimum over all channels at rho = I/4 is 1/4."""
        ext = channel_class_extrema(maximally_mixed(4), random_density(4, seed=2), ChannelClass.ALL, concave_point)
        assert ext.value == pytest.approx(0.25)
        assert ext.kind == "min"

    def test_all_channel_achiever(self, diag_rho, rotated_sigma, concave_point):
        """Test the replacement channel attains the minimum."""
        ext = channel_class_extrema(diag_rho, rotated_sigma, "all", concave_point)
        achieved = alpha_z_fidelity(diag_rho, ext.channel.apply(rotated_sigma), concave_point).fidelity
        assert achieved == pytest.approx(ext.value, abs=1e-12)

    def test_mixed_unitary_maximum(self, diag_rho, diag_sigma, convex_point):
        """Test the convex-region maximum equals the reversed pairing."""
        ext = channel_class_extrema(diag_rho, diag_sigma, ChannelClass.MIXED_UNITARY, convex_point)
        assert ext.kind == "max"
        assert ext.value == pytest.approx(1.17260, abs=1e-5)
        achieved = alpha_z_fidelity(diag_rho, ext.channel.apply(diag_sigma), convex_point).fidelity
        assert achieved == pytest.approx(ext.value, abs=1e-10)

    def test_mixed_unitary_minimum(self, diag_rho, diag_sigma, concave_point):
        """Test the concave-region minimum equals the reversed pairing."""
        ext = channel_class_extrema(diag_rho, diag_sigma, ChannelClass.MIXED_UNITARY, concave_point)
        assert ext.value == pytest.approx((math.sqrt(0.28) + math.sqrt(0.18)) ** 2, abs=1e-12)

    def test_mixed_unitary_max_needs_full_rank(self, diag_rho, convex_point):
        """Test a rank-deficient sigma is refused for the maximum."""
        with pytest.raises(PreconditionError):
            channel_class_extrema(diag_rho, density_from_spectrum([1.0, 0.0]), ChannelClass.MIXED_UNITARY, convex_point)

    def test_all_channel_minimum_is_proven(self, diag_rho, diag_sigma, concave_point):
        """Test the concave-region minimum carries the proven flag."""
        assert channel_class_extrema(diag_rho, diag_sigma, ChannelClass.ALL, concave_point).proven

    def test_all_channel_maximum_is_replacement_value(self, diag_rho, diag_sigma, convex_point, caplog):
        """Test the convex-region value is lambda_max(rho), flagged unproven and exceeded by a full-rank image."""
        with caplog.at_level(logging.WARNING, logger="alphaz_fidelity.channels"):
            ext = channel_class_extrema(diag_rho, diag_sigma, ChannelClass.ALL, convex_point)
        assert ext.value == pytest.approx(0.7)
        assert ext.proven is False
        assert "not the maximum" in ext.description
        assert "not a maximum over all channels" in caplog.text

        image = replacement(density_from_spectrum([0.99, 0.01])).apply(diag_sigma)
        exceeded = alpha_z_fidelity(diag_rho, image, convex_point).fidelity
        assert exceeded == pytest.approx(math.sqrt(0.49 / 0.99 + 0.09 / 0.01), abs=1e-10)
        assert exceeded > ext.value

    def test_uncovered_region(self, diag_rho, diag_sigma):
        """Test the region gate."""
        with pytest.raises(UnsupportedRegionError):
            channel_class_extrema(diag_rho, diag_sigma, ChannelClass.ALL, ParamPoint.of(1.5, 0.5))

    def test_renyi(self, diag_rho, diag_sigma, convex_point):
        """Test the Renyi extremum from the fidelity extremum."""
        value = channel_class_renyi_extrema(diag_rho, diag_sigma, ChannelClass.MIXED_UNITARY, convex_point)
        assert value == pytest.approx(math.log(1.375), abs=1e-12)


class TestMajorization:
    """Test unital channels and majorization."""

    def test_margins(self):
        """Test partial-sum margins in both directions."""
        np.testing.assert_allclose(majorization_margins([0.5, 0.5], [1.0, 0.0]), [0.5])
        np.testing.assert_allclose(majorization_margins([1.0, 0.0], [0.5, 0.5]), [-0.5])

    @pytest.mark.parametrize("alpha", [0.5, 2.0])
    def test_unital_channel_holds(self, random_pair, alpha):
        """Test Phi(sigma) is majorized by sigma and the fidelity comparison holds."""
        rho, sigma = random_pair
        report = unital_majorization_check(sigma, pinching(haar_unitary(3, 5)), rho, alpha)
        assert report.holds(1e-9)
        assert report.fidelity_margin is not None

    def test_non_unital_refused(self, diag_sigma):
        """Test a replacement channel is not unital."""
        with pytest.raises(PreconditionError):
            unital_majorization_check(diag_sigma, replacement(density_from_spectrum([0.7, 0.3])))
