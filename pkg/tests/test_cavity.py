"""
Tests for src/cavity.py: exact enumeration, angle-lattice moments,
spread growth and weighted separation.
"""

import math

import numpy as np
import pytest

from src.cavity import (
    BeamNode,
    CavityConfig,
    analytic_spread,
    checkpoint_passes,
    enumerate_exact,
    fit_growth_exponent,
    linear_split_spread,
    propagate_moments,
    weighted_separation,
)
from src.errors import DomainError, EnumerationLimitError, FitError

LAB_THETA_MODE = 7.878e-16


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------


@pytest.fixture
def unit_cavity() -> CavityConfig:
    """theta * L = 1, so positions are in lattice units."""
    return CavityConfig(pass_length=1.0, passes=2, theta_mode=1.0)


@pytest.fixture(scope="module")
def lab_run():
    config = CavityConfig(pass_length=1.0, passes=10_000, theta_mode=LAB_THETA_MODE)
    lattice, report = propagate_moments(config)
    return config, lattice, report


# ---------------------------------------------------------------------------
# Config validation
# ---------------------------------------------------------------------------


class TestCavityConfig:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(DomainError, match="sum to 1"):
            CavityConfig(pass_length=1.0, passes=10, theta_mode=1e-3, split_weights=(0.7, 0.2))

    def test_negative_theta(self):
        with pytest.raises(DomainError, match="theta_mode"):
            CavityConfig(pass_length=1.0, passes=10, theta_mode=-1e-3)

    def test_passes_must_be_integer(self):
        with pytest.raises(DomainError, match="passes"):
            CavityConfig(pass_length=1.0, passes=2.5, theta_mode=1e-3)

    def test_loss_range(self):
        with pytest.raises(DomainError, match="axion_loss"):
            CavityConfig(pass_length=1.0, passes=10, theta_mode=1e-3, axion_loss=1.0)

    def test_with_passes_and_theta(self):
        config = CavityConfig(pass_length=2.0, passes=10, theta_mode=1e-3, axion_loss=0.1)
        other = config.with_passes(20).with_theta(2e-3)
        assert (other.passes, other.theta_mode, other.axion_loss) == (20, 2e-3, 0.1)
        assert config.survival == pytest.approx(0.9)


# ---------------------------------------------------------------------------
# Exact enumeration
# ---------------------------------------------------------------------------


class TestEnumerateExact:
    def test_first_pass_splits_symmetrically(self):
        leaves = enumerate_exact(CavityConfig(pass_length=2.0, passes=1, theta_mode=1e-3))
        assert leaves.y.tolist() == pytest.approx([1e-3, -1e-3])
        assert leaves.angle_index.tolist() == [1, -1]
        assert leaves.weight.tolist() == [0.5, 0.5]

    def test_two_passes(self, unit_cavity):
        leaves = enumerate_exact(unit_cavity)
        assert sorted(leaves.y.tolist()) == [-2.0, -1.0, 1.0, 2.0]
        assert sorted(leaves.angle_index.tolist()) == [-2, 0, 0, 2]
        assert leaves.weight.sum() == pytest.approx(1.0)

    def test_leaf_count_and_weight(self):
        config = CavityConfig(pass_length=1.0, passes=12, theta_mode=1e-6, split_weights=(0.7, 0.3))
        leaves = enumerate_exact(config)
        assert len(leaves) == 2**12
        assert leaves.weight.sum() == pytest.approx(1.0, rel=1e-12)

    def test_iterates_as_nodes(self, unit_cavity):
        nodes = enumerate_exact(unit_cavity).to_nodes()
        assert all(isinstance(n, BeamNode) for n in nodes)
        assert {n.depth for n in nodes} == {2}
        assert nodes[0].angle == pytest.approx(2.0)

    def test_memory_guard(self):
        config = CavityConfig(pass_length=1.0, passes=23, theta_mode=1e-6)
        with pytest.raises(EnumerationLimitError):
            enumerate_exact(config)

    def test_exact_separation(self, unit_cavity):
        """Leaves at +-1 and +-2 with equal weight: E|y| = 1.5."""
        assert weighted_separation(enumerate_exact(unit_cavity)) == pytest.approx(1.5)


# ---------------------------------------------------------------------------
# Angle-lattice moments
# ---------------------------------------------------------------------------


class TestPropagateMoments:
    @pytest.mark.parametrize("weights", [(0.5, 0.5), (0.7, 0.3)])
    def test_matches_enumeration(self, weights):
        config = CavityConfig(pass_length=1.0, passes=16, theta_mode=1e-3, split_weights=weights)
        leaves = enumerate_exact(config)
        lattice, report = propagate_moments(config)
        mean = np.sum(leaves.weight * leaves.y) / leaves.weight.sum()
        std = math.sqrt(np.sum(leaves.weight * (leaves.y - mean) ** 2) / leaves.weight.sum())
        assert report.std_y == pytest.approx(std, rel=1e-10)
        for summary in lattice:
            mask = leaves.angle_index == summary.angle_index
            assert summary.weight == pytest.approx(leaves.weight[mask].sum(), rel=1e-12)
            assert summary.mean_y == pytest.approx(
                np.sum(leaves.weight[mask] * leaves.y[mask]) / leaves.weight[mask].sum(),
                rel=1e-10,
                abs=1e-12 * config.theta_mode * config.pass_length * config.passes,
            )

    @pytest.mark.parametrize("weights", [(0.5, 0.5), (0.7, 0.3)])
    def test_separation_close_to_enumeration(self, weights):
        """The per-node folded-normal mean stays within 2% of the exact sum of w|y|."""
        config = CavityConfig(pass_length=1.0, passes=16, theta_mode=1e-3, split_weights=weights)
        lattice, report = propagate_moments(config)
        exact = weighted_separation(enumerate_exact(config))
        assert weighted_separation(lattice) == pytest.approx(exact, rel=0.02)
        assert report.weighted_separation == pytest.approx(exact, rel=0.02)

    def test_mirror_symmetry_with_equal_weights(self):
        config = CavityConfig(pass_length=1.0, passes=300, theta_mode=1e-4)
        lattice, report = propagate_moments(config)
        mean = np.sum(lattice.weight * lattice.mean_y) / lattice.total_weight
        assert abs(mean) <= 1e-14 * report.std_y
        np.testing.assert_allclose(lattice.weight, lattice.weight[::-1], rtol=1e-13)
        np.testing.assert_allclose(lattice.mean_y, -lattice.mean_y[::-1], rtol=1e-12)

        leaves = enumerate_exact(config.with_passes(12))
        np.testing.assert_allclose(np.sort(leaves.y), -np.sort(leaves.y)[::-1], atol=1e-18)

    def test_spread_strictly_increasing(self):
        config = CavityConfig(pass_length=1.0, passes=200, theta_mode=1e-6, split_weights=(0.6, 0.4))
        _, report = propagate_moments(config, checkpoints=list(range(1, 201)))
        spreads = [s for _, s in report.checkpoints]
        assert len(spreads) == 200
        assert all(b > a for a, b in zip(spreads, spreads[1:]))

    def test_exponent_invariant_under_length_rescale(self):
        short = propagate_moments(CavityConfig(pass_length=1.0, passes=2000, theta_mode=1e-6))[1]
        long = propagate_moments(CavityConfig(pass_length=10.0, passes=2000, theta_mode=1e-6))[1]
        assert long.fitted_exponent == pytest.approx(short.fitted_exponent, rel=1e-9)
        assert long.std_y == pytest.approx(10.0 * short.std_y, rel=1e-12)

    def test_matches_affine_walk_formula(self):
        config = CavityConfig(pass_length=1.0, passes=200, theta_mode=1e-4, split_weights=(0.6, 0.4))
        _, report = propagate_moments(config)
        expected = 1e-4 * math.sqrt((1.0 - 0.2**2) * (200**3 / 3.0 - 200 / 12.0))
        assert report.std_y == pytest.approx(expected, rel=1e-10)
        assert report.analytic_std == pytest.approx(expected, rel=1e-12)

    def test_linear_in_theta(self):
        a = propagate_moments(CavityConfig(pass_length=1.0, passes=50, theta_mode=1e-9))[1]
        b = propagate_moments(CavityConfig(pass_length=1.0, passes=50, theta_mode=2e-9))[1]
        assert b.std_y == pytest.approx(2.0 * a.std_y, rel=1e-14)
        assert b.weighted_separation == pytest.approx(2.0 * a.weighted_separation, rel=1e-14)

    def test_loss_reduces_weight(self):
        config = CavityConfig(pass_length=1.0, passes=5, theta_mode=1e-3, axion_loss=0.1)
        lattice, report = propagate_moments(config)
        assert lattice.total_weight == pytest.approx(0.9**5, rel=1e-12)
        assert report.total_weight == pytest.approx(0.9**5, rel=1e-12)

    def test_zero_angle_has_no_spread(self):
        _, report = propagate_moments(CavityConfig(pass_length=1.0, passes=100, theta_mode=0.0))
        assert report.std_y == 0.0
        assert report.fitted_exponent is None

    def test_lattice_frame(self):
        lattice, _ = propagate_moments(CavityConfig(pass_length=1.0, passes=4, theta_mode=1e-3))
        frame = lattice.to_frame()
        assert list(frame.columns) == ["angle_index", "angle_rad", "weight", "mean_y_m", "std_y_m"]
        assert frame["angle_index"].tolist() == [-4, -2, 0, 2, 4]


class TestLabCavity:
    """10,000 passes at the laboratory splitting angle."""

    def test_spread_matches_formula(self, lab_run):
        config, _, report = lab_run
        assert report.std_y == pytest.approx(analytic_spread(config), rel=1e-9)
        assert report.std_y == pytest.approx(4.55e-10, rel=0.01)

    def test_separation_is_folded_spread(self, lab_run):
        _, _, report = lab_run
        assert report.weighted_separation == pytest.approx(math.sqrt(2.0 / math.pi) * report.std_y, rel=0.2)

    def test_separation_within_quoted_order(self, lab_run):
        _, _, report = lab_run
        assert 1e-10 < report.weighted_separation < 1e-8

    def test_growth_exponent(self, lab_run):
        _, _, report = lab_run
        assert 1.35 <= report.fitted_exponent <= 1.65

    def test_checkpoints_reach_final_pass(self, lab_run):
        config, _, report = lab_run
        assert report.checkpoints[-1][0] == pytest.approx(config.passes * config.pass_length)
        assert report.checkpoints[-1][1] == pytest.approx(report.std_y, rel=1e-12)


# ---------------------------------------------------------------------------
# Control case and fits
# ---------------------------------------------------------------------------


def test_linear_control_grows_linearly():
    config = CavityConfig(pass_length=1.0, passes=10_000, theta_mode=LAB_THETA_MODE)
    control = linear_split_spread(config)
    assert control.fitted_exponent == pytest.approx(1.0, abs=1e-9)
    assert control.std_y == pytest.approx(LAB_THETA_MODE * 10_000)


def test_checkpoint_passes_log_grid():
    grid = checkpoint_passes(10_000, per_decade=8)
    assert grid[0] == 1
    assert grid[-1] == 10_000
    assert all(b > a for a, b in zip(grid, grid[1:]))
    assert len(grid) >= 20


def test_fit_needs_two_decades():
    with pytest.raises(FitError):
        fit_growth_exponent([(1.0, 1.0), (10.0, 2.0)])


def test_fit_recovers_power():
    points = [(z, 3.0 * z**1.5) for z in (1.0, 10.0, 100.0, 1000.0)]
    fit = fit_growth_exponent(points)
    assert fit.exponent == pytest.approx(1.5, rel=1e-12)
    assert fit.prefactor == pytest.approx(3.0, rel=1e-10)


@pytest.mark.parametrize("passes", [1, 2, 7, 16, 300])
def test_weight_conserved_without_loss(passes):
    config = CavityConfig(pass_length=1.0, passes=passes, theta_mode=1e-3, split_weights=(0.7, 0.3))
    lattice, report = propagate_moments(config)
    assert lattice.total_weight == pytest.approx(1.0, rel=1e-13)
    assert report.total_weight == pytest.approx(1.0, rel=1e-13)
