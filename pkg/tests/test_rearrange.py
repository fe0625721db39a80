"""
Tests for the rearrangement kernels.
"""

import numpy as np
import pytest

from src.core.exceptions import (
    AmbiguousLevelError,
    DomainError,
    GridMismatchError,
    UnsupportedGridError,
)
from src.core.grid import Field1D, Field2D, Grid1D, Grid2D, gradient_seminorm, lp_norm
from src.core.rearrange import (
    MultiplicityQuery,
    PlacementRule,
    TieBreak,
    coupled_rearrangement,
    decreasing_rearrangement,
    interpolant_rearrangement,
    level_bands,
    multiplicity,
    schwarz_rearrangement,
    steiner_rearrangement,
    symmetric_rearrangement_1d,
    truncate_shift,
)

pytestmark = pytest.mark.unit


def line(values, h=1.0):
    return Field1D(Grid1D.centered(len(values), h), values)


class TestSymmetricRearrangement:
    def test_even_cells_fill_right_first(self):
        result = symmetric_rearrangement_1d(line([0.0, 1.0, 3.0, 2.0]))
        np.testing.assert_array_equal(result.values, [0.0, 2.0, 3.0, 1.0])

    def test_left_first_mirrors(self):
        rule = PlacementRule(TieBreak.LEFT_FIRST)
        result = symmetric_rearrangement_1d(line([0.0, 1.0, 3.0, 2.0]), rule)
        np.testing.assert_array_equal(result.values, [1.0, 3.0, 2.0, 0.0])

    def test_odd_cells_peak_at_center(self):
        result = symmetric_rearrangement_1d(line([3.0, 1.0, 5.0]))
        np.testing.assert_array_equal(result.values, [1.0, 5.0, 3.0])

    def test_result_is_centered_and_equimeasurable(self, rng):
        u = Field1D(Grid1D(x0=3.0, h=0.5, n=40), rng.uniform(0, 1, 40))
        result = symmetric_rearrangement_1d(u)
        assert result.grid == Grid1D.centered(40, 0.5)
        np.testing.assert_array_equal(np.sort(result.values), np.sort(u.values))

    def test_permutation_invariant(self, rng):
        values = rng.uniform(0, 1, 33)
        a = symmetric_rearrangement_1d(line(values))
        b = symmetric_rearrangement_1d(line(rng.permutation(values)))
        np.testing.assert_array_equal(a.values, b.values)

    def test_contracts_gradient(self, rng):
        u = line(rng.uniform(0, 1, 50), h=0.1)
        result = symmetric_rearrangement_1d(u)
        for p in (1.0, 2.0, 3.0):
            assert gradient_seminorm(result, p) <= gradient_seminorm(u, p)

    def test_rejects_negative_values(self):
        negative = line([1.0, -1.0])
        with pytest.raises(DomainError):
            symmetric_rearrangement_1d(negative)


class TestDecreasingRearrangement:
    def test_sorted_from_zero(self):
        result = decreasing_rearrangement(line([1.0, 3.0, 2.0], h=0.5))
        np.testing.assert_array_equal(result.values, [3.0, 2.0, 1.0])
        assert result.grid.x0 == 0.25


class TestSteinerAndSchwarz:
    def test_steiner_rearranges_each_line(self, rng):
        grid = Grid2D(Grid1D(x0=1.0, h=0.5, n=10), Grid1D.centered(4, 0.25))
        u = Field2D(grid, rng.uniform(0, 1, (10, 4)))
        result = steiner_rearrangement(u)
        assert result.grid.y == grid.y
        assert result.grid.x == Grid1D.centered(10, 0.5)
        for j in range(4):
            expected = symmetric_rearrangement_1d(u.line(j)).values
            np.testing.assert_array_equal(result.values[:, j], expected)

    def test_steiner_on_1d_is_symmetric(self):
        u = line([0.0, 1.0, 3.0, 2.0])
        np.testing.assert_array_equal(
            steiner_rearrangement(u).values, symmetric_rearrangement_1d(u).values
        )

    def test_steiner_keeps_transverse_energy_bounded(self, gaussian_2d):
        result = steiner_rearrangement(gaussian_2d)
        before = gradient_seminorm(gaussian_2d, 2.0, axis=1)
        assert gradient_seminorm(result, 2.0, axis=1) <= before

    def test_schwarz_peak_at_center(self, rng):
        u = Field2D(Grid2D.centered(3, 3, 1.0, 1.0), rng.uniform(0, 1, (3, 3)))
        result = schwarz_rearrangement(u)
        assert result.values[1, 1] == u.values.max()
        assert lp_norm(result, 2.0) == lp_norm(u, 2.0)

    def test_schwarz_needs_square_cells(self):
        u = Field2D(Grid2D.centered(4, 4, 1.0, 0.5), np.ones((4, 4)))
        with pytest.raises(UnsupportedGridError):
            schwarz_rearrangement(u)


class TestCoupledRearrangement:
    def test_1d_merges_value_multisets(self, rng):
        u = line(rng.uniform(0, 1, 7), h=0.5)
        v = line(rng.uniform(0, 1, 4), h=0.5)
        w = coupled_rearrangement(u, v)
        assert w.grid == Grid1D.centered(11, 0.5)
        merged = np.sort(np.concatenate((u.values, v.values)))
        np.testing.assert_array_equal(np.sort(w.values), merged)

    def test_2d_line_counts_add(self, rng):
        y = Grid1D.centered(3, 0.5)
        u = Field2D(Grid2D(Grid1D.centered(5, 0.5), y), rng.uniform(0, 1, (5, 3)))
        v = Field2D(Grid2D(Grid1D.centered(6, 0.5), y), rng.uniform(0, 1, (6, 3)))
        w = coupled_rearrangement(u, v)
        assert w.shape == (11, 3)
        assert lp_norm(w, 2.0) == pytest.approx(lp_norm(u, 2.0) + lp_norm(v, 2.0), rel=1e-14)

    def test_zero_partner_is_padding(self):
        u = line([1.0, 3.0])
        w = coupled_rearrangement(u, line([0.0, 0.0]))
        np.testing.assert_array_equal(w.values, [0.0, 1.0, 3.0, 0.0])

    def test_mismatches(self):
        with pytest.raises(GridMismatchError):
            coupled_rearrangement(line([1.0]), line([1.0], h=0.5))
        u2 = Field2D(Grid2D.centered(2, 2, 1.0, 1.0), np.ones((2, 2)))
        with pytest.raises(GridMismatchError):
            coupled_rearrangement(line([1.0]), u2)


class TestMultiplicity:
    def test_counts_crossings(self):
        f = line([0.0, 2.0, 0.0, 2.0, 0.0])
        assert multiplicity(f, MultiplicityQuery(1.0)) == 4

    def test_zero_extension_adds_boundary_crossings(self):
        f = line([2.0, 2.0])
        assert multiplicity(f, MultiplicityQuery(1.0)) == 0
        assert multiplicity(f, MultiplicityQuery(1.0, zero_extended=True)) == 2

    def test_sampled_level_is_ambiguous(self):
        with pytest.raises(AmbiguousLevelError):
            multiplicity(line([0.0, 2.0, 0.0]), MultiplicityQuery(2.0))

    def test_level_must_be_positive(self):
        with pytest.raises(DomainError):
            MultiplicityQuery(0.0)


class TestTruncation:
    def test_truncate_shift(self):
        result = truncate_shift(line([0.0, 1.0, 3.0]), 1.0)
        np.testing.assert_array_equal(result.values, [0.0, 0.0, 2.0])

    def test_negative_height(self):
        with pytest.raises(DomainError):
            truncate_shift(line([1.0]), -0.5)


class TestInterpolant:
    def test_tent_rearranges_to_ramp(self):
        f = line([0.0, 1.0, 2.0, 1.0, 0.0])
        ramp = interpolant_rearrangement(f)
        np.testing.assert_allclose(ramp.knots, [0.0, 2.0, 4.0])
        np.testing.assert_allclose(ramp.values, [2.0, 1.0, 0.0])
        assert ramp.gradient_integral(2.0) == pytest.approx(1.0)

    def test_band_integrals_agree_for_equal_slopes(self):
        bands = level_bands(line([0.0, 1.0, 2.0, 1.0, 0.0]))
        np.testing.assert_array_equal(bands.counts, [2, 2])
        for p in (1.0, 2.0, 3.0):
            assert bands.weighted_gradient_integral(p) == pytest.approx(4.0 / 2.0**p)
            assert bands.rearranged_gradient_integral(p) == pytest.approx(4.0 / 2.0**p)

    def test_plateau_survives(self):
        ramp = interpolant_rearrangement(line([0.0, 2.0, 2.0, 0.0]))
        assert ramp.length == pytest.approx(3.0)
        assert ramp(np.array([0.5]))[0] == pytest.approx(2.0)
