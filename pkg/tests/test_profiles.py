"""
Tests for the test-profile factories.
"""

import numpy as np
import pytest

from src.checks.profiles import (
    bump_sum,
    bump_sum_2d,
    decaying_exponential,
    disjoint_bump_pair,
    gaussian,
    gaussian_2d,
    piecewise_linear,
    tent,
    two_bump,
)
from src.core.exceptions import DomainError
from src.core.grid import Field2D
from src.core.rearrange import MultiplicityQuery, multiplicity

pytestmark = pytest.mark.unit


class TestSampling:
    def test_whole_line_grid(self):
        profile = gaussian(half_width=8.0)
        u = profile.sample(0.5)
        assert u.grid.n == 32
        assert profile.sample(0.5, staggered=True).grid.n == 33
        np.testing.assert_allclose(u.values, u.values[::-1])

    def test_interval_grid_uses_nodes(self):
        u = tent(4.0).sample(0.5)
        assert u.grid.n == 9
        assert u.grid.x0 == 0.0
        assert u.values.max() == pytest.approx(2.0)
        assert u.values[0] == 0.0 and u.values[-1] == 0.0

    def test_2d_sampling(self):
        u = gaussian_2d(half_width=4.0, half_height=2.0).sample(0.5)
        assert isinstance(u, Field2D)
        assert u.shape == (16, 8)
        assert gaussian_2d().sample(0.5, staggered=True).shape[0] % 2 == 1


class TestFactories:
    def test_piecewise_linear_validation(self):
        with pytest.raises(DomainError):
            piecewise_linear([0.0], [1.0])
        with pytest.raises(DomainError):
            piecewise_linear([0.0, 0.0, 1.0], [0.0, 1.0, 0.0])
        with pytest.raises(DomainError):
            piecewise_linear([0.0, 1.0], [0.0, -1.0])

    def test_decaying_exponential(self):
        u = decaying_exponential(length=4.0).sample(0.1)
        assert np.all(np.diff(u.values) < 0)

    def test_two_bump_crosses_low_levels_four_times(self, rng):
        profile = two_bump(rng)
        u = profile.sample(0.01)
        assert u.values[0] == 0.0
        assert u.values[-1] < 0.01
        v = u.values
        peaks = np.flatnonzero((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])) + 1
        assert peaks.size == 2
        valley = v[peaks[0] : peaks[1] + 1].min()
        level = np.nextafter(0.5 * (valley + v[peaks].min()), 1.0)
        assert multiplicity(u, MultiplicityQuery(level)) == 4

    def test_bump_sum_is_seeded_and_windowed(self):
        a = bump_sum(np.random.default_rng(5), half_width=8.0, window=(-4.0, 4.0)).sample(0.1)
        b = bump_sum(np.random.default_rng(5), half_width=8.0, window=(-4.0, 4.0)).sample(0.1)
        np.testing.assert_array_equal(a.values, b.values)
        outside = np.abs(a.grid.centers) >= 4.0
        assert np.all(a.values[outside] == 0)
        assert a.values.max() > 0

    def test_bump_sum_2d(self, rng):
        u = bump_sum_2d(rng, half_width=4.0, half_height=2.0).sample(0.25)
        assert u.shape == (32, 16)
        assert u.is_nonnegative()

    def test_disjoint_pair(self, rng):
        left, right = disjoint_bump_pair(rng, half_width=8.0)
        u = left.sample(0.1)
        v = right.sample(0.1)
        assert u.grid == v.grid
        assert not np.any((u.values > 0) & (v.values > 0))
