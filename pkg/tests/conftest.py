"""
Shared fixtures for the rearrangement toolkit tests.
"""

import numpy as np
import pytest

from src.core.grid import Field1D, Field2D, Grid1D, Grid2D
from src.functionals.nonlinearity import CoupledGSpec, NonlinearitySpec
from src.solvers.gradient_flow import FlowConfig


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def line_grid():
    """Eight unit cells centered at the origin."""
    return Grid1D.centered(8, 1.0)


@pytest.fixture
def gaussian_1d():
    grid = Grid1D.centered(64, 0.25)
    return Field1D.from_function(grid, lambda x: np.exp(-(x**2)))


@pytest.fixture
def gaussian_2d():
    grid = Grid2D.centered(24, 12, 0.5, 0.5)
    return Field2D.from_function(grid, lambda x, y: np.exp(-(x**2) - 0.5 * y**2))


@pytest.fixture
def cubic_spec():
    return NonlinearitySpec.power(3.0)


@pytest.fixture
def manakov_spec():
    return CoupledGSpec.manakov(beta=0.5)


@pytest.fixture
def fast_flow():
    """Flow settings that keep unit tests quick."""
    return FlowConfig(max_iter=3000, energy_tol=1e-12, residual_tol=1e-6)


@pytest.fixture
def spec_dir(tmp_path):
    """Directory with one spec file of every kind."""
    (tmp_path / "power.cfg").write_text("kind = power\np = 3\ndim = 1\n")
    (tmp_path / "manakov.cfg").write_text(
        "kind = coupled\na1 = 0.25\na2 = 0.25\nr1 = 2\nr2 = 2\nbeta = 0.5\n"
        "gamma1 = 1\ngamma2 = 1\ndim = 1\n"
    )
    (tmp_path / "zero.cfg").write_text("kind = tabulated\ns = 0, 1000\nF = 0, 0\n")
    return tmp_path
