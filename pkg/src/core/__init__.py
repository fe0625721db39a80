"""
Core module initialization for the rearrangement toolkit.
"""

from .exceptions import RearrangementKitError
from .grid import (
    DistributionProfile,
    Field,
    Field1D,
    Field2D,
    Grid1D,
    Grid2D,
    distribution_profile,
    gradient_seminorm,
    integrate,
    lp_norm,
    quadrature_phi,
)
from .rearrange import (
    MultiplicityQuery,
    PlacementRule,
    TieBreak,
    coupled_rearrangement,
    decreasing_rearrangement,
    multiplicity,
    schwarz_rearrangement,
    steiner_rearrangement,
    symmetric_rearrangement_1d,
    truncate_shift,
)

__all__ = [
    "RearrangementKitError",
    "DistributionProfile",
    "Field",
    "Field1D",
    "Field2D",
    "Grid1D",
    "Grid2D",
    "distribution_profile",
    "gradient_seminorm",
    "integrate",
    "lp_norm",
    "quadrature_phi",
    "MultiplicityQuery",
    "PlacementRule",
    "TieBreak",
    "coupled_rearrangement",
    "decreasing_rearrangement",
    "multiplicity",
    "schwarz_rearrangement",
    "steiner_rearrangement",
    "symmetric_rearrangement_1d",
    "truncate_shift",
]

__version__ = "0.3.0"
