"""
Verification harness: check reports, test profiles, check families and the suite runner.
"""

from .energy_checks import (
    check_coercivity,
    check_energy_curve,
    check_g_superadditivity,
    check_subadditivity,
    check_system_subadditivity,
)
from .profiles import Profile
from .rearrangement_checks import (
    Expectation,
    check_additivity,
    check_coupled_identities,
    check_gradient_inequality,
    check_multiplicity_bound,
    check_schwarz_contraction,
    check_steiner_properties,
)
from .report import CheckKind, CheckReport, CheckStatus, SuiteConfig, collapse, worst_of
from .suite import SUITE_ALIASES, SUITE_NAMES, SuiteResult, VerificationSuite, run_all

__all__ = [
    "CheckKind",
    "CheckReport",
    "CheckStatus",
    "Expectation",
    "Profile",
    "SUITE_ALIASES",
    "SUITE_NAMES",
    "SuiteConfig",
    "SuiteResult",
    "VerificationSuite",
    "check_additivity",
    "check_coercivity",
    "check_coupled_identities",
    "check_energy_curve",
    "check_g_superadditivity",
    "check_gradient_inequality",
    "check_multiplicity_bound",
    "check_schwarz_contraction",
    "check_steiner_properties",
    "check_subadditivity",
    "check_system_subadditivity",
    "collapse",
    "run_all",
    "worst_of",
]
