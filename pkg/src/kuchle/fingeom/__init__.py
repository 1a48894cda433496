"""Point counts over F_q for the varieties attached to an instance."""

from .checks import (
    HyperplaneViolation,
    RankProfile,
    SpecialReport,
    c_loci,
    flag_middle_count,
    fourfold_counts,
    lambda_hat_matrix,
    no21_scan,
    projection_check,
    rank_profile,
    sample_nu,
    shift_check,
    sigma_fibration,
    special_checks,
)
from .engine import BudgetExceeded, Constraint, count_subspaces, solve
from .subspace import (
    Subspace,
    UnsupportedField,
    annihilated_by,
    enum_subspaces,
    gaussian_binomial,
    isotropic_for,
)
from .varieties import CountReport, Geometry, VarietyId, count, member, points, z_flags

__all__ = [
    "BudgetExceeded", "Constraint", "CountReport", "Geometry", "HyperplaneViolation",
    "RankProfile", "SpecialReport", "Subspace", "UnsupportedField", "VarietyId",
    "annihilated_by", "c_loci", "count", "count_subspaces", "enum_subspaces",
    "flag_middle_count", "fourfold_counts", "gaussian_binomial", "isotropic_for",
    "lambda_hat_matrix", "member", "no21_scan", "points", "projection_check", "rank_profile",
    "sample_nu", "shift_check", "sigma_fibration", "solve", "special_checks", "z_flags",
]
