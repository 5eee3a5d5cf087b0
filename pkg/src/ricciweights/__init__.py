"""Ricci-flat metrics on nilpotent Lie algebras from gradings and filtrations."""

from .algebra import (
    LieAlgebra,
    ParseError,
    bracket,
    change_basis,
    hat,
    is_nice_basis,
    is_nilpotent,
    jacobi_check,
    parse_algebra,
    serialize,
)
from .filtration import (
    FiltrationWitness,
    admissible_orders,
    check_F_assignment,
    search_filtration,
)
from .grading import (
    Grading,
    WeightSequence,
    check_G_sequence,
    enumerate_G_sequences,
    first_G_sequence,
    g1_obstruction,
    g1_obstructions,
    grading_from_torus,
)
from .metric import (
    MetricSpec,
    adapt_basis_isotropic,
    build_filtration_metric,
    build_grading_metric,
    ricci_formula,
    ricci_koszul,
    sigma_diagonal_metric,
    verify_ricci_flat,
)
from .records import AlgebraRecord, parse_records, read_records

__version__ = "0.1.0"

__all__ = [
    "AlgebraRecord",
    "FiltrationWitness",
    "Grading",
    "LieAlgebra",
    "MetricSpec",
    "ParseError",
    "WeightSequence",
    "adapt_basis_isotropic",
    "admissible_orders",
    "bracket",
    "build_filtration_metric",
    "build_grading_metric",
    "change_basis",
    "check_F_assignment",
    "check_G_sequence",
    "enumerate_G_sequences",
    "first_G_sequence",
    "g1_obstruction",
    "g1_obstructions",
    "grading_from_torus",
    "hat",
    "is_nice_basis",
    "is_nilpotent",
    "jacobi_check",
    "parse_algebra",
    "parse_records",
    "read_records",
    "ricci_formula",
    "ricci_koszul",
    "search_filtration",
    "serialize",
    "sigma_diagonal_metric",
    "verify_ricci_flat",
]
