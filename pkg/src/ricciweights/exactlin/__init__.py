from .derivations import (
    DerivationSpace,
    DiagonalTorus,
    derivation_space,
    diagonal_derivations,
    is_derivation,
    torus_from_weights,
)
from .fourier_motzkin import (
    EQ,
    GE,
    GT,
    Constraint,
    ConstraintSystem,
    FeasibilityResult,
    check_certificate,
    fm_feasible,
)
from .linalg import (
    SingularMatrixError,
    det,
    identity,
    integerize,
    inverse,
    kernel_basis,
    matmul,
    rank,
    rank_normal_form,
    rref,
    solve,
    transpose,
)

__all__ = [
    "Constraint",
    "ConstraintSystem",
    "DerivationSpace",
    "DiagonalTorus",
    "EQ",
    "FeasibilityResult",
    "GE",
    "GT",
    "SingularMatrixError",
    "check_certificate",
    "derivation_space",
    "det",
    "diagonal_derivations",
    "fm_feasible",
    "identity",
    "integerize",
    "inverse",
    "is_derivation",
    "kernel_basis",
    "matmul",
    "rank",
    "rank_normal_form",
    "rref",
    "solve",
    "torus_from_weights",
    "transpose",
]
