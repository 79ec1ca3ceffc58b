"""Dense complex linear algebra kernels."""

from ._kernels import BACKEND
from .core import (
    COND_MAX,
    DEFAULT_TOL,
    HermitianEigen,
    UnitaryEigen,
    as_matrix,
    condition_number,
    fro,
    herm_eigen,
    herm_eigvals,
    herm_sqrt,
    herm_sqrt_pair,
    inv,
    is_invertible,
    op_norm,
    rsolve,
    singular_extremes,
    solve,
    unitary_eigen,
)

__all__ = [
    "BACKEND",
    "COND_MAX",
    "DEFAULT_TOL",
    "HermitianEigen",
    "UnitaryEigen",
    "as_matrix",
    "condition_number",
    "fro",
    "herm_eigen",
    "herm_eigvals",
    "herm_sqrt",
    "herm_sqrt_pair",
    "inv",
    "is_invertible",
    "op_norm",
    "rsolve",
    "singular_extremes",
    "solve",
    "unitary_eigen",
]
