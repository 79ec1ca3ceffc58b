"""CMV operators with matrix-valued Verblunsky coefficients.

Forward maps (coefficients to measures, Weyl functions and Green's data) and
their inverses (reconstruction of coefficients from any of those).
"""

from . import errors, greens, inverse, io, laurent, linalg, series, spectral, verblunsky, weyl
from .greens import GreensData, greens_series, m_matrix, resolvent_formula, wronskian_constancy
from .inverse import (
    ReconstructionReport,
    RiccatiProblem,
    full_lattice_invert_gg,
    full_lattice_invert_gh,
    half_lattice_invert,
    local_uniqueness_check,
    riccati_perturbation_bound,
    riccati_solve,
)
from .laurent import LaurentPoly, generate_family, transfer
from .series import MatrixPowerSeries
from .spectral import MomentFunctional, SpectralMeasure, gram_schmidt, measure_from_operator, reconstruct_alpha
from .verblunsky import CMVOperator, VerblunskyData, build_cmv, constant, derive, free, half_lattice, random_data
from .weyl import WeylFunction, caratheodory_tools, convert, phi_minus_inv_series, phi_plus_series, weyl_series

__version__ = "0.1.0"

__all__ = [
    "CMVOperator",
    "GreensData",
    "LaurentPoly",
    "MatrixPowerSeries",
    "MomentFunctional",
    "ReconstructionReport",
    "RiccatiProblem",
    "SpectralMeasure",
    "VerblunskyData",
    "WeylFunction",
    "build_cmv",
    "caratheodory_tools",
    "constant",
    "convert",
    "derive",
    "errors",
    "free",
    "full_lattice_invert_gg",
    "full_lattice_invert_gh",
    "generate_family",
    "gram_schmidt",
    "greens",
    "greens_series",
    "half_lattice",
    "half_lattice_invert",
    "inverse",
    "io",
    "laurent",
    "linalg",
    "local_uniqueness_check",
    "m_matrix",
    "measure_from_operator",
    "phi_minus_inv_series",
    "phi_plus_series",
    "random_data",
    "reconstruct_alpha",
    "resolvent_formula",
    "riccati_perturbation_bound",
    "riccati_solve",
    "series",
    "spectral",
    "transfer",
    "verblunsky",
    "weyl",
    "wronskian_constancy",
]
