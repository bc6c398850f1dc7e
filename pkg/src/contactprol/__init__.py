"""Contact finite-type analysis for linear operators on the Heisenberg group."""

from .document import ProblemDocument, load_document, parse_document, serialize_document
from .kostant import GradedReport, HighestWeight, bound_weight, cartan_product, graded_check, weyl_dim
from .linalg import Matrix, Subspace, intersect, kernel, rank, splitting, subspace_sum, tensor_subspace
from .operators import DarbouxOperator, PolySection, apply, enhanced_symbol
from .oracle import SolutionProfile, solution_dim, stabilized_dim, verify_solution
from .polynomial import Poly, parse_poly
from .prolongation import (
    FlatConnection,
    NotFiniteTypeWithinCap,
    ProlongationChain,
    Verdict,
    build_flat_connection,
    chain_for_operator,
    classical_chain,
    contact_chain,
)
from .symplectic import SymplecticSpace, build_sperp, sigma_map

__all__ = [
    "DarbouxOperator",
    "FlatConnection",
    "GradedReport",
    "HighestWeight",
    "Matrix",
    "NotFiniteTypeWithinCap",
    "Poly",
    "PolySection",
    "ProblemDocument",
    "ProlongationChain",
    "SolutionProfile",
    "Subspace",
    "SymplecticSpace",
    "Verdict",
    "apply",
    "bound_weight",
    "build_flat_connection",
    "build_sperp",
    "cartan_product",
    "chain_for_operator",
    "classical_chain",
    "contact_chain",
    "enhanced_symbol",
    "graded_check",
    "intersect",
    "kernel",
    "load_document",
    "parse_document",
    "parse_poly",
    "rank",
    "serialize_document",
    "sigma_map",
    "solution_dim",
    "splitting",
    "stabilized_dim",
    "subspace_sum",
    "tensor_subspace",
    "verify_solution",
    "weyl_dim",
]
