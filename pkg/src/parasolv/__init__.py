"""Solvable metric Lie algebras attached to parabolic subalgebras, with exact curvature checks."""
from .curvature import MetricLieAlgebra, einstein_check, ricci_besse, ricci_definition, ricci_nilpotent, ricci_wolter
from .exact import BACKEND
from .parabolic import SubsetSelection, attached_solvmanifold, langlands
from .pipeline import AlgebraSpec, VerificationRecord, verify_case
from .realization import Realization, build_realization, load_realization
from .rootsystem import InputError, cartan_matrix, root_system

__version__ = "0.1.0"

__all__ = [
    "AlgebraSpec",
    "BACKEND",
    "InputError",
    "MetricLieAlgebra",
    "Realization",
    "SubsetSelection",
    "VerificationRecord",
    "attached_solvmanifold",
    "build_realization",
    "cartan_matrix",
    "einstein_check",
    "langlands",
    "load_realization",
    "ricci_besse",
    "ricci_definition",
    "ricci_nilpotent",
    "ricci_wolter",
    "root_system",
    "verify_case",
]
