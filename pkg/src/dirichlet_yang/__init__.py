"""Dirichlet eigenvalues of finite pieces of networks and checks of universal
eigenvalue inequalities on them."""

from .cayley import (BallNetwork, GroupSpec, build_ball, build_region, busemann, default_constants,
                     homomorphism_cocycle, lambda_min, mu_star, parse_group, tree_ground_state)
from .eigensolve import DirichletSystem, dirichlet_matrix, dirichlet_system, symmetric_eigh
from .errors import DomainError, NumericError, ResourceError
from .inequalities import InequalityReport, ProofScratch, RecursionState
from .network import HostNetwork, TestFunction

__version__ = "0.1.0"

__all__ = [
    "BallNetwork", "DirichletSystem", "DomainError", "GroupSpec", "HostNetwork", "InequalityReport",
    "NumericError", "ProofScratch", "RecursionState", "ResourceError", "TestFunction",
    "build_ball", "build_region", "busemann", "default_constants", "dirichlet_matrix",
    "dirichlet_system", "homomorphism_cocycle", "lambda_min", "mu_star", "parse_group",
    "symmetric_eigh", "tree_ground_state",
]
