"""Finite-dimensional Galerkin levels for point-source membrane energies.

Nested Dirichlet spaces (tensor sine modes or P1 finite elements) on boxes
in one or two dimensions, with point evaluation representers, L2
projections, point-source solves, minimization of the membrane-plus-point-mass
energy over the source location, and growth fits of quantities along the
level chain.
"""

__version__ = "0.1.0"

from .basis import BasisFamily, ResourceLimitError, SpaceLevel, build_level, eval_basis, integrate
from .energy import EnergyReport, MinimizerResult, energy_at, energy_functional, minimize, reduced_gradient
from .geometry import Domain, DomainError, Membership, boundary_distance, contains
from .netlab import NetFit, NetSample, fit_net, near_boundary_study, run_net, stable_fit
from .solver import DirichletSolution, continuity_probe, solve_point_source, solve_poisson
from .ultracore import Ultrafunction, delta_at, evaluate, inner, project

__all__ = [
    "BasisFamily",
    "DirichletSolution",
    "Domain",
    "DomainError",
    "EnergyReport",
    "Membership",
    "MinimizerResult",
    "NetFit",
    "NetSample",
    "ResourceLimitError",
    "SpaceLevel",
    "Ultrafunction",
    "boundary_distance",
    "build_level",
    "contains",
    "continuity_probe",
    "delta_at",
    "energy_at",
    "energy_functional",
    "eval_basis",
    "evaluate",
    "fit_net",
    "inner",
    "integrate",
    "minimize",
    "near_boundary_study",
    "project",
    "reduced_gradient",
    "run_net",
    "solve_point_source",
    "solve_poisson",
    "stable_fit",
]
