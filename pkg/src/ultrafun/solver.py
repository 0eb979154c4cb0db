"""Galerkin Dirichlet problems on a level: distributed loads and point sources.

Sign conventions follow the two source statements: ``solve_poisson`` solves
``-Lap u = f`` while ``solve_point_source`` solves ``Lap u = delta_q``, so a
point source pushes the membrane down and ``u(q) < 0`` for interior ``q``.
Both use the gradient form ``int grad u . grad v``, which for Dirichlet
functions agrees with ``-int Lap u v`` after integration by parts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import SpaceLevel
from .geometry import DomainError, Membership
from .linalg import factor
from .ultracore import Ultrafunction, inner


@dataclass(frozen=True, eq=False)
class DirichletSolution:
    u: Ultrafunction
    q: np.ndarray | None = None
    elastic: float = 0.0
    point_value: float | None = None
    residual: float = 0.0

    @property
    def coeffs(self) -> np.ndarray:
        return self.u.coeffs


def elastic_energy(u: Ultrafunction) -> float:
    """``1/2 int |grad u|^2 = 1/2 c^T K c``."""
    c = u.coeffs
    return 0.5 * float(c @ (u.level.stiffness @ c))


def _solve(s: SpaceLevel, rhs: np.ndarray) -> tuple[np.ndarray, float]:
    f = factor(s.stiffness)
    c = f.solve(rhs)
    return c, f.residual(c, rhs)


def solve_poisson(s: SpaceLevel, f) -> DirichletSolution:
    """Solve ``K c = b``, ``b_i = int f phi_i``: the Galerkin form of ``-Lap u = f``."""
    b = s.load_vector(f)
    c, res = _solve(s, b)
    u = Ultrafunction(s, c)
    return DirichletSolution(u=u, elastic=elastic_energy(u), residual=res)


def point_source_rhs(s: SpaceLevel, q) -> np.ndarray:
    """Basis values at ``q``, i.e. ``G`` times the coefficients of ``delta_q``."""
    return s.eval_basis(q)


def solve_point_source(s: SpaceLevel, q) -> DirichletSolution:
    """Solve ``int grad u . grad v = -v(q)`` for all ``v`` (``Lap u = delta_q``).

    For an orthonormal basis the coefficients are ``-phi_i(q) / mu_i``.
    Boundary points give the zero solution.
    """
    q = s.domain.require_closure(q)
    g = point_source_rhs(s, q)
    if not np.any(g):
        u = Ultrafunction.zero(s)
        return DirichletSolution(u=u, q=q, elastic=0.0, point_value=0.0, residual=0.0)
    c, res = _solve(s, -g)
    u = Ultrafunction(s, c)
    return DirichletSolution(u=u, q=q, elastic=elastic_energy(u), point_value=float(g @ c), residual=res)


def solve_point_sources(s: SpaceLevel, points) -> np.ndarray:
    """Coefficient matrix ``(len(points), n)`` for many sources, one factorization."""
    pts = np.asarray(points, dtype=float).reshape(-1, s.dim)
    g = s.eval_basis_many(pts)
    if not np.any(g):
        return np.zeros_like(g)
    return -factor(s.stiffness).solve(g.T).T


def _probe_directions(dim: int) -> np.ndarray:
    if dim == 1:
        return np.array([[-1.0], [1.0]])
    angles = np.arange(8) * np.pi / 4
    return np.stack([np.cos(angles), np.sin(angles)], axis=1)


def continuity_probe(s: SpaceLevel, q, radius: float) -> float:
    """Largest L2 change of ``u_q`` over probe points within ``radius`` of ``q``.

    Probe points sit at distance ``radius`` and ``radius / 2`` along the
    coordinate and diagonal directions.
    """
    q = s.domain.point(q)
    if s.domain.contains(q) is not Membership.INTERIOR:
        raise DomainError("continuity probe needs an interior point")
    if radius < 0:
        raise ValueError("radius must be non-negative")
    if radius >= s.domain.boundary_distance(q):
        raise DomainError(f"radius {radius} reaches the boundary (distance {s.domain.boundary_distance(q)})")
    if radius == 0:
        return 0.0
    base = solve_point_source(s, q).u
    dirs = _probe_directions(s.dim)
    probes = np.concatenate([q + radius * dirs, q + 0.5 * radius * dirs])
    worst = 0.0
    for c in solve_point_sources(s, probes):
        diff = Ultrafunction(s, c) - base
        worst = max(worst, np.sqrt(max(inner(diff, diff), 0.0)))
    return float(worst)


__all__ = [
    "DirichletSolution",
    "continuity_probe",
    "elastic_energy",
    "point_source_rhs",
    "solve_point_source",
    "solve_point_sources",
    "solve_poisson",
]
