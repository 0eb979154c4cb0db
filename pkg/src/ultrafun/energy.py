"""Membrane-plus-point-mass energy and its minimization over the source location.

For a fixed source ``q`` the optimal membrane is the point-source solution
``u_q`` and the reduced energy is

    F(q) = E(u_q, q) = 1/2 int |grad u_q|^2 + u_q(q) = -1/2 g(q)^T K^{-1} g(q),

with ``g(q)`` the basis values at ``q``.  The electrostatic energy of the
same configuration is the elastic part alone, ``E_el(q) = -F(q)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .basis import SpaceLevel
from .geometry import DomainError, Membership
from .linalg import factor
from .solver import elastic_energy, solve_point_source
from .ultracore import Ultrafunction, evaluate

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class EnergyReport:
    level: str
    q: tuple[float, ...]
    elastic: float
    point_value: float
    total: float
    electrostatic: float

    def as_dict(self) -> dict:
        return {
            "level": self.level,
            "q": list(self.q),
            "elastic": self.elastic,
            "point_value": self.point_value,
            "total": self.total,
            "electrostatic": self.electrostatic,
        }


@dataclass
class MinimizerResult:
    level: str
    q_min: tuple[float, ...]
    F_min: float
    grid: int
    iterations: int
    ties: list[tuple[float, ...]]
    method: str
    scan: np.ndarray = field(repr=False, default=None)

    def as_dict(self) -> dict:
        return {
            "level": self.level,
            "q_min": list(self.q_min),
            "F_min": self.F_min,
            "grid": self.grid,
            "iterations": self.iterations,
            "ties": [list(t) for t in self.ties],
            "method": self.method,
        }


def energy_functional(u: Ultrafunction, q) -> float:
    """``E(u, q) = 1/2 int |grad u|^2 + u(q)`` for an arbitrary membrane ``u``."""
    return elastic_energy(u) + evaluate(u, q)


def energy_at(s: SpaceLevel, q) -> EnergyReport:
    sol = solve_point_source(s, q)
    q = tuple(float(v) for v in sol.q)
    if sol.elastic == 0.0:
        return EnergyReport(s.label, q, 0.0, 0.0, 0.0, 0.0)
    total = sol.elastic + sol.point_value
    return EnergyReport(s.label, q, sol.elastic, sol.point_value, total, sol.elastic)


def reduced_energy(s: SpaceLevel, points) -> np.ndarray:
    """Vectorized ``F(q) = -1/2 g^T K^{-1} g`` over rows of ``points``."""
    g = s.eval_basis_many(points)
    if s.orthonormal:
        return -0.5 * np.sum(g * g / s.eigenvalues, axis=1)
    w = factor(s.stiffness).solve(g.T, check=False)
    return -0.5 * np.einsum("ij,ji->i", g, w)


def reduced_gradient(s: SpaceLevel, q) -> np.ndarray:
    """Exact gradient ``-(grad g)^T K^{-1} g`` of the reduced energy (spectral only)."""
    if not s.orthonormal:
        raise NotImplementedError(f"closed-form point gradients are not available for {s.kind}")
    q = s.domain.point(q)
    if s.domain.contains(q) is not Membership.INTERIOR:
        raise DomainError("reduced_gradient needs an interior point")
    g = s.eval_basis(q)
    dg = s.eval_basis_grad(q)
    return -(dg.T @ (g / s.eigenvalues))


def _grid_points(s: SpaceLevel, resolution: int) -> np.ndarray:
    d = s.domain
    axes = [np.linspace(d.lower[i], d.upper[i], resolution) for i in range(d.dim)]
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _scan(s: SpaceLevel, pts: np.ndarray, threads: int, chunk: int = 128) -> np.ndarray:
    chunks = [pts[i : i + chunk] for i in range(0, len(pts), chunk)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(lambda c: reduced_energy(s, c), chunks))
    else:
        parts = [reduced_energy(s, c) for c in chunks]
    return np.concatenate(parts)


def _F(s: SpaceLevel, q) -> float:
    return float(reduced_energy(s, q[None, :])[0])


def _clip(s: SpaceLevel, q: np.ndarray) -> np.ndarray:
    return np.clip(q, s.domain.lower, s.domain.upper)


def _descend(s, q, tol, max_iter):
    """Gradient descent with Armijo backtracking; stops once a step is below ``tol``."""
    fq = _F(s, q)
    t = 1.0
    it = 0
    for it in range(1, max_iter + 1):
        grad = reduced_gradient(s, q)
        gnorm2 = float(grad @ grad)
        if gnorm2 == 0.0:
            break
        t = min(2.0 * t, 1.0)
        while True:
            cand = _clip(s, q - t * grad)
            fc = _F(s, cand) if s.domain.contains(cand) is Membership.INTERIOR else 0.0
            if fc <= fq - 1e-4 * t * gnorm2 or t < 1e-16:
                break
            t *= 0.5
        step = float(np.linalg.norm(cand - q))
        if fc > fq:
            break
        q, fq = cand, fc
        if step < tol:
            break
    return q, it


def _golden(f, a, b, tol):
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    it = 0
    while b - a > tol:
        it += 1
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b), it


def _coordinate_search(s, q, half_width, tol, max_cycles=50):
    total = 0
    lo, hi = np.asarray(s.domain.lower), np.asarray(s.domain.upper)
    for _ in range(max_cycles):
        moved = 0.0
        for axis in range(s.dim):

            def f(x, axis=axis):
                p = q.copy()
                p[axis] = x
                return _F(s, p)

            a = max(lo[axis], q[axis] - half_width[axis])
            b = min(hi[axis], q[axis] + half_width[axis])
            x, it = _golden(f, a, b, tol)
            total += it
            if f(x) < f(q[axis]):
                moved = max(moved, abs(x - q[axis]))
                q = q.copy()
                q[axis] = x
        if moved < tol:
            break
    return q, total


def minimize(
    s: SpaceLevel,
    grid: int = 33,
    tol: float = 1e-8,
    tie_tol: float | None = None,
    max_iter: int = 10_000,
    threads: int = 1,
) -> MinimizerResult:
    """Grid scan over the closed domain followed by local refinement.

    The scan uses ``grid`` points per axis, boundary included.  Grid values
    within ``tie_tol`` (default ``1e-12 * |F_best|``) of the best are listed
    as ties and the lexicographically smallest starts the refinement:
    gradient descent for spectral levels, coordinate-wise golden-section
    search for finite elements.
    """
    pts = _grid_points(s, grid)
    vals = _scan(s, pts, threads)
    best = float(vals.min())
    if tie_tol is None:
        tie_tol = 1e-12 * abs(best)
    tie_idx = np.flatnonzero(vals <= best + tie_tol)
    ties = sorted(tuple(float(v) for v in pts[i]) for i in tie_idx)
    q0 = np.array(ties[0])
    if s.orthonormal and s.domain.contains(q0) is Membership.INTERIOR:
        q, iters = _descend(s, q0, tol, max_iter)
        method = "gradient-descent"
    else:
        spacing = s.domain.lengths / (grid - 1)
        q, iters = _coordinate_search(s, q0, spacing, tol)
        method = "golden-section"
    report = energy_at(s, q)
    if report.total > best:
        q, report = q0, energy_at(s, q0)
    return MinimizerResult(
        level=s.label,
        q_min=report.q,
        F_min=report.total,
        grid=grid,
        iterations=iters,
        ties=ties,
        method=method,
        scan=np.column_stack([pts, vals]),
    )
