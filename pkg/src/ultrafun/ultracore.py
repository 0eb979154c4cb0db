"""Elements of a space level: evaluation, L2 products, projection and point sources."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .basis import SpaceLevel
from .io import write_csv
from .linalg import factor


class LevelMismatchError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Ultrafunction:
    """Coefficient vector over the basis of one :class:`SpaceLevel`."""

    level: SpaceLevel
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).reshape(-1)
        if c.size != self.level.n:
            raise ValueError(f"expected {self.level.n} coefficients, got {c.size}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zero(cls, level: SpaceLevel) -> "Ultrafunction":
        return cls(level, np.zeros(level.n))

    @classmethod
    def basis_function(cls, level: SpaceLevel, i: int) -> "Ultrafunction":
        c = np.zeros(level.n)
        c[i] = 1.0
        return cls(level, c)

    def __call__(self, p) -> float:
        return evaluate(self, p)

    def __add__(self, other: "Ultrafunction") -> "Ultrafunction":
        _same_level(self, other)
        return Ultrafunction(self.level, self.coeffs + other.coeffs)

    def __sub__(self, other: "Ultrafunction") -> "Ultrafunction":
        _same_level(self, other)
        return Ultrafunction(self.level, self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "Ultrafunction":
        return Ultrafunction(self.level, float(scalar) * self.coeffs)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.sqrt(max(inner(self, self), 0.0)))

    def as_function(self):
        """Vectorized callable ``f(x[, y])`` for use as an integrand."""
        level = self.level

        def f(*coords):
            coords = np.broadcast_arrays(*coords)
            pts = np.stack([np.ravel(c) for c in coords], axis=1)
            vals = level.eval_basis_many(pts) @ self.coeffs
            return vals.reshape(coords[0].shape)

        return f


def _same_level(u: Ultrafunction, v: Ultrafunction):
    if u.level is not v.level:
        raise LevelMismatchError("ultrafunctions live on different space levels")


def evaluate(u: Ultrafunction, p) -> float:
    """Pointwise value; exactly zero on the boundary."""
    return float(u.level.eval_basis(p) @ u.coeffs)


def inner(u: Ultrafunction, v: Ultrafunction) -> float:
    """L2 product ``c_u^T G c_v`` through the Gram matrix."""
    _same_level(u, v)
    return float(u.coeffs @ (u.level.gram @ v.coeffs))


def project(s: SpaceLevel, f) -> Ultrafunction:
    """L2-orthogonal projection of ``f`` onto the span of ``s``.

    Solves ``G c = b`` with ``b_i = int f phi_i``; for an orthonormal basis
    this is just ``c = b``.
    """
    b = s.load_vector(f)
    if s.orthonormal:
        return Ultrafunction(s, b)
    return Ultrafunction(s, factor(s.gram).solve(b))


def delta_at(s: SpaceLevel, q) -> Ultrafunction:
    """Reproducing element of point evaluation at ``q``.

    The returned ``d`` satisfies ``inner(d, v) == evaluate(v, q)`` for every
    ``v`` on the level; it is the zero element for boundary points and an
    error for points outside the closed domain.
    """
    g = s.eval_basis(q)
    if not np.any(g):
        return Ultrafunction.zero(s)
    if s.orthonormal:
        return Ultrafunction(s, g)
    return Ultrafunction(s, factor(s.gram).solve(g))


def sample_grid(u: Ultrafunction, points_per_axis: int = 65) -> np.ndarray:
    """Values on a uniform closed grid, rows ``(coords..., value)``."""
    d = u.level.domain
    axes = [np.linspace(d.lower[i], d.upper[i], points_per_axis) for i in range(d.dim)]
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    vals = u.level.eval_basis_many(pts) @ u.coeffs
    return np.column_stack([pts, vals])


def write_grid_csv(u: Ultrafunction, path, points_per_axis: int = 65) -> Path:
    """Atomically write :func:`sample_grid` with a ``x[,y],value`` header."""
    names = ["x", "y"][: u.level.dim] + ["value"]
    return write_csv(path, names, sample_grid(u, points_per_axis))
