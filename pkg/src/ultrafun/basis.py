"""Finite-dimensional Dirichlet spaces: tensor sine modes and P1 finite elements.

A :class:`SpaceLevel` bundles a basis on a :class:`~ultrafun.geometry.Domain`
with its Gram matrix ``int phi_i phi_j``, its stiffness matrix
``int grad phi_i . grad phi_j`` and a quadrature rule.  Levels of one family
form a nested chain: ``build_level(d, kind, l)`` spans a subspace of
``build_level(d, kind, l + 1)``.

Functions handed to :meth:`SpaceLevel.integrate` and
:meth:`SpaceLevel.load_vector` are numpy-vectorized callables taking one
coordinate array per axis, ``g(x)`` in 1D and ``g(x, y)`` in 2D.
"""

from __future__ import annotations

import csv
import functools
import itertools
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .geometry import Domain, Membership

SPECTRAL = "spectral-sine"
FEM = "fem-p1"
KINDS = (SPECTRAL, FEM)

DEFAULT_MAX_N = 50_000


class ResourceLimitError(RuntimeError):
    """The requested level would exceed the configured dimension cap."""


@dataclass(frozen=True)
class BasisFamily:
    """A basis kind together with its size parameter.

    ``size`` is the number of modes per axis for ``spectral-sine`` and the
    number of cells per axis for ``fem-p1``.
    """

    kind: str
    size: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown basis kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == SPECTRAL and self.size < 1:
            raise ValueError("spectral-sine needs at least one mode per axis")
        if self.kind == FEM and self.size < 2:
            raise ValueError("fem-p1 needs at least two cells per axis")

    @classmethod
    def at_level(cls, kind: str, level: int) -> "BasisFamily":
        """Member ``level`` of the canonical chain: ``level`` modes or ``2**level`` cells."""
        if level < 1:
            raise ValueError(f"level must be >= 1, got {level}")
        if kind == SPECTRAL:
            return cls(kind, int(level))
        if kind == FEM:
            return cls(kind, 2 ** int(level))
        raise ValueError(f"unknown basis kind {kind!r}; expected one of {KINDS}")

    def dimension(self, dim: int) -> int:
        per_axis = self.size if self.kind == SPECTRAL else self.size - 1
        return per_axis**dim


def _as_values(g, coords, shape) -> np.ndarray:
    return np.broadcast_to(np.asarray(g(*coords), dtype=float), shape)


class SpaceLevel:
    """Common interface of a finite-dimensional Dirichlet space on a box."""

    domain: Domain
    family: BasisFamily
    level: int | None
    n: int

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def kind(self) -> str:
        return self.family.kind

    @property
    def resolution(self) -> int:
        """Per-axis resolution ``n ** (1/dim)``: modes or interior nodes per axis."""
        return self.family.size if self.kind == SPECTRAL else self.family.size - 1

    @property
    def orthonormal(self) -> bool:
        return False

    @property
    def label(self) -> str:
        return f"{self.kind}:{self.family.size}:d{self.dim}"

    # subclasses provide gram, stiffness, eval_basis, quadrature, load_vector

    def integrate(self, g) -> float:
        """Quadrature approximation of the integral of ``g`` over the domain."""
        nodes, weights = self.quadrature
        vals = _as_values(g, nodes.T, weights.shape)
        return float(vals @ weights)

    def eval_basis_many(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, self.dim)
        return np.array([self.eval_basis(p) for p in pts])

    def dump_csv(self, directory) -> tuple[Path, Path]:
        """Write gram and stiffness as dense CSV files (debugging aid)."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        paths = []
        for name, mat in (("gram", self.gram), ("stiffness", self.stiffness)):
            path = directory / f"{name}.csv"
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh)
                for row in mat.toarray():
                    writer.writerow([f"{v:.17g}" for v in row])
            paths.append(path)
        return tuple(paths)


class SpectralLevel(SpaceLevel):
    """Orthonormal tensor sine modes with max per-axis index <= ``m``.

    Mode ``k`` on ``[a, a + L]`` is ``sqrt(2/L) sin(k pi (x - a) / L)``; 2D
    modes are products, ordered by (index sum, then axis indices).
    """

    def __init__(self, domain: Domain, family: BasisFamily, level=None, quad_points=None):
        self.domain = domain
        self.family = family
        self.level = level
        m = family.size
        self.modes = np.array(
            sorted(itertools.product(range(1, m + 1), repeat=domain.dim), key=lambda k: (sum(k), k)),
            dtype=int,
        )
        self.n = len(self.modes)
        self.quad_points = int(quad_points) if quad_points else 2 * m + 16
        lengths = self.domain.lengths
        self.eigenvalues = np.pi**2 * np.sum((self.modes / lengths) ** 2, axis=1)

    @property
    def orthonormal(self) -> bool:
        return True

    @functools.cached_property
    def gram(self) -> sp.csr_matrix:
        return sp.identity(self.n, format="csr")

    @functools.cached_property
    def stiffness(self) -> sp.csr_matrix:
        return sp.diags(self.eigenvalues, format="csr")

    def _axis_sines(self, axis: int, x: float) -> np.ndarray:
        a, b = self.domain.lower[axis], self.domain.upper[axis]
        k = np.arange(1, self.family.size + 1)
        if x == a or x == b:
            return np.zeros(k.size)
        length = b - a
        return np.sqrt(2.0 / length) * np.sin((x - a) * k * np.pi / length)

    def _axis_cosines(self, axis: int, x: float) -> np.ndarray:
        a, b = self.domain.lower[axis], self.domain.upper[axis]
        k = np.arange(1, self.family.size + 1)
        length = b - a
        return np.sqrt(2.0 / length) * (k * np.pi / length) * np.cos((x - a) * k * np.pi / length)

    def _combine(self, factors) -> np.ndarray:
        out = np.ones(self.n)
        for axis, f in enumerate(factors):
            out = out * f[self.modes[:, axis] - 1]
        return out

    def eval_basis(self, p) -> np.ndarray:
        x = self.domain.require_closure(p)
        return self._combine([self._axis_sines(i, x[i]) for i in range(self.dim)])

    def eval_basis_many(self, points) -> np.ndarray:
        pts = self.domain.require_closure_many(points)
        k = np.arange(1, self.family.size + 1)
        out = np.ones((len(pts), self.n))
        for axis in range(self.dim):
            a, b = self.domain.lower[axis], self.domain.upper[axis]
            x = pts[:, axis]
            s = np.sqrt(2.0 / (b - a)) * np.sin(np.outer(x - a, k) * np.pi / (b - a))
            s[(x == a) | (x == b)] = 0.0
            out *= s[:, self.modes[:, axis] - 1]
        return out

    def eval_basis_grad(self, p) -> np.ndarray:
        """Basis gradients at ``p``, shape ``(n, dim)``."""
        x = self.domain.require_closure(p)
        sines = [self._axis_sines(i, x[i]) for i in range(self.dim)]
        cosines = [self._axis_cosines(i, x[i]) for i in range(self.dim)]
        grads = np.empty((self.n, self.dim))
        for axis in range(self.dim):
            factors = [cosines[i] if i == axis else sines[i] for i in range(self.dim)]
            grads[:, axis] = self._combine(factors)
        return grads

    def _axis_rule(self, axis: int):
        t, w = np.polynomial.legendre.leggauss(self.quad_points)
        a, b = self.domain.lower[axis], self.domain.upper[axis]
        return a + 0.5 * (b - a) * (t + 1.0), 0.5 * (b - a) * w

    @functools.cached_property
    def quadrature(self) -> tuple[np.ndarray, np.ndarray]:
        rules = [self._axis_rule(i) for i in range(self.dim)]
        grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
        wgrid = functools.reduce(np.multiply.outer, [r[1] for r in rules])
        nodes = np.stack([g.ravel() for g in grids], axis=1)
        return nodes, wgrid.ravel()

    def load_vector(self, f) -> np.ndarray:
        """``b_i = int f phi_i`` by the tensor Gauss-Legendre rule (separable contraction)."""
        rules = [self._axis_rule(i) for i in range(self.dim)]
        k = np.arange(1, self.family.size + 1)
        tables = []
        for axis, (x, w) in enumerate(rules):
            a, length = self.domain.lower[axis], self.domain.lengths[axis]
            s = np.sqrt(2.0 / length) * np.sin(np.outer(x - a, k) * np.pi / length)
            tables.append(w[:, None] * s)
        grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
        vals = _as_values(f, grids, grids[0].shape)
        if self.dim == 1:
            coeffs = tables[0].T @ vals
            return coeffs[self.modes[:, 0] - 1]
        full = tables[0].T @ vals @ tables[1]
        return full[self.modes[:, 0] - 1, self.modes[:, 1] - 1]


# reference-triangle vertices (0,0), (1,0), (1,1) / (0,0), (1,1), (0,1) in
# local cell coordinates (s, t); barycentric weights per vertex
def _lower_tri(s, t):
    return np.stack([1.0 - s, s - t, t], axis=-1)


def _upper_tri(s, t):
    return np.stack([1.0 - t, s, t - s], axis=-1)


class FemLevel(SpaceLevel):
    """Continuous piecewise-linear hats on a uniform mesh with ``N`` cells per axis.

    2D cells are split along the diagonal from the lower-left to the upper-right
    corner.  Degrees of freedom are interior nodes, ordered lexicographically by
    coordinates.
    """

    def __init__(self, domain: Domain, family: BasisFamily, level=None, quad_points=None):
        self.domain = domain
        self.family = family
        self.level = level
        self.cells = family.size
        self.h = self.domain.lengths / self.cells
        self.quad_points = int(quad_points) if quad_points else 4
        N = self.cells
        self.n = (N - 1) ** domain.dim
        # global node (i, j) -> dof index, -1 on the boundary
        shape = (N + 1,) * domain.dim
        self._dof = -np.ones(shape, dtype=int)
        inner = (slice(1, N),) * domain.dim
        self._dof[inner] = np.arange(self.n).reshape((N - 1,) * domain.dim)
        self._build_elements()

    def _build_elements(self):
        N = self.cells
        if self.dim == 1:
            i = np.arange(N)
            self.elements = np.stack([i, i + 1], axis=1)
            self.element_dofs = self._dof[self.elements]
            return
        ci, cj = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
        ci, cj = ci.ravel(), cj.ravel()
        lower = np.stack([(ci, cj), (ci + 1, cj), (ci + 1, cj + 1)], axis=1)
        upper = np.stack([(ci, cj), (ci + 1, cj + 1), (ci, cj + 1)], axis=1)
        # elements: (n_el, 3 vertices, 2 index components)
        self.elements = np.concatenate([lower.transpose(2, 1, 0), upper.transpose(2, 1, 0)])
        self.element_dofs = self._dof[self.elements[..., 0], self.elements[..., 1]]

    def node_coords(self, idx) -> np.ndarray:
        return np.asarray(self.domain.lower) + np.asarray(idx) * self.h

    @functools.cached_property
    def dof_coords(self) -> np.ndarray:
        axes = [self.domain.lower[i] + self.h[i] * np.arange(1, self.cells) for i in range(self.dim)]
        grids = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def _local_matrices(self):
        if self.dim == 1:
            h = self.h[0]
            mass = h / 6.0 * np.array([[2.0, 1.0], [1.0, 2.0]])
            stiff = 1.0 / h * np.array([[1.0, -1.0], [-1.0, 1.0]])
            return [(mass, stiff)]
        hx, hy = self.h
        area = 0.5 * hx * hy
        mass = area / 12.0 * (np.ones((3, 3)) + np.eye(3))
        g_lower = np.array([[-1 / hx, 0.0], [1 / hx, -1 / hy], [0.0, 1 / hy]])
        g_upper = np.array([[0.0, -1 / hy], [1 / hx, 0.0], [-1 / hx, 1 / hy]])
        return [(mass, area * g_lower @ g_lower.T), (mass, area * g_upper @ g_upper.T)]

    def _assemble(self, which: int) -> sp.csr_matrix:
        local = self._local_matrices()
        n_el = len(self.element_dofs)
        if self.dim == 1:
            mats = np.broadcast_to(local[0][which], (n_el, 2, 2))
        else:
            half = n_el // 2
            mats = np.concatenate(
                [np.broadcast_to(local[0][which], (half, 3, 3)), np.broadcast_to(local[1][which], (half, 3, 3))]
            )
        dofs = self.element_dofs
        rows = np.repeat(dofs[:, :, None], dofs.shape[1], axis=2)
        cols = np.repeat(dofs[:, None, :], dofs.shape[1], axis=1)
        keep = (rows >= 0) & (cols >= 0)
        mat = sp.coo_matrix((mats[keep], (rows[keep], cols[keep])), shape=(self.n, self.n))
        return mat.tocsr()

    @functools.cached_property
    def gram(self) -> sp.csr_matrix:
        return self._assemble(0)

    @functools.cached_property
    def stiffness(self) -> sp.csr_matrix:
        return self._assemble(1)

    def _locate(self, x):
        """Cell indices and local coordinates in ``[0, 1]`` per axis."""
        rel = (x - np.asarray(self.domain.lower)) / self.h
        cell = np.minimum(np.floor(rel).astype(int), self.cells - 1)
        return cell, rel - cell

    def eval_basis(self, p) -> np.ndarray:
        x = self.domain.require_closure(p)
        out = np.zeros(self.n)
        if self.domain.contains(x) is Membership.BOUNDARY:
            return out
        cell, loc = self._locate(x)
        if self.dim == 1:
            nodes = [cell[0], cell[0] + 1]
            weights = [1.0 - loc[0], loc[0]]
            dofs = self._dof[nodes]
        else:
            i, j = cell
            s, t = loc
            if s >= t:
                verts = [(i, j), (i + 1, j), (i + 1, j + 1)]
                weights = _lower_tri(s, t)
            else:
                verts = [(i, j), (i + 1, j + 1), (i, j + 1)]
                weights = _upper_tri(s, t)
            dofs = [self._dof[v] for v in verts]
        for dof, w in zip(dofs, weights):
            if dof >= 0:
                out[dof] += w
        return out

    def eval_basis_many(self, points) -> np.ndarray:
        pts = self.domain.require_closure_many(points)
        lo, hi = np.asarray(self.domain.lower), np.asarray(self.domain.upper)
        inside = np.all((pts > lo) & (pts < hi), axis=1)
        rel = (pts - lo) / self.h
        cell = np.minimum(np.floor(rel).astype(int), self.cells - 1)
        loc = rel - cell
        rows = np.arange(len(pts))
        out = np.zeros((len(pts), self.n))
        if self.dim == 1:
            verts = [cell[:, 0], cell[:, 0] + 1]
            weights = [1.0 - loc[:, 0], loc[:, 0]]
            dofs = [self._dof[v] for v in verts]
        else:
            i, j = cell[:, 0], cell[:, 1]
            s, t = loc[:, 0], loc[:, 1]
            low = s >= t
            w = np.where(low[:, None], _lower_tri(s, t), _upper_tri(s, t))
            # lower: (i,j),(i+1,j),(i+1,j+1); upper: (i,j),(i+1,j+1),(i,j+1)
            v1 = (i + 1, np.where(low, j, j + 1))
            v2 = (np.where(low, i + 1, i), j + 1)
            dofs = [self._dof[i, j], self._dof[v1], self._dof[v2]]
            weights = [w[:, 0], w[:, 1], w[:, 2]]
        for dof, wt in zip(dofs, weights):
            ok = inside & (dof >= 0)
            out[rows[ok], dof[ok]] += wt[ok]
        return out

    @functools.cached_property
    def _element_rule(self):
        """Quadrature on every element: physical nodes, weights, local hat values."""
        q = self.quad_points
        t, w = np.polynomial.legendre.leggauss(q)
        t, w = 0.5 * (t + 1.0), 0.5 * w
        if self.dim == 1:
            h = self.h[0]
            left = self.domain.lower[0] + h * self.elements[:, 0]
            nodes = left[:, None] + h * t[None, :]
            weights = np.broadcast_to(h * w, nodes.shape)
            shape = np.stack([1.0 - t, t], axis=-1)
            shape = np.broadcast_to(shape, (len(left), q, 2))
            return nodes[..., None], weights, shape
        # collapsed (Duffy) Gauss rule on the local lower triangle 0 <= t <= s <= 1
        S, T = np.meshgrid(t, t, indexing="ij")
        ls = S.ravel()
        lt = (S * T).ravel()
        lw = (np.outer(w, w) * S).ravel()
        hx, hy = self.h
        n_el = len(self.elements)
        half = n_el // 2
        base = self.node_coords(self.elements[:, 0, :])
        s_all = np.empty((n_el, ls.size))
        t_all = np.empty((n_el, ls.size))
        s_all[:half], t_all[:half] = ls, lt
        # upper triangle is the mirror image across the diagonal
        s_all[half:], t_all[half:] = lt, ls
        nodes = np.stack([base[:, 0, None] + hx * s_all, base[:, 1, None] + hy * t_all], axis=-1)
        weights = np.broadcast_to(hx * hy * lw, (n_el, ls.size))
        shape = np.concatenate([_lower_tri(s_all[:half], t_all[:half]), _upper_tri(s_all[half:], t_all[half:])])
        return nodes, weights, shape

    @property
    def quadrature(self) -> tuple[np.ndarray, np.ndarray]:
        nodes, weights, _ = self._element_rule
        return nodes.reshape(-1, self.dim), np.ascontiguousarray(weights).ravel()

    def load_vector(self, f) -> np.ndarray:
        nodes, weights, shape = self._element_rule
        vals = _as_values(f, np.moveaxis(nodes, -1, 0), weights.shape)
        contrib = np.einsum("eq,eqk->ek", vals * weights, shape)
        dofs = self.element_dofs
        keep = dofs >= 0
        return np.bincount(dofs[keep], weights=contrib[keep], minlength=self.n)


def build_level(
    domain: Domain,
    family: BasisFamily | str,
    level: int | None = None,
    *,
    quad_points: int | None = None,
    max_n: int = DEFAULT_MAX_N,
) -> SpaceLevel:
    """Build one member of a nested chain of Dirichlet spaces.

    Parameters
    ----------
    domain : Domain
    family : BasisFamily or str
        Either an explicit family (``level`` then only labels it) or a kind
        name, in which case ``level`` picks the chain member: ``level`` modes
        per axis for ``spectral-sine``, ``2**level`` cells per axis for
        ``fem-p1``.
    quad_points : int, optional
        Override of the per-axis (spectral) or per-element-direction (fem)
        Gauss point count.
    max_n : int
        Dimension cap; exceeding it raises :class:`ResourceLimitError`.
    """
    if isinstance(family, str):
        if level is None:
            raise ValueError("a level is required when family is given by kind")
        family = BasisFamily.at_level(family, level)
    elif level is not None and level < 1:
        raise ValueError(f"level must be >= 1, got {level}")
    n = family.dimension(domain.dim)
    if n > max_n:
        raise ResourceLimitError(f"{family.kind} level with n={n} exceeds the cap max_n={max_n}")
    cls = SpectralLevel if family.kind == SPECTRAL else FemLevel
    return cls(domain, family, level, quad_points)


def eval_basis(s: SpaceLevel, p) -> np.ndarray:
    return s.eval_basis(p)


def integrate(s: SpaceLevel, g) -> float:
    return s.integrate(g)
