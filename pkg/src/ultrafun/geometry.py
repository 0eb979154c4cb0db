"""Axis-aligned rectangular domains in one or two dimensions."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class Membership(str, enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


class DomainError(ValueError):
    """Raised for malformed domains or points that do not fit a domain."""


@dataclass(frozen=True)
class Domain:
    """Open box ``prod_i (lower[i], upper[i])`` with ``dim`` in {1, 2}.

    Coordinates are stored as tuples so instances are hashable and can key
    factorization caches.
    """

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lower = tuple(float(v) for v in np.atleast_1d(self.lower))
        upper = tuple(float(v) for v in np.atleast_1d(self.upper))
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if len(lower) != len(upper):
            raise DomainError("lower and upper must have the same length")
        if len(lower) not in (1, 2):
            raise DomainError(f"dim must be 1 or 2, got {len(lower)}")
        for axis, (a, b) in enumerate(zip(lower, upper)):
            if not (np.isfinite(a) and np.isfinite(b)):
                raise DomainError(f"axis {axis}: bounds must be finite")
            if not a < b:
                raise DomainError(f"axis {axis}: lower ({a}) must be < upper ({b})")

    @classmethod
    def unit(cls, dim: int = 1) -> "Domain":
        return cls((0.0,) * dim, (1.0,) * dim)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def lengths(self) -> np.ndarray:
        return np.subtract(self.upper, self.lower)

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (np.asarray(self.lower) + np.asarray(self.upper))

    @property
    def measure(self) -> float:
        return float(np.prod(self.lengths))

    def point(self, p) -> np.ndarray:
        """Validate ``p`` as a point of this domain's dimension and return a float array."""
        arr = np.atleast_1d(np.asarray(p, dtype=float))
        if arr.ndim != 1 or arr.shape[0] != self.dim:
            raise DomainError(
                f"point has {arr.size} coordinate(s), domain has dim {self.dim}"
            )
        if not np.all(np.isfinite(arr)):
            raise DomainError(f"point coordinates must be finite, got {arr.tolist()}")
        return arr

    def contains(self, p) -> Membership:
        """Classify ``p`` as interior, boundary or exterior (exact, no tolerance)."""
        x = self.point(p)
        lo, hi = np.asarray(self.lower), np.asarray(self.upper)
        if np.any(x < lo) or np.any(x > hi):
            return Membership.EXTERIOR
        if np.any(x == lo) or np.any(x == hi):
            return Membership.BOUNDARY
        return Membership.INTERIOR

    def boundary_distance(self, p) -> float:
        x = self.point(p)
        if self.contains(x) is Membership.EXTERIOR:
            raise DomainError(f"point {x.tolist()} lies outside the closed domain")
        lo, hi = np.asarray(self.lower), np.asarray(self.upper)
        return float(np.min(np.minimum(x - lo, hi - x)))

    def require_closure(self, p) -> np.ndarray:
        x = self.point(p)
        if self.contains(x) is Membership.EXTERIOR:
            raise DomainError(f"point {x.tolist()} lies outside the closed domain")
        return x

    def require_closure_many(self, points) -> np.ndarray:
        """Vectorized :meth:`require_closure` for an array of points, shape ``(k, dim)``."""
        pts = np.asarray(points, dtype=float).reshape(-1, self.dim)
        if not np.all(np.isfinite(pts)):
            raise DomainError("point coordinates must be finite")
        bad = np.any((pts < self.lower) | (pts > self.upper), axis=1)
        if np.any(bad):
            raise DomainError(f"point {pts[np.argmax(bad)].tolist()} lies outside the closed domain")
        return pts

    def boundary_samples(self, count: int) -> np.ndarray:
        """Deterministic boundary points, spread over every face, shape ``(count, dim)``."""
        lo, hi = np.asarray(self.lower), np.asarray(self.upper)
        if self.dim == 1:
            return np.array([[lo[0]], [hi[0]]] * ((count + 1) // 2))[:count]
        pts = []
        t = (np.arange(count) + 0.5) / count
        for i, s in enumerate(t):
            face = i % 4
            if face == 0:
                pts.append([lo[0], lo[1] + s * (hi[1] - lo[1])])
            elif face == 1:
                pts.append([hi[0], lo[1] + s * (hi[1] - lo[1])])
            elif face == 2:
                pts.append([lo[0] + s * (hi[0] - lo[0]), lo[1]])
            else:
                pts.append([lo[0] + s * (hi[0] - lo[0]), hi[1]])
        return np.array(pts)


def contains(d: Domain, p) -> Membership:
    return d.contains(p)


def boundary_distance(d: Domain, p) -> float:
    return d.boundary_distance(p)
