"""Banded Cholesky factorization of the symmetric positive definite level matrices."""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

RESIDUAL_TOL = 1e-10


class FactorizationError(np.linalg.LinAlgError):
    """Matrix is not symmetric positive definite (an assembly bug)."""


class SolveError(RuntimeError):
    """A factorization-backed solve missed the relative residual bound."""


class SPDFactor:
    """Cholesky factor of a sparse SPD matrix stored in upper banded form.

    Diagonal matrices (spectral stiffness, identity Gram) take a shortcut that
    still verifies positivity.
    """

    def __init__(self, matrix):
        a = sp.csr_matrix(matrix)
        if a.shape[0] != a.shape[1]:
            raise FactorizationError(f"matrix is not square: {a.shape}")
        if abs(a - a.T).max() > 1e-12 * max(abs(a).max(), 1.0):
            raise FactorizationError("matrix is not symmetric")
        self.matrix = a
        self.n = a.shape[0]
        coo = a.tocoo()
        self.bandwidth = int(np.max(np.abs(coo.row - coo.col))) if coo.nnz else 0
        if self.bandwidth == 0:
            diag = a.diagonal()
            if not np.all(diag > 0):
                raise FactorizationError("diagonal matrix has non-positive entries")
            self._diag = diag
            self._cb = None
            return
        bw = self.bandwidth
        ab = np.zeros((bw + 1, self.n))
        upper = coo.row <= coo.col
        r, c = coo.row[upper], coo.col[upper]
        ab[bw + r - c, c] = coo.data[upper]
        try:
            self._cb = sla.cholesky_banded(ab, lower=False)
        except np.linalg.LinAlgError as exc:
            raise FactorizationError(f"Cholesky factorization failed: {exc}") from exc
        self._diag = None

    def solve(self, b, check: bool = True) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        if self._cb is None:
            x = b / (self._diag if b.ndim == 1 else self._diag[:, None])
        else:
            x = sla.cho_solve_banded((self._cb, False), b, check_finite=False)
        if check:
            bnorm = np.linalg.norm(b)
            if bnorm > 0:
                res = np.linalg.norm(self.matrix @ x - b) / bnorm
                if res > RESIDUAL_TOL:
                    raise SolveError(f"relative residual {res:.3e} exceeds {RESIDUAL_TOL:g}")
        return x

    def residual(self, x, b) -> float:
        bnorm = np.linalg.norm(b)
        if bnorm == 0:
            return float(np.linalg.norm(self.matrix @ x))
        return float(np.linalg.norm(self.matrix @ x - b) / bnorm)


def factor(matrix) -> SPDFactor:
    """Factor ``matrix``, reusing a factor cached on the matrix object itself."""
    cached = getattr(matrix, "_ultrafun_factor", None)
    if cached is not None:
        return cached
    f = SPDFactor(matrix)
    try:
        matrix._ultrafun_factor = f
    except AttributeError:
        pass
    return f
