import numpy as np
import pytest
import scipy.integrate as si
import scipy.linalg as sla

from ultrafun import BasisFamily, Domain, ResourceLimitError, build_level, eval_basis, integrate
from ultrafun.basis import FemLevel, SpectralLevel
from ultrafun.ultracore import Ultrafunction, project


def test_spectral_level1_hand_integral(unit_interval):
    s = build_level(unit_interval, "spectral-sine", 1)
    assert s.n == 1
    # int (sqrt2 sin pi x)'^2 = 2 pi^2 int cos^2 = pi^2
    assert s.stiffness.toarray()[0, 0] == pytest.approx(np.pi**2, rel=1e-15)
    assert eval_basis(s, 0.25) == pytest.approx([np.sqrt(2) * np.sin(np.pi / 4)])


def test_spectral_gram_identity_by_adaptive_quadrature(unit_interval):
    s = build_level(unit_interval, "spectral-sine", 3)
    G = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            G[i, j] = si.quad(lambda x: eval_basis(s, x)[i] * eval_basis(s, x)[j], 0, 1, limit=200)[0]
    assert np.abs(G - np.eye(3)).max() < 1e-12
    assert np.abs(s.gram.toarray() - np.eye(3)).max() <= 1e-12


def test_spectral_eigenvalues_on_rectangle(rect):
    s = build_level(rect, "spectral-sine", 4)
    expected = np.pi**2 * ((s.modes[:, 0] / 2.0) ** 2 + s.modes[:, 1] ** 2)
    assert np.allclose(s.stiffness.diagonal(), expected, rtol=1e-15)
    assert s.n == 16


def test_spectral_mode_order(unit_square):
    s = build_level(unit_square, "spectral-sine", 3)
    assert [tuple(m) for m in s.modes[:6]] == [(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (3, 1)]


def test_eval_basis_examples(unit_interval, unit_square):
    s = build_level(unit_interval, "spectral-sine", 2)
    assert eval_basis(s, 0.5) == pytest.approx([np.sqrt(2), 0.0], abs=1e-15)
    f = build_level(unit_square, "fem-p1", 2)
    for k, node in enumerate(f.dof_coords):
        e = np.zeros(f.n)
        e[k] = 1.0
        assert np.array_equal(eval_basis(f, node), e)


def _fem_dense_oracle(f: FemLevel, per_cell=24):
    """Centroid rule on a fine sub-triangulation; gradients by central differences.

    Sub-triangle centroids never lie on element edges, so sampled gradients are
    the exact piecewise constants.
    """
    k = f.cells * per_cell
    d = 1.0 / k
    i = np.arange(k) * d
    X, Y = np.meshgrid(i, i, indexing="ij")
    corners = np.stack([X.ravel(), Y.ravel()], -1)
    pts = np.concatenate([corners + [2 * d / 3, d / 3], corners + [d / 3, 2 * d / 3]])
    w = d * d / 2
    B = f.eval_basis_many(pts)
    eps = 1e-8
    gx = (f.eval_basis_many(pts + [eps, 0]) - f.eval_basis_many(pts - [eps, 0])) / (2 * eps)
    gy = (f.eval_basis_many(pts + [0, eps]) - f.eval_basis_many(pts - [0, eps])) / (2 * eps)
    return w * B.T @ B, w * (gx.T @ gx + gy.T @ gy)


def test_fem_unit_square_h4(unit_square):
    f = build_level(unit_square, BasisFamily("fem-p1", 4))
    assert f.n == 9
    G, K = f.gram.toarray(), f.stiffness.toarray()
    sla.cholesky(G)
    sla.cholesky(K)
    G_or, K_or = _fem_dense_oracle(f)
    # midpoint rule on quadratics: error O(h_fine^2)
    assert np.abs(G - G_or).max() < 1e-3 * np.abs(G).max()
    # gradients are piecewise constant: the centroid rule is exact
    assert np.abs(K - K_or).max() < 1e-6
    # closed-form stencil for the diagonal split of a uniform square mesh
    h = 0.25
    assert K[4, 4] == pytest.approx(4.0)
    assert K[4, 1] == pytest.approx(-1.0) and K[4, 3] == pytest.approx(-1.0)
    assert K[4, 0] == pytest.approx(0.0, abs=1e-15)
    assert G[4, 4] == pytest.approx(h**2 / 2)
    assert G[4, 8] == pytest.approx(h**2 / 12) and G[4, 5] == pytest.approx(h**2 / 12)
    assert G[4, 2] == pytest.approx(0.0, abs=1e-15)


def test_fem_1d_matrices(unit_interval):
    f = build_level(unit_interval, "fem-p1", 3)
    h = 1 / 8
    n = 7
    K = (2 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)) / h
    G = h / 6 * (4 * np.eye(n) + np.eye(n, k=1) + np.eye(n, k=-1))
    assert np.allclose(f.stiffness.toarray(), K, rtol=1e-14, atol=1e-12)
    assert np.allclose(f.gram.toarray(), G, rtol=1e-14, atol=1e-15)


@pytest.mark.parametrize("name", ["spectral-1d", "spectral-2d", "fem-1d", "fem-2d"])
def test_spd(levels, name):
    s = levels[name]
    for M in (s.gram.toarray(), s.stiffness.toarray()):
        assert np.allclose(M, M.T)
        sla.cholesky(M)


@pytest.mark.parametrize(
    "dom, kind, levels_",
    [
        (Domain.unit(1), "spectral-sine", (2, 5)),
        (Domain.unit(2), "spectral-sine", (2, 4)),
        (Domain.unit(1), "fem-p1", (2, 4)),
        (Domain.unit(2), "fem-p1", (2, 3)),
    ],
)
def test_nestedness(dom, kind, levels_):
    coarse = build_level(dom, kind, levels_[0])
    fine = build_level(dom, kind, levels_[1])
    assert fine.n > coarse.n
    for i in range(coarse.n):
        phi = Ultrafunction.basis_function(coarse, i).as_function()
        pf = project(fine, phi).as_function()
        err = fine.integrate(lambda *x: (phi(*x) - pf(*x)) ** 2)
        norm = fine.integrate(lambda *x: phi(*x) ** 2)
        assert np.sqrt(max(err, 0) / norm) <= 1e-10


def test_dimension_grows_with_level(unit_square):
    for kind in ("spectral-sine", "fem-p1"):
        ns = [build_level(unit_square, kind, l).n for l in range(1 if kind == "spectral-sine" else 1, 5)]
        assert all(b > a for a, b in zip(ns, ns[1:]))


def test_orthonormality_and_ibp_with_quadrature(unit_square):
    s = build_level(unit_square, "spectral-sine", 5)
    nodes, w = s.quadrature
    B = s.eval_basis_many(nodes)
    G = B.T @ (w[:, None] * B)
    assert np.abs(G - np.eye(s.n)).max() <= 1e-12
    # -Lap phi_i written out independently of the class
    k1, k2 = s.modes[:, 0], s.modes[:, 1]
    x, y = nodes[:, 0:1], nodes[:, 1:2]
    lap = 2 * np.pi**2 * (k1**2 + k2**2) * np.sin(k1 * np.pi * x) * np.sin(k2 * np.pi * y)
    ibp = lap.T @ (w[:, None] * B)
    assert np.abs(ibp - s.stiffness.toarray()).max() <= 1e-10


def test_boundary_vanishing(unit_square, rect):
    for dom in (unit_square, rect):
        s = build_level(dom, "spectral-sine", 7)
        f = build_level(dom, "fem-p1", 3)
        pts = dom.boundary_samples(40)
        assert np.all(s.eval_basis_many(pts) == 0.0)
        assert np.abs(f.eval_basis_many(pts)).max() <= 1e-14


@pytest.mark.parametrize("name", ["spectral-1d", "fem-1d"])
def test_integrate_examples_1d(levels, name):
    s = levels[name]
    assert integrate(s, lambda x: x) == pytest.approx(0.5, abs=1e-13)
    assert integrate(s, lambda x: 1.0) == pytest.approx(1.0, abs=1e-13)


@pytest.mark.parametrize("name", ["spectral-2d", "fem-2d"])
def test_integrate_examples_2d(levels, name):
    s = levels[name]
    assert integrate(s, lambda x, y: 1.0) == pytest.approx(1.0, abs=1e-13)
    phi = Ultrafunction.basis_function(s, 0).as_function()
    assert integrate(s, lambda x, y: phi(x, y) ** 2) == pytest.approx(s.gram[0, 0], rel=1e-12)


def test_quadrature_override(unit_interval):
    s = build_level(unit_interval, "spectral-sine", 4, quad_points=50)
    assert len(s.quadrature[1]) == 50


def test_resource_cap(unit_square):
    with pytest.raises(ResourceLimitError):
        build_level(unit_square, "spectral-sine", 300)
    with pytest.raises(ResourceLimitError):
        build_level(unit_square, "fem-p1", 5, max_n=100)


def test_invalid_family():
    with pytest.raises(ValueError):
        BasisFamily("chebyshev", 4)
    with pytest.raises(ValueError):
        BasisFamily("fem-p1", 1)
    with pytest.raises(ValueError):
        BasisFamily.at_level("spectral-sine", 0)


def test_dump_csv(tmp_path, levels):
    g, k = levels["fem-1d"].dump_csv(tmp_path)
    back = np.loadtxt(k, delimiter=",")
    assert np.array_equal(back, levels["fem-1d"].stiffness.toarray())
    assert isinstance(levels["spectral-1d"], SpectralLevel)
