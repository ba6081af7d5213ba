import numpy as np
import pytest

from opschur import block_matrix as bm
from opschur import torus as tr
from opschur.operator_core import rank_one

from conftest import cgauss


def test_trigpoly_grid_matches_direct(rng):
    p = tr.TrigPoly(cgauss(rng, 5, 2, 2), -2)
    g = tr.Grid(16)
    np.testing.assert_allclose(p.on_grid(g), p(g.nodes), atol=1e-12)


def test_trigpoly_aliasing_grid(rng):
    # grids smaller than the width still evaluate correctly (wrap-around sum)
    p = tr.TrigPoly(cgauss(rng, 9), -4)
    g = tr.Grid(4)
    np.testing.assert_allclose(p.on_grid(g), p(g.nodes), atol=1e-12)


def test_from_samples_roundtrip(rng):
    p = tr.TrigPoly(cgauss(rng, 5, 3), -1)
    g = tr.Grid(8)
    q = tr.TrigPoly.from_samples(p.on_grid(g), p.kmin, p.kmax)
    np.testing.assert_allclose(q.coeffs, p.coeffs, atol=1e-12)
    with pytest.raises(tr.GridTooSmall):
        tr.TrigPoly.from_samples(p.on_grid(tr.Grid(4)), p.kmin, p.kmax)


def test_mean_and_l2(rng):
    c = cgauss(rng, 4)
    p = tr.TrigPoly(c, -1)
    assert p.mean() == c[1]
    assert p.l2_norm() == pytest.approx(np.linalg.norm(c))


def test_from_dict_and_add():
    p = tr.TrigPoly.from_dict({-1: 1.0, 2: 3.0})
    q = tr.TrigPoly.monomial(0, 2.0)
    s = p + q
    assert s.as_dict() == {-1: 1, 0: 2, 1: 0, 2: 3}


def test_block_symbol_coefficients(rng):
    A = cgauss(rng, 2, 3, 2, 2)
    sym = tr.BlockSymbol(A)
    np.testing.assert_array_equal(sym.coefficient(-3, 2), A[1, 2])
    s, t = 0.3, 1.1
    direct = sum(A[k, j] * np.exp(-1j * (j + 1) * s) * np.exp(1j * (k + 1) * t) for k in range(2) for j in range(3))
    np.testing.assert_allclose(sym(s, t), direct)
    g = tr.Grid(5)
    np.testing.assert_allclose(sym.on_grid(g, g)[2, 3], sym(g.nodes[2], g.nodes[3]))


def test_bilinear_identity(rng):
    A, x, y = cgauss(rng, 3, 4, 2, 2), cgauss(rng, 4, 2), cgauss(rng, 3, 2)
    assert tr.bilinear_BA(A, x, y) == pytest.approx(bm.seq_inner(bm.apply(A, x), y), abs=1e-12)


def test_tilde_h2_projections():
    e = np.eye(6)
    T = np.array([rank_one(v, v) for v in e])
    np.testing.assert_allclose(tr.tilde_h2_seq(T), 1.0, atol=1e-12)


def test_tilde_h2_scalar_is_l2(rng):
    # d = 1: Plancherel gives the l^2 norm of each partial sum
    T = cgauss(rng, 7, 1, 1)
    expected = np.sqrt(np.cumsum(np.abs(T.ravel()) ** 2))
    np.testing.assert_allclose(tr.tilde_h2_seq(T), expected, rtol=1e-12)


def test_tilde_h2_grid_guard(rng):
    with pytest.raises(tr.GridTooSmall):
        tr.tilde_h2_seq(cgauss(rng, 4, 2, 2), tr.Grid(8))


def test_tilde_h2_matrix_bounds(rng):
    A = cgauss(rng, 3, 3, 2, 2)
    h2 = tr.tilde_h2_matrix(A)
    assert bm.opnorm(A) <= h2 * (1 + 1e-9)
    assert tr.tilde_h2_matrix(A, ladder=False) <= h2 + 1e-12


def test_l1_tensor_norm_constant(rng):
    x, y = cgauss(rng, 3), cgauss(rng, 3)
    F = tr.TensorField.from_terms([(0, x, y)])
    val, G = tr.l1_tensor_norm(F)
    assert val == pytest.approx(np.linalg.norm(x) * np.linalg.norm(y))
    assert G >= 1


def test_l1_tensor_norm_unimodular_phase(rng):
    # |e^{ikt}| = 1, so a single-frequency field keeps its norm
    x, y = cgauss(rng, 2), cgauss(rng, 2)
    F = tr.TensorField.from_terms([(3, x, y)])
    val, _ = tr.l1_tensor_norm(F)
    assert val == pytest.approx(np.linalg.norm(x) * np.linalg.norm(y))
