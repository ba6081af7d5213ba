import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opschur import block_matrix as bm
from opschur.operator_core import DimensionError, rank_one

from conftest import cgauss


def flatten_by_loops(A):
    N, M, d, _ = A.shape
    F = np.zeros((N * d, M * d), dtype=complex)
    for k in range(N):
        for j in range(M):
            F[k * d:(k + 1) * d, j * d:(j + 1) * d] = A[k, j]
    return F


def test_flatten_oracle_and_roundtrip(rng):
    A = cgauss(rng, 3, 4, 2, 2)
    np.testing.assert_array_equal(bm.flatten(A), flatten_by_loops(A))
    np.testing.assert_array_equal(bm.unflatten(bm.flatten(A), 2), A)


def test_apply_matches_flattened(rng):
    A, x = cgauss(rng, 3, 4, 2, 2), cgauss(rng, 4, 2)
    np.testing.assert_allclose(bm.apply(A, x).ravel(), bm.flatten(A) @ x.ravel())


def test_block_identity_is_identity(rng):
    x = cgauss(rng, 4, 2)
    np.testing.assert_allclose(bm.apply(bm.block_identity(4, 2), x), x)
    assert bm.opnorm(bm.block_identity(4, 2)) == pytest.approx(1.0)


def test_all_identity_norm():
    # N x N matrix of identities is J (x) I with norm N
    assert bm.opnorm(bm.all_identity(5, 5, 2)) == pytest.approx(5.0)


def test_opnorm_vs_lapack(rng):
    A = cgauss(rng, 5, 3, 3, 3)
    assert bm.opnorm(A) == pytest.approx(np.linalg.norm(bm.flatten(A), 2), rel=1e-10)


def test_schur_product_noncommutative(rng):
    A, B = cgauss(rng, 2, 2, 2, 2), cgauss(rng, 2, 2, 2, 2)
    C = bm.schur_product(A, B)
    np.testing.assert_allclose(C[1, 0], A[1, 0] @ B[1, 0])
    assert not np.allclose(C, bm.schur_product(B, A))


def test_schur_product_shape_mismatch(rng):
    with pytest.raises(DimensionError):
        bm.schur_product(cgauss(rng, 2, 2, 2, 2), cgauss(rng, 2, 3, 2, 2))


def test_adjoint_matrix(rng):
    A = cgauss(rng, 3, 4, 2, 2)
    x, y = cgauss(rng, 4, 2), cgauss(rng, 3, 2)
    lhs = bm.seq_inner(bm.apply(A, x), y)
    rhs = bm.seq_inner(x, bm.apply(bm.adjoint_matrix(A), y))
    assert lhs == pytest.approx(rhs)


def test_row_col_one_based(rng):
    A = cgauss(rng, 3, 4, 2, 2)
    np.testing.assert_array_equal(bm.row(A, 1), A[0])
    np.testing.assert_array_equal(bm.col(A, 4), A[:, 3])


def test_masks():
    assert bm.Diagonal(1).resolve(3, 3).sum() == 2
    assert bm.Diagonal(-2).resolve(3, 3)[2, 0]
    assert bm.UpperTriangle().resolve(3, 3).sum() == 6
    assert bm.LowerTriangle().resolve(3, 3).sum() == 6
    assert bm.Rectangle(2, 1).resolve(3, 3).sum() == 2
    assert bm.Explicit(frozenset({(1, 1), (3, 2)})).resolve(3, 3).sum() == 2
    with pytest.raises(IndexError):
        bm.Explicit(frozenset({(4, 1)})).resolve(3, 3)


def test_block_diagonal_norm(rng):
    A = np.zeros((4, 4, 2, 2), dtype=complex)
    blocks = cgauss(rng, 4, 2, 2)
    for k in range(4):
        A[k, k] = blocks[k]
    assert bm.opnorm(A) == pytest.approx(max(np.linalg.norm(b, 2) for b in blocks), rel=1e-10)


def test_projection_formulas(rng):
    A = cgauss(rng, 4, 5, 2, 2)
    assert bm.opnorm(bm.project(A, bm.Col(2))) == pytest.approx(bm.sot_norm_seq(A[:, 1]), rel=1e-10)
    row_adj = A[2].conj().transpose(0, 2, 1)
    assert bm.opnorm(bm.project(A, bm.Row(3))) == pytest.approx(bm.sot_norm_seq(row_adj), rel=1e-10)
    for l, sup in bm.diagonal_sups(A).items():
        assert bm.opnorm(bm.project(A, bm.Diagonal(l))) == pytest.approx(sup, rel=1e-10)


def test_rectangle_exhaustion_monotone(rng):
    A = cgauss(rng, 4, 4, 2, 2)
    prev = 0.0
    for n in range(1, 5):
        v = bm.opnorm(bm.project(A, bm.Rectangle(n, n)))
        assert v >= prev - 1e-12
        prev = v
    assert prev == pytest.approx(bm.opnorm(A))


def test_sequence_norm_chain(rng):
    T = cgauss(rng, 6, 3, 3)
    weak = bm.weak_l2_norm(T)
    sot = bm.sot_norm_seq(T)
    l2 = bm.l2_norm_seq(T)
    assert weak <= sot * (1 + 1e-12)
    assert sot <= l2 * (1 + 1e-12)


def test_weak_norm_exact_for_commuting_diagonals(rng):
    # real diagonal T_n: the sup is attained on real unit vectors, so a grid search over angles is an oracle
    vals = rng.standard_normal((5, 2))
    T = np.array([np.diag(v) for v in vals]).astype(complex)
    best = 0.0
    for a in np.linspace(0, np.pi / 2, 721):
        c = np.array([np.cos(a), np.sin(a)])
        for b in np.linspace(0, np.pi / 2, 181):
            y = np.array([np.cos(b), np.sin(b)])
            best = max(best, np.sqrt(np.sum(np.abs(np.einsum("a,nab,b->n", y, T, c)) ** 2)))
    assert bm.weak_l2_norm(T) == pytest.approx(best, rel=1e-4)
    assert bm.weak_l2_norm(T) >= best - 1e-12


def test_weak_norm_restarts_never_lower(rng):
    T = cgauss(rng, 4, 3, 3)
    assert bm.weak_l2_norm(T, restarts=8) >= bm.weak_l2_norm(T, restarts=0)


def test_column_and_row_sums(rng):
    A = cgauss(rng, 3, 3, 2, 2)
    assert bm.opnorm(A) <= bm.column_sot_l2(A) * (1 + 1e-12)
    assert bm.opnorm(A) <= bm.adjoint_row_sot_l2(A) * (1 + 1e-12)


def test_compress_embed_roundtrip(rng):
    B = cgauss(rng, 3, 3)
    z = cgauss(rng, 2)
    z /= np.linalg.norm(z)
    np.testing.assert_allclose(bm.compress(bm.embed_scalar(B, z), z, z), B)
    assert bm.opnorm(bm.embed_scalar(B, z)) == pytest.approx(np.linalg.norm(B, 2))


def test_multiplier_lb_diagonal_of_identities():
    A = bm.project(bm.all_identity(4, 4, 2), bm.Diagonal(1))
    assert bm.multiplier_norm_lb(A, budget=8) == pytest.approx(1.0)
    assert bm.multiplier_norm_lb(A, side="left", budget=8) == pytest.approx(1.0)


def test_multiplier_lb_below_schur_bound(rng):
    A = cgauss(rng, 3, 3, 2, 2)
    assert bm.multiplier_norm_lb(A, budget=8) <= bm.opnorm(A) * (1 + 1e-9)


def test_multiplier_lb_bad_side(rng):
    with pytest.raises(ValueError):
        bm.multiplier_norm_lb(cgauss(rng, 2, 2, 1, 1), side="middle")


def test_json_roundtrip(rng):
    A = cgauss(rng, 2, 3, 2, 2)
    np.testing.assert_array_equal(bm.opmatrix_from_dict(bm.opmatrix_to_dict(A)), A)
    with pytest.raises(ValueError):
        bm.opmatrix_from_dict({"type": "other"})


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_schur_submultiplicative_property(d, N, seed):
    rng = np.random.default_rng(seed)
    A, B = cgauss(rng, N, N, d, d), cgauss(rng, N, N, d, d)
    assert bm.opnorm(bm.schur_product(A, B)) <= bm.opnorm(A) * bm.opnorm(B) * (1 + 1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(1, 5), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_sup_entry_below_norm_property(d, N, M, seed):
    rng = np.random.default_rng(seed)
    A = cgauss(rng, N, M, d, d)
    assert bm.block_norms(A).max() <= bm.opnorm(A) * (1 + 1e-10)
    assert bm.opnorm(A) <= bm.block_l2_norm(A) * (1 + 1e-10)
