"""Truncated matrices with operator entries acting on l^2_M(H) -> l^2_N(H).

An operator matrix is a complex array of shape ``(N, M, d, d)`` whose block
``A[k-1, j-1]`` is the entry T_kj (block indices are 1-based in every public
signature that takes one). Sequences in l^2(H) are ``(len, d)`` arrays.
"""
from dataclasses import dataclass

import numpy as np

from .operator_core import DimensionError, rank_one, spectral_norm, spectral_norms

DEFAULT_SEED = 0xC0FFEE


def as_opmatrix(A):
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 4 or A.shape[2] != A.shape[3] or 0 in A.shape:
        raise DimensionError(f"operator matrix must have shape (N, M, d, d), got {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("operator matrix entries must be finite")
    return A


def as_hseq(x, d=None):
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 2 or 0 in x.shape:
        raise DimensionError(f"H-sequence must have shape (len, d), got {x.shape}")
    if d is not None and x.shape[1] != d:
        raise DimensionError(f"expected vectors of dim {d}, got {x.shape[1]}")
    return x


def from_blocks(blocks):
    """Build from a nested list ``blocks[k][j]`` of d x d operators."""
    return as_opmatrix(np.array([[np.asarray(b, dtype=np.complex128) for b in row] for row in blocks]))


def block_identity(N, d):
    A = np.zeros((N, N, d, d), dtype=np.complex128)
    for k in range(N):
        A[k, k] = np.eye(d)
    return A


def all_identity(N, M, d):
    return np.broadcast_to(np.eye(d, dtype=np.complex128), (N, M, d, d)).copy()


def flatten(A):
    A = as_opmatrix(A)
    N, M, d, _ = A.shape
    return A.transpose(0, 2, 1, 3).reshape(N * d, M * d)


def unflatten(F, d):
    F = np.asarray(F, dtype=np.complex128)
    rows, cols = F.shape
    if rows % d or cols % d:
        raise DimensionError(f"{F.shape} is not partitioned into {d} x {d} blocks")
    return F.reshape(rows // d, d, cols // d, d).transpose(0, 2, 1, 3).copy()


def apply(A, x):
    A = as_opmatrix(A)
    x = as_hseq(x, A.shape[2])
    if x.shape[0] != A.shape[1]:
        raise DimensionError(f"sequence length {x.shape[0]} != matrix cols {A.shape[1]}")
    return np.einsum("kjab,jb->ka", A, x)


def seq_inner(x, y):
    """``<<x, y>> = sum_j <x_j, y_j>``."""
    x, y = as_hseq(x), as_hseq(y)
    if x.shape != y.shape:
        raise DimensionError(f"sequence shapes differ: {x.shape} vs {y.shape}")
    return complex(np.vdot(y, x))


def seq_norm(x):
    return float(np.linalg.norm(as_hseq(x)))


def opnorm(A):
    """Norm of A in B(l^2(H)) at this truncation."""
    return spectral_norm(flatten(A))


def schur_product(A, B):
    """Entrywise composition ``(T_kj S_kj)``; not commutative."""
    A, B = as_opmatrix(A), as_opmatrix(B)
    if A.shape != B.shape:
        raise DimensionError(f"shape mismatch: {A.shape} vs {B.shape}")
    return np.einsum("kjab,kjbc->kjac", A, B)


def adjoint_matrix(A):
    """Matrix with entries ``S_kj = T_jk^*``."""
    return as_opmatrix(A).transpose(1, 0, 3, 2).conj().copy()


def row(A, k):
    return as_opmatrix(A)[k - 1]


def col(A, j):
    return as_opmatrix(A)[:, j - 1]


def block_norms(A):
    """``(N, M)`` array of ||T_kj||."""
    return spectral_norms(as_opmatrix(A))


# ------------------------------------------------------------------ masks

@dataclass(frozen=True)
class Row:
    k: int

    def resolve(self, N, M):
        m = np.zeros((N, M), dtype=bool)
        if 1 <= self.k <= N:
            m[self.k - 1] = True
        return m


@dataclass(frozen=True)
class Col:
    j: int

    def resolve(self, N, M):
        m = np.zeros((N, M), dtype=bool)
        if 1 <= self.j <= M:
            m[:, self.j - 1] = True
        return m


@dataclass(frozen=True)
class Diagonal:
    """The set D_l = {(k, k + l)}."""
    l: int

    def resolve(self, N, M):
        k, j = np.indices((N, M))
        return (j - k) == self.l


class UpperTriangle:
    def resolve(self, N, M):
        k, j = np.indices((N, M))
        return j >= k

    def __eq__(self, other):
        return type(other) is UpperTriangle

    def __hash__(self):
        return hash("upper")


class LowerTriangle:
    def resolve(self, N, M):
        k, j = np.indices((N, M))
        return j <= k

    def __eq__(self, other):
        return type(other) is LowerTriangle

    def __hash__(self):
        return hash("lower")


@dataclass(frozen=True)
class Rectangle:
    """[1, n] x [1, m]."""
    n: int
    m: int

    def resolve(self, N, M):
        mask = np.zeros((N, M), dtype=bool)
        mask[: max(self.n, 0), : max(self.m, 0)] = True
        return mask


@dataclass(frozen=True)
class Explicit:
    cells: frozenset

    def resolve(self, N, M):
        mask = np.zeros((N, M), dtype=bool)
        for k, j in self.cells:
            if not (1 <= k <= N and 1 <= j <= M):
                raise IndexError(f"cell {(k, j)} outside [1,{N}]x[1,{M}]")
            mask[k - 1, j - 1] = True
        return mask


def project(A, S):
    """P_S A: keep the blocks indexed by the mask ``S``, zero the rest."""
    A = as_opmatrix(A)
    keep = S.resolve(A.shape[0], A.shape[1])
    return np.where(keep[:, :, None, None], A, 0.0)


def diagonal_sups(A):
    """``{l: sup_k ||T_{k,k+l}||}`` for every diagonal that meets the truncation."""
    A = as_opmatrix(A)
    N, M = A.shape[:2]
    norms = block_norms(A)
    out = {}
    for l in range(-(N - 1), M):
        k = np.arange(max(0, -l), min(N, M - l))
        out[l] = float(norms[k, k + l].max())
    return out


# ----------------------------------------------------------- sequence norms

def _as_opseq(T):
    T = np.asarray(T, dtype=np.complex128)
    if T.ndim == 2:
        T = T[None]
    if T.ndim != 3 or T.shape[1] != T.shape[2] or T.shape[0] == 0:
        raise DimensionError(f"operator sequence must have shape (n, d, d), got {T.shape}")
    return T


def sot_norm_seq(T):
    """sup_{|x|=1} (sum_n |T_n x|^2)^(1/2), i.e. the norm of the stacked column [T_1; T_2; ...]."""
    T = _as_opseq(T)
    return spectral_norm(T.reshape(-1, T.shape[2]))


def sot_norm_matrix(A):
    """sup_{|x|=1} (sum_kj |T_kj x|^2)^(1/2)."""
    A = as_opmatrix(A)
    return sot_norm_seq(A.reshape(-1, A.shape[2], A.shape[3]))


def l2_norm_seq(T):
    """Norm in l^2(N, B(H)): (sum_n ||T_n||^2)^(1/2)."""
    T = _as_opseq(T)
    return float(np.sqrt(np.sum(spectral_norms(T) ** 2)))


def block_l2_norm(A):
    """Norm in l^2(N^2, B(H))."""
    return float(np.sqrt(np.sum(block_norms(A) ** 2)))


def column_sot_l2(A):
    """(sum_j ||C_j||_SOT^2)^(1/2)."""
    A = as_opmatrix(A)
    return float(np.sqrt(sum(sot_norm_seq(A[:, j]) ** 2 for j in range(A.shape[1]))))


def adjoint_row_sot_l2(A):
    """(sum_k ||R_k^*||_SOT^2)^(1/2), R_k^* being the row of adjoint blocks."""
    A = as_opmatrix(A)
    return float(np.sqrt(sum(sot_norm_seq(A[k].conj().transpose(0, 2, 1)) ** 2 for k in range(A.shape[0]))))


def _top_singular_pair(M):
    u, s, vh = np.linalg.svd(M, full_matrices=False)
    return u[:, 0], s[0], vh[0].conj()


def _weak_ascent(T, y, maxiter=500, tol=1e-14):
    val = -1.0
    for _ in range(maxiter):
        # fix y: rows y^H T_n, best x is the top right singular vector
        My = np.einsum("a,nab->nb", y.conj(), T)
        _, _, x = _top_singular_pair(My)
        # fix x: columns T_n x, best y is the top left singular vector
        Tx = np.einsum("nab,b->an", T, x)
        y, new, _ = _top_singular_pair(Tx)
        if new - val <= tol * max(new, 1e-300):
            val = max(val, new)
            break
        val = new
    return float(val)


def weak_l2_norm(T, restarts=8, seed=DEFAULT_SEED):
    """Lower bound on sup_{|x|=|y|=1} (sum_n |<T_n x, y>|^2)^(1/2).

    Alternating maximisation over x and y started from the normalised all-ones
    vector and then ``restarts`` seeded random vectors; the best value wins.
    Adding restarts never lowers the result for a fixed seed.
    """
    T = _as_opseq(T)
    d = T.shape[1]
    y0 = np.ones(d, dtype=np.complex128) / np.sqrt(d)
    best = _weak_ascent(T, y0)
    rng = np.random.default_rng(seed)
    for _ in range(restarts):
        y = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        y /= np.linalg.norm(y)
        val = _weak_ascent(T, y)
        if val > best:
            best = val
    return best


def weak_l2_norm_matrix(A, restarts=8, seed=DEFAULT_SEED):
    A = as_opmatrix(A)
    return weak_l2_norm(A.reshape(-1, A.shape[2], A.shape[3]), restarts, seed)


# --------------------------------------------------------- scalar embedding

def compress(A, x0, y0):
    """Scalar matrix ``(<T_kj x0, y0>)``."""
    A = as_opmatrix(A)
    x0 = np.asarray(x0, dtype=np.complex128)
    y0 = np.asarray(y0, dtype=np.complex128)
    if x0.shape != (A.shape[2],) or y0.shape != (A.shape[2],):
        raise DimensionError("probe vectors must match the block dimension")
    return np.einsum("a,kjab,b->kj", y0.conj(), A, x0)


def embed_scalar(B, z0):
    """Operator matrix with blocks ``beta_kj * (z0~ (x) z0)``, i.e. i_z0 B pi_z0."""
    B = np.asarray(B, dtype=np.complex128)
    if B.ndim != 2:
        raise DimensionError("scalar matrix must be two-dimensional")
    P = rank_one(z0, z0)
    return B[:, :, None, None] * P[None, None]


# -------------------------------------------------------- multiplier bounds

def _schur_ratio(A, B, side):
    nb = opnorm(B)
    if nb == 0.0:
        return 0.0
    C = schur_product(B, A) if side == "right" else schur_product(A, B)
    return opnorm(C) / nb


def multiplier_candidates(shape, budget, seed):
    """Deterministic probe matrices for the Schur multiplier sampler."""
    N, M, d, _ = shape
    rng = np.random.default_rng(seed)
    for k in range(N):
        for j in range(M):
            B = np.zeros(shape, dtype=np.complex128)
            B[k, j] = np.eye(d)
            yield B
    eye = np.eye(d)
    for a in range(d):
        for b in range(d):
            yield np.broadcast_to(rank_one(eye[a], eye[b]), shape).copy()
    for _ in range(max(budget // 2, 1)):
        z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        z /= np.linalg.norm(z)
        beta = rng.standard_normal((N, M)) + 1j * rng.standard_normal((N, M))
        yield embed_scalar(beta, z)
    for _ in range(budget):
        yield rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def multiplier_norm_lb(A, side="right", budget=32, seed=DEFAULT_SEED, extra=(), refine=None):
    """Sampled lower bound for the right (``B*A``) or left (``A*B``) multiplier norm.

    Probes: single identity blocks, constant rank-one patterns, embedded random
    scalar matrices, random Gaussian matrices, any ``extra`` matrices, and then
    ``refine`` accept-if-better random perturbations of the best probe. Only
    valid for the truncated matrix; no claim is made about the infinite one.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    A = as_opmatrix(A)
    refine = budget if refine is None else refine
    best, best_B = 0.0, None
    for B in list(multiplier_candidates(A.shape, budget, seed)) + [as_opmatrix(E) for E in extra]:
        r = _schur_ratio(A, B, side)
        if r > best:
            best, best_B = r, B
    if best_B is None:
        return 0.0
    rng = np.random.default_rng(seed + 1)
    step = 0.5
    B = best_B / opnorm(best_B)
    for _ in range(refine):
        trial = B + step * (rng.standard_normal(A.shape) + 1j * rng.standard_normal(A.shape)) / np.sqrt(A.size)
        r = _schur_ratio(A, trial, side)
        if r > best:
            best, B = r, trial / opnorm(trial)
        else:
            step *= 0.7
    return float(best)


# ------------------------------------------------------------------- JSON

def opmatrix_to_dict(A):
    """``{"type": "opmatrix", "re": [...], "im": [...]}`` with nested (N, M, d, d) lists."""
    A = as_opmatrix(A)
    return {"type": "opmatrix", "re": A.real.tolist(), "im": A.imag.tolist()}


def opmatrix_from_dict(obj):
    if not isinstance(obj, dict) or obj.get("type") != "opmatrix" or "re" not in obj:
        raise ValueError("not an opmatrix literal")
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj["im"], dtype=float) if "im" in obj else np.zeros_like(re)
    if re.shape != im.shape:
        raise ValueError("re and im parts differ in shape")
    return as_opmatrix(re + 1j * im)
