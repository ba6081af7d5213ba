"""Toeplitz matrices built from measures, and their Schur multiplier action.

Index order throughout: ``T_kj = mu^(j - k)``. At d = 1 and ``dmu = f dm``
this gives the classical ``f^(k - j)``.
"""
from dataclasses import dataclass

import numpy as np

from .block_matrix import (
    DimensionError,
    as_hseq,
    as_opmatrix,
    compress,
    embed_scalar,
    opnorm,
    schur_product,
)
from .measures import (
    DEFAULT_R_LADDER,
    DensityMeasure,
    DiscreteMeasure,
    LazyMeasure,
    NotComputable,
    measure_from_dict,
    measure_to_dict,
    mu_x,
    poisson_grid,
    poisson_l1,
    psi_pair,
    variation,
)
from .torus import Grid, TensorField, TrigPoly

__all__ = [
    "ToeplitzSpec", "build_toeplitz", "toeplitz_norm_ladder", "compress", "embed_scalar",
    "schur_action_rhs", "mult2_rhs", "direct_schur_pairing", "multiplier_upper_bound",
    "build_F", "msot_ladder", "msot_membership",
]


@dataclass(frozen=True)
class ToeplitzSpec:
    measure: object
    N: int

    def coefficients(self):
        """mu^(l) for l = -(N-1)..(N-1)."""
        return self.measure.fourier_range(-(self.N - 1), self.N - 1)

    def matrix(self):
        return build_toeplitz(self.measure, self.N)

    def to_dict(self):
        return {"measure": measure_to_dict(self.measure), "N": self.N}

    @classmethod
    def from_dict(cls, obj):
        return cls(measure_from_dict(obj["measure"]), int(obj["N"]))


def build_toeplitz(mu, N):
    if N < 1:
        raise ValueError("N must be positive")
    if not mu.is_operator:
        raise DimensionError("Toeplitz matrices need an operator-valued measure")
    coeffs = mu.fourier_range(-(N - 1), N - 1)
    k, j = np.indices((N, N))
    return coeffs[j - k + N - 1]


def toeplitz_norm_ladder(mu, N_ladder):
    """||build_toeplitz(mu, N)|| for each N in the ladder (density measures only)."""
    if not isinstance(mu, DensityMeasure):
        raise NotComputable("the norm ladder is defined for density measures")
    return [opnorm(build_toeplitz(mu, int(N))) for N in N_ladder]


def direct_schur_pairing(A, B, x, y, order="AB"):
    """<<(A*B)(x), y>> (or with ``order='BA'``, <<(B*A)(x), y>>) evaluated directly."""
    A, B = as_opmatrix(A), as_opmatrix(B)
    C = schur_product(A, B) if order == "AB" else schur_product(B, A)
    x, y = as_hseq(x), as_hseq(y)
    return complex(np.vdot(y, np.einsum("kjab,jb->ka", C, x)))


def _action_kernel(B, x, y, u):
    """Kernel of G(u) = sum_kj (S_kj x_j) e^{iju} (x) y_k e^{-iku} at the points ``u``."""
    N, M = B.shape[:2]
    Sx = np.einsum("kjab,jb->kja", B, x)
    ph = np.exp(1j * np.multiply.outer(u, np.arange(1, M + 1)[None, :] - np.arange(1, N + 1)[:, None]))
    return np.einsum("ukj,ka,kjb->uab", ph, y.conj(), Sx)


def schur_action_rhs(mu, B, x, y, grid=None):
    """Psi_mu(G) for G(u) = sum_kj (S_kj x_j) phi_j(u) (x) y_k conj(phi_k(u)).

    Equals <<(A*B)(x), y>> for A = build_toeplitz(mu, N). Discrete measures
    are paired atom by atom (exact); densities by quadrature of
    ``sum(f(u) * K(u))`` on an oversampled grid; lazy measures coefficientwise.
    """
    B = as_opmatrix(B)
    N, M, d, _ = B.shape
    x, y = as_hseq(x, d), as_hseq(y, d)
    if x.shape[0] != M or y.shape[0] != N:
        raise DimensionError("sequence lengths must match B")
    if isinstance(mu, DiscreteMeasure):
        if len(mu.angles) == 0:
            return 0j
        K = _action_kernel(B, x, y, mu.angles)
        return complex(np.sum(mu.weights * K))
    if isinstance(mu, DensityMeasure):
        width = mu.symbol.width + N + M
        grid = grid or Grid.oversampled(width)
        K = _action_kernel(B, x, y, grid.nodes)
        f = mu.density_on(grid)
        return complex(grid.integrate(np.einsum("uab,uab->u", f, K)))
    return psi_pair(mu, _action_poly(B, x, y))


def _action_poly(B, x, y):
    N, M = B.shape[:2]
    Sx = np.einsum("kjab,jb->kja", B, x)
    c = np.zeros((N + M - 1, B.shape[2], B.shape[2]), dtype=np.complex128)
    for k in range(N):
        for j in range(M):
            c[j - k + N - 1] += np.outer(y[k].conj(), Sx[k, j])
    return TrigPoly(c, -(N - 1))


def build_F(spec, x, y):
    """F_{x,y,A}(t) = sum_k (sum_j nu^(j-k)(x_j) phi_j(t)) (x) y_k conj(phi_k(t)).

    ``spec`` is a ToeplitzSpec for nu (its N must match the sequence lengths).
    """
    N = spec.N
    d = spec.measure.dim
    x, y = as_hseq(x, d), as_hseq(y, d)
    if x.shape[0] != N or y.shape[0] != N:
        raise DimensionError("x and y must have length N")
    coeffs = spec.coefficients()
    c = np.zeros((2 * N - 1, d, d), dtype=np.complex128)
    for k in range(N):
        for j in range(N):
            l = j - k
            c[l + N - 1] += np.outer(y[k].conj(), coeffs[l + N - 1] @ x[j])
    return TensorField(TrigPoly(c, -(N - 1)))


def mult2_rhs(mu, nu, x, y):
    """Psi_mu(F_{x,y,B}) where B is the Toeplitz matrix of ``nu``."""
    N = as_hseq(x).shape[0]
    F = build_F(ToeplitzSpec(nu, N), x, y)
    if isinstance(mu, DiscreteMeasure):
        if len(mu.angles) == 0:
            return 0j
        return complex(np.sum(mu.weights * F(mu.angles)))
    return psi_pair(mu, F)


def multiplier_upper_bound(mu):
    """|mu|, which bounds both the left and right multiplier norms of its Toeplitz matrix."""
    if isinstance(mu, LazyMeasure):
        raise NotComputable("variation of a lazy measure is not available")
    return variation(mu)


def msot_ladder(mu, x, r_ladder=DEFAULT_R_LADDER, grid=None):
    """``{r: int ||P_r * mu_x(t)|| dt/2pi}`` for each r."""
    mx = mu_x(mu, x)
    return {r: poisson_l1(mx, r, grid or poisson_grid(r)) for r in r_ladder}


def msot_membership(mu, x, r_ladder=DEFAULT_R_LADDER, grid=None):
    """sup_r ||P_r * mu_x||_{L^1(T,H)} over the ladder; a computable stand-in for |mu_x|."""
    return max(msot_ladder(mu, x, r_ladder, grid).values())
