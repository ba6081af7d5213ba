"""Trigonometric polynomials on the circle and grid quadrature.

Integrals are normalised, ``int f dt/2pi``. Two grid regimes are used:
exact grids (size > coefficient width) for polynomial integrands and
oversampled grids for integrands that are norms of polynomials.
"""
from dataclasses import dataclass

import numpy as np

from .block_matrix import as_hseq, as_opmatrix
from .operator_core import DimensionError, nuclear_norms, spectral_norms

OVERSAMPLE = 8


class GridTooSmall(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    """Uniform nodes 2 pi g / G with weight 1/G."""

    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("grid size must be positive")

    @property
    def nodes(self):
        return 2.0 * np.pi * np.arange(self.size) / self.size

    @property
    def weight(self):
        return 1.0 / self.size

    @classmethod
    def exact(cls, width):
        """Smallest grid that integrates polynomials of coefficient width ``width`` exactly."""
        return cls(max(int(width), 1))

    @classmethod
    def oversampled(cls, width, factor=OVERSAMPLE):
        return cls(max(int(factor * width), 1))

    def integrate(self, values):
        """Mean over the leading axis (ascending node order)."""
        return np.mean(np.asarray(values), axis=0)


class TrigPoly:
    """Finitely supported ``k -> c_k`` with values of any fixed shape.

    ``coeffs[i]`` multiplies ``exp(1j * (kmin + i) * t)``.
    """

    def __init__(self, coeffs, kmin=0):
        c = np.asarray(coeffs, dtype=np.complex128)
        if c.ndim == 0 or c.shape[0] == 0:
            raise ValueError("need at least one coefficient")
        self.coeffs = c
        self.kmin = int(kmin)

    @classmethod
    def from_dict(cls, mapping, value_shape=None):
        if not mapping:
            if value_shape is None:
                raise ValueError("empty polynomial needs value_shape")
            return cls(np.zeros((1,) + tuple(value_shape)), 0)
        keys = sorted(int(k) for k in mapping)
        first = np.asarray(mapping[keys[0]] if keys[0] in mapping else mapping[str(keys[0])], dtype=np.complex128)
        c = np.zeros((keys[-1] - keys[0] + 1,) + first.shape, dtype=np.complex128)
        for k, v in mapping.items():
            c[int(k) - keys[0]] = v
        return cls(c, keys[0])

    @classmethod
    def monomial(cls, k, value):
        return cls(np.asarray(value, dtype=np.complex128)[None], k)

    @classmethod
    def from_samples(cls, samples, kmin, kmax):
        """Recover coefficients kmin..kmax by DFT of samples on a uniform grid."""
        samples = np.asarray(samples, dtype=np.complex128)
        G = samples.shape[0]
        if G < kmax - kmin + 1:
            raise GridTooSmall(f"{G} nodes cannot resolve width {kmax - kmin + 1}")
        spec = np.fft.fft(samples, axis=0) / G
        ks = np.arange(kmin, kmax + 1)
        return cls(spec[ks % G], kmin)

    @property
    def kmax(self):
        return self.kmin + self.coeffs.shape[0] - 1

    @property
    def width(self):
        return self.coeffs.shape[0]

    @property
    def value_shape(self):
        return self.coeffs.shape[1:]

    @property
    def degrees(self):
        return np.arange(self.kmin, self.kmax + 1)

    def coefficient(self, k):
        i = k - self.kmin
        if 0 <= i < self.width:
            return self.coeffs[i]
        return np.zeros(self.value_shape, dtype=np.complex128)

    def as_dict(self):
        return {int(k): self.coeffs[i] for i, k in enumerate(self.degrees)}

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        ph = np.exp(1j * np.multiply.outer(t, self.degrees))
        return np.tensordot(ph, self.coeffs, axes=(-1, 0))

    def on_grid(self, grid):
        """Values at the grid nodes, shape ``(G,) + value_shape``; FFT-based."""
        G = grid.size
        buf = np.zeros((G,) + self.value_shape, dtype=np.complex128)
        np.add.at(buf, self.degrees % G, self.coeffs)
        vals = np.fft.ifft(buf, axis=0) * G
        return vals

    def map(self, f):
        """Apply a linear map coefficientwise."""
        return TrigPoly(np.array([f(c) for c in self.coeffs]), self.kmin)

    def __add__(self, other):
        lo, hi = min(self.kmin, other.kmin), max(self.kmax, other.kmax)
        c = np.zeros((hi - lo + 1,) + self.value_shape, dtype=np.complex128)
        c[self.kmin - lo: self.kmax - lo + 1] += self.coeffs
        c[other.kmin - lo: other.kmax - lo + 1] += other.coeffs
        return TrigPoly(c, lo)

    def mean(self):
        """int p dt/2pi, i.e. the coefficient at 0."""
        return self.coefficient(0)

    def l2_norm(self, grid=None):
        """(int |p(t)|^2 dt/2pi)^(1/2) by exact-grid quadrature."""
        grid = grid or Grid.exact(2 * self.width - 1)
        vals = self.on_grid(grid).reshape(grid.size, -1)
        return float(np.sqrt(grid.integrate(np.sum(np.abs(vals) ** 2, axis=1))))


def h_poly(x):
    """h_x(t) = sum_j x_j e^{ijt}, j = 1..len."""
    x = as_hseq(x)
    return TrigPoly(x, 1)


class BlockSymbol:
    """A_{N,M}(s, t) = sum_kj T_kj e^{-ijs} e^{ikt}.

    As a bivariate polynomial the coefficient at (s-degree -j, t-degree k) is T_kj.
    """

    def __init__(self, A):
        self.blocks = as_opmatrix(A)

    @property
    def shape(self):
        return self.blocks.shape

    def coefficient(self, p, q):
        N, M = self.blocks.shape[:2]
        k, j = q, -p
        if 1 <= k <= N and 1 <= j <= M:
            return self.blocks[k - 1, j - 1]
        return np.zeros(self.blocks.shape[2:], dtype=np.complex128)

    def support(self):
        k, j = np.nonzero(np.any(self.blocks != 0, axis=(2, 3)))
        return {(-(jj + 1), kk + 1) for kk, jj in zip(k, j)}

    def __call__(self, s, t):
        N, M = self.blocks.shape[:2]
        es = np.exp(-1j * np.arange(1, M + 1) * s)
        et = np.exp(1j * np.arange(1, N + 1) * t)
        return np.einsum("k,j,kjab->ab", et, es, self.blocks)

    def on_grid(self, grid_s, grid_t, n=None, m=None):
        """Values on a product grid, shape (Gs, Gt, d, d); optionally only the
        top-left ``n`` rows and ``m`` columns."""
        A = self.blocks
        n = A.shape[0] if n is None else n
        m = A.shape[1] if m is None else m
        es = np.exp(-1j * np.multiply.outer(grid_s.nodes, np.arange(1, m + 1)))
        et = np.exp(1j * np.multiply.outer(grid_t.nodes, np.arange(1, n + 1)))
        return np.einsum("tk,sj,kjab->stab", et, es, A[:n, :m])


def block_symbol(A):
    return BlockSymbol(A)


def _check_oversampled(grid, width):
    need = OVERSAMPLE * width
    if grid.size < need:
        raise GridTooSmall(f"grid of {grid.size} nodes; norm integrands need at least {need}")


def tilde_h2_seq(T, grid=None):
    """Partial values (int ||sum_{n<=N} T_n e^{int}||^2 dt/2pi)^(1/2) for N = 1..len.

    The tilde-H^2 norm of the truncated sequence is the max of the list.
    """
    T = np.asarray(T, dtype=np.complex128)
    n = T.shape[0]
    grid = grid or Grid.oversampled(n)
    _check_oversampled(grid, n)
    ph = np.exp(1j * np.multiply.outer(grid.nodes, np.arange(1, n + 1)))
    terms = ph[:, :, None, None] * T[None]
    partial = np.cumsum(terms, axis=1)
    norms = spectral_norms(partial)
    return [float(v) for v in np.sqrt(grid.integrate(norms ** 2))]


def tilde_h2_matrix_partial(A, n, m, grid):
    vals = BlockSymbol(A).on_grid(grid, grid, n, m)
    return float(np.sqrt(np.mean(spectral_norms(vals) ** 2)))


def tilde_h2_matrix(A, grid=None, ladder=True):
    """tilde-H^2(T^2) norm at truncation.

    With ``ladder`` (default) the sup runs over every leading rectangle
    [1, n] x [1, m]; otherwise only the full truncation is integrated.
    """
    A = as_opmatrix(A)
    N, M = A.shape[:2]
    grid = grid or Grid.oversampled(max(N, M))
    _check_oversampled(grid, max(N, M))
    if not ladder:
        return tilde_h2_matrix_partial(A, N, M, grid)
    return max(tilde_h2_matrix_partial(A, n, m, grid) for n in range(1, N + 1) for m in range(1, M + 1))


def bilinear_BA(A, x, y, grid=None):
    """B_A(h_x, h_y) = double integral of J A_{N,M}(s,t)(h_x(s) (x) h_y(t)).

    Exact-grid quadrature; equals ``<<A(x), y>>``.
    """
    A = as_opmatrix(A)
    N, M, d, _ = A.shape
    x = as_hseq(x, d)
    y = as_hseq(y, d)
    if x.shape[0] != M or y.shape[0] != N:
        raise DimensionError("sequence lengths must match the matrix shape")
    grid = grid or Grid.exact(N + M + 1)
    sym = BlockSymbol(A).on_grid(grid, grid)          # (s, t, d, d)
    hx = h_poly(x).on_grid(grid)                       # (s, d)
    hy = h_poly(y).on_grid(grid)                       # (t, d)
    vals = np.einsum("stab,sb,ta->st", sym, hx, hy.conj())
    return complex(vals.mean())


class TensorField:
    """t -> element of H (x) H held through its kernel matrix K(t).

    Pairing with an operator W at time t is ``sum(W * K(t))``; the projective
    norm at t is the nuclear norm of K(t).
    """

    def __init__(self, kernel_poly):
        self.poly = kernel_poly

    @classmethod
    def constant(cls, u):
        return cls(TrigPoly(u.kernel()[None], 0))

    @classmethod
    def from_terms(cls, terms):
        """``terms``: iterable of (k, x, y) meaning (x (x) y) e^{ikt}."""
        mapping = {}
        for k, x, y in terms:
            K = np.outer(np.conj(y), x)
            mapping[k] = mapping.get(k, 0) + K
        return cls(TrigPoly.from_dict(mapping))

    def __call__(self, t):
        return self.poly(t)

    def on_grid(self, grid):
        return self.poly.on_grid(grid)

    @property
    def width(self):
        return self.poly.width


def l1_tensor_norm(F, grid=None):
    """int ||F(t)||_{H (x)^ H} dt/2pi, returned with the grid size used."""
    if isinstance(F, TensorField):
        grid = grid or Grid.oversampled(F.width)
        K = F.on_grid(grid)
    else:
        K = np.asarray(F, dtype=np.complex128)
        grid = Grid(K.shape[0])
    return float(grid.integrate(nuclear_norms(K))), grid.size
