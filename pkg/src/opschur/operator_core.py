"""Dense operators on H = C^d.

Operators are ``(d, d)`` complex128 arrays and vectors of H are ``(d,)``
complex128 arrays; entries are indexed ``[row, col]`` from 0. The inner
product is linear in the first slot and conjugate-linear in the second,
``inner(x, y) = sum_i x_i * conj(y_i)``.
"""
from dataclasses import dataclass, field

import numpy as np

from . import _kernels


class DimensionError(ValueError):
    """Operands live on Hilbert spaces of different dimension."""


def as_operator(a, d=None):
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DimensionError(f"operator must be a nonempty square matrix, got shape {a.shape}")
    if d is not None and a.shape[0] != d:
        raise DimensionError(f"expected dim {d}, got {a.shape[0]}")
    if not np.all(np.isfinite(a)):
        raise ValueError("operator entries must be finite")
    return a


def as_hvector(x, d=None):
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1 or x.shape[0] == 0:
        raise DimensionError(f"vector must be one-dimensional and nonempty, got shape {x.shape}")
    if d is not None and x.shape[0] != d:
        raise DimensionError(f"expected dim {d}, got {x.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise ValueError("vector entries must be finite")
    return x


def _same_dim(*arrays):
    dims = {a.shape[0] for a in arrays}
    if len(dims) != 1:
        raise DimensionError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def basis_vector(d, i):
    """The ``i``-th (0-based) standard basis vector of C^d."""
    e = np.zeros(d, dtype=np.complex128)
    e[i] = 1.0
    return e


def identity(d):
    return np.eye(d, dtype=np.complex128)


def inner(x, y):
    x, y = as_hvector(x), as_hvector(y)
    _same_dim(x, y)
    return complex(np.vdot(y, x))


def hnorm(x):
    return float(np.linalg.norm(as_hvector(x)))


def apply(T, x):
    T, x = as_operator(T), as_hvector(x)
    _same_dim(T, x)
    return T @ x


def rank_one(x, y):
    """The operator ``z -> <z, x> y``."""
    x, y = as_hvector(x), as_hvector(y)
    _same_dim(x, y)
    return np.outer(y, x.conj())


def compose(T, S):
    T, S = as_operator(T), as_operator(S)
    _same_dim(T, S)
    return T @ S


def adjoint(T):
    return as_operator(T).conj().T


def pairing_J(T, x, y):
    """The duality ``<T x, y>`` between B(H) and the projective tensor x (x) y."""
    T, x, y = as_operator(T), as_hvector(x), as_hvector(y)
    _same_dim(T, x, y)
    return complex(np.vdot(y, T @ x))


def spectral_norm(T):
    """Largest singular value by power iteration on T^H T (see ``_kernels``)."""
    T = np.asarray(T, dtype=np.complex128)
    if T.ndim != 2:
        raise DimensionError("spectral_norm expects a matrix")
    if not np.all(np.isfinite(T)):
        raise ValueError("matrix entries must be finite")
    if T.size == 0:
        return 0.0
    return float(_kernels.spectral_norms(T[None])[0])


def spectral_norms(stack):
    """Vectorised ``spectral_norm`` over a leading batch axis (any number of them)."""
    stack = np.asarray(stack, dtype=np.complex128)
    lead = stack.shape[:-2]
    flat = stack.reshape((-1,) + stack.shape[-2:])
    return _kernels.spectral_norms(flat).reshape(lead)


def singular_values(T):
    """All singular values, descending, from the one-sided Jacobi kernel."""
    T = np.asarray(T, dtype=np.complex128)
    return _kernels.jacobi_singular_values(T[None])[0]


def nuclear_norms(stack):
    stack = np.asarray(stack, dtype=np.complex128)
    lead = stack.shape[:-2]
    flat = stack.reshape((-1,) + stack.shape[-2:])
    if flat.shape[0] == 0:
        return np.zeros(lead)
    return _kernels.jacobi_singular_values(flat).sum(axis=1).reshape(lead)


@dataclass(frozen=True)
class TensorElement:
    """Finite sum ``sum_i c_i x_i (x) y_i`` in H (x) H.

    Scalars pass linearly through either tensor slot, matching the pairing
    ``J T (x (x) y) = <T x, y>``. ``coeffs`` defaults to all ones.
    """

    xs: np.ndarray
    ys: np.ndarray
    coeffs: np.ndarray = field(default=None)

    def __post_init__(self):
        xs = np.atleast_2d(np.asarray(self.xs, dtype=np.complex128))
        ys = np.atleast_2d(np.asarray(self.ys, dtype=np.complex128))
        if xs.shape != ys.shape:
            raise DimensionError(f"term shapes differ: {xs.shape} vs {ys.shape}")
        c = np.ones(xs.shape[0], dtype=np.complex128) if self.coeffs is None else np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != (xs.shape[0],):
            raise DimensionError("one coefficient per term required")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_terms(cls, terms, d=None):
        terms = list(terms)
        if not terms:
            if d is None:
                raise ValueError("empty tensor needs an explicit dim")
            return cls(np.zeros((0, d)), np.zeros((0, d)), np.zeros(0))
        xs = [as_hvector(x) for x, _ in terms]
        ys = [as_hvector(y) for _, y in terms]
        _same_dim(*xs, *ys)
        return cls(np.array(xs), np.array(ys))

    @property
    def dim(self):
        return self.xs.shape[1]

    def kernel(self):
        """Matrix K with ``pair(T) = sum(T * K)``, i.e. K[a, b] = sum_i c_i conj(y_i[a]) x_i[b]."""
        return np.einsum("i,ia,ib->ab", self.coeffs, self.ys.conj(), self.xs)

    def pair(self, T):
        T = as_operator(T, self.dim)
        return complex(np.sum(T * self.kernel()))

    def projective_bound(self):
        """Triangle-inequality bound ``sum |c_i| |x_i| |y_i|``."""
        return float(np.sum(np.abs(self.coeffs) * np.linalg.norm(self.xs, axis=1) * np.linalg.norm(self.ys, axis=1)))


def trace_norm(u):
    """Projective norm of a ``TensorElement`` (nuclear norm of its kernel)."""
    if u.xs.shape[0] == 0:
        return 0.0
    return float(nuclear_norms(u.kernel()[None])[0])
