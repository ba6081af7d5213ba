"""Operator-valued and H-valued measures on the circle.

Three representations are supported:

* ``DiscreteMeasure``: finitely many atoms ``(t_i, W_i)``.
* ``DensityMeasure``: ``dmu = f dm`` with ``f`` a trigonometric polynomial.
* ``LazyMeasure``: only the coefficient rule ``k -> mu^(k)`` is known.

Values are ``(d, d)`` operators or ``(d,)`` vectors of H. Fourier coefficients
of a measure are ``mu^(k) = int e^{ikt} dmu(t)`` (no conjugation), whereas a
function has ``f^(k) = int f(t) e^{-ikt} dt/2pi``. Hence a density measure
satisfies ``mu^(k) = f^(-k)``.
"""
import json
import math

import numpy as np
from scipy.optimize import minimize_scalar

from .operator_core import DimensionError, spectral_norms
from .torus import OVERSAMPLE, Grid, TrigPoly

TAIL_EPS = 1e-12
VINF_REFINE = 3
DEFAULT_R_LADDER = (0.5, 0.9, 0.99, 0.999)
DEFAULT_SEED = 0xC0FFEE


class NotComputable(ValueError):
    """The requested functional needs set-function values the representation lacks."""


def _value_norms(vals):
    """Operator norms (or vector norms) over a leading batch axis."""
    vals = np.asarray(vals, dtype=np.complex128)
    if vals.ndim >= 3 and vals.shape[-1] == vals.shape[-2]:
        return spectral_norms(vals)
    return np.linalg.norm(vals, axis=-1)


class Measure:
    value_shape = ()

    @property
    def dim(self):
        return self.value_shape[0]

    @property
    def is_operator(self):
        return len(self.value_shape) == 2

    def fourier(self, k):
        raise NotImplementedError

    def fourier_range(self, kmin, kmax):
        """Stack of mu^(k) for k = kmin..kmax."""
        return np.array([self.fourier(k) for k in range(kmin, kmax + 1)])


class DiscreteMeasure(Measure):
    def __init__(self, angles, weights):
        t = np.mod(np.asarray(angles, dtype=float).reshape(-1), 2 * np.pi)
        W = np.asarray(weights, dtype=np.complex128)
        if W.shape[0] != t.shape[0] or W.ndim not in (2, 3):
            raise DimensionError("one weight (vector or square operator) per atom required")
        if W.ndim == 3 and W.shape[1] != W.shape[2]:
            raise DimensionError("operator weights must be square")
        if len(np.unique(t)) != len(t):
            raise ValueError("atoms must sit at distinct angles")
        if not (np.all(np.isfinite(W)) and np.all(np.isfinite(t))):
            raise ValueError("atoms must be finite")
        self.angles = t
        self.weights = W
        self.value_shape = W.shape[1:]

    def fourier(self, k):
        return np.tensordot(np.exp(1j * k * self.angles), self.weights, axes=(0, 0))

    def fourier_range(self, kmin, kmax):
        ks = np.arange(kmin, kmax + 1)
        ph = np.exp(1j * np.multiply.outer(ks, self.angles))
        return np.tensordot(ph, self.weights, axes=(1, 0))

    def __repr__(self):
        return f"DiscreteMeasure(n_atoms={len(self.angles)}, value_shape={self.value_shape})"


class DensityMeasure(Measure):
    """dmu = f dm with ``f = symbol``, a TrigPoly of operators or vectors."""

    def __init__(self, symbol):
        if not isinstance(symbol, TrigPoly):
            symbol = TrigPoly.from_dict(symbol)
        if symbol.coeffs.ndim not in (2, 3):
            raise DimensionError("symbol values must be vectors or square operators")
        self.symbol = symbol
        self.value_shape = symbol.value_shape

    @classmethod
    def from_samples(cls, samples, kmin, kmax):
        """Density whose symbol interpolates ``samples`` on a uniform grid."""
        return cls(TrigPoly.from_samples(samples, kmin, kmax))

    def fourier(self, k):
        return self.symbol.coefficient(-k)

    def fourier_range(self, kmin, kmax):
        return np.array([self.symbol.coefficient(-k) for k in range(kmin, kmax + 1)])

    def density_on(self, grid):
        return self.symbol.on_grid(grid)

    def __repr__(self):
        return f"DensityMeasure(degrees={self.symbol.kmin}..{self.symbol.kmax}, value_shape={self.value_shape})"


class LazyMeasure(Measure):
    """Measure known only through ``rule(k)``, zero outside ``[kmin, kmax]``."""

    def __init__(self, rule, kmin, kmax, value_shape, kind="custom", params=None):
        self.rule = rule
        self.kmin = int(kmin)
        self.kmax = int(kmax)
        self.value_shape = tuple(value_shape)
        self.kind = kind
        self.params = params or {}

    @classmethod
    def spectral(cls, d):
        """T_mu(phi) = sum_{n>=1} phi^(n) e_n~(x)e_n truncated to H = C^d: mu^(k) = e_k~(x)e_k for 1 <= k <= d."""
        def rule(k):
            W = np.zeros((d, d), dtype=np.complex128)
            W[k - 1, k - 1] = 1.0
            return W
        return cls(rule, 1, d, (d, d), kind="spectral", params={"d": d})

    def fourier(self, k):
        if self.kmin <= k <= self.kmax:
            return np.asarray(self.rule(k), dtype=np.complex128)
        return np.zeros(self.value_shape, dtype=np.complex128)

    def __repr__(self):
        return f"LazyMeasure(kind={self.kind!r}, support={self.kmin}..{self.kmax})"


def fourier(mu, k):
    return mu.fourier(int(k))


def function_fourier(f, k):
    """f^(k) = int f(t) e^{-ikt} dt/2pi for a TrigPoly ``f``."""
    return f.coefficient(int(k))


def zero_measure(value_shape):
    return DiscreteMeasure(np.zeros(0), np.zeros((0,) + tuple(value_shape)))


# ------------------------------------------------------------ derived measures

def mu_x(mu, x):
    """The H-valued measure A -> mu(A) x."""
    if not mu.is_operator:
        raise DimensionError("mu_x needs an operator-valued measure")
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (mu.dim,):
        raise DimensionError(f"vector of dim {x.shape} does not match measure dim {mu.dim}")
    if isinstance(mu, DiscreteMeasure):
        return DiscreteMeasure(mu.angles, mu.weights @ x)
    if isinstance(mu, DensityMeasure):
        return DensityMeasure(TrigPoly(mu.symbol.coeffs @ x, mu.symbol.kmin))
    rule = mu.rule
    return LazyMeasure(lambda k: np.asarray(rule(k)) @ x, mu.kmin, mu.kmax, (mu.dim,), kind="mu_x")


def adjoint_measure(mu):
    """mu^*(A) = mu(A)^*; its coefficients are mu^*^(k) = (mu^(-k))^*."""
    if not mu.is_operator:
        raise DimensionError("adjoint measure needs an operator-valued measure")
    if isinstance(mu, DiscreteMeasure):
        return DiscreteMeasure(mu.angles, mu.weights.conj().transpose(0, 2, 1))
    if isinstance(mu, DensityMeasure):
        c = mu.symbol.coeffs.conj().transpose(0, 2, 1)[::-1]
        return DensityMeasure(TrigPoly(c, -mu.symbol.kmax))
    rule = mu.rule
    return LazyMeasure(lambda k: np.conj(np.asarray(rule(-k))).T, -mu.kmax, -mu.kmin, mu.value_shape, kind="adjoint")


def atomize(mu, grid=None):
    """Discrete stand-in for a density: atoms f(t_g)/G at the grid nodes."""
    if isinstance(mu, DiscreteMeasure):
        return mu
    if isinstance(mu, DensityMeasure):
        grid = grid or Grid.oversampled(mu.symbol.width)
        return DiscreteMeasure(grid.nodes, mu.density_on(grid) * grid.weight)
    raise NotComputable("lazy measures cannot be atomized")


# ---------------------------------------------------------- size functionals

def variation(mu, grid=None):
    """|mu|(T). Exact for atoms, oversampled quadrature of ||f|| for densities."""
    if isinstance(mu, DiscreteMeasure):
        if len(mu.angles) == 0:
            return 0.0
        return float(np.sum(_value_norms(mu.weights)))
    if isinstance(mu, DensityMeasure):
        grid = grid or Grid.oversampled(mu.symbol.width)
        return float(grid.integrate(_value_norms(mu.density_on(grid))))
    raise NotComputable("variation of a lazy measure is not available; use poisson_variation")


def _top_pair(S):
    u, s, vh = np.linalg.svd(S, full_matrices=False)
    return u[:, 0], s[0], vh[0].conj()


def _phase_ascent(W, eps, maxiter=1000, tol=1e-14):
    val = -1.0
    for _ in range(maxiter):
        S = np.tensordot(eps, W, axes=(0, 0))
        u, s, v = _top_pair(S)
        if s - val <= tol * max(s, 1e-300):
            return max(val, s)
        val = s
        c = np.einsum("a,iab,b->i", u.conj(), W, v)
        mag = np.abs(c)
        eps = np.where(mag > 0, np.conj(c) / np.where(mag > 0, mag, 1.0), eps)
    return val


def semivariation_lb(mu, budget=16, seed=DEFAULT_SEED, grid=None):
    """Lower bound for ||mu||(T) = sup over unimodular eps of ||sum eps_i W_i||.

    Phase patterns: all ones, then ``budget`` seeded random ones; each is
    refined by coordinate ascent on the top singular pair.
    """
    mu = atomize(mu, grid)
    n = len(mu.angles)
    if n == 0:
        return 0.0
    W = mu.weights if mu.is_operator else mu.weights[:, :, None]
    best = _phase_ascent(W, np.ones(n, dtype=np.complex128))
    rng = np.random.default_rng(seed)
    for _ in range(budget):
        eps = np.exp(2j * np.pi * rng.random(n))
        best = max(best, _phase_ascent(W, eps))
    return float(best)


def vinf_norm(mu, grid=None):
    """||mu||_inf = sup ||mu(A)|| / m(A).

    Density: max of ||f|| on an oversampled grid, then polished by a bounded
    scalar search around the ``VINF_REFINE`` best nodes. Discrete with a nonzero atom:
    ``inf``. Lazy: the lower bound sup_k ||mu^(k)|| over the support.
    """
    if isinstance(mu, DensityMeasure):
        grid = grid or Grid.oversampled(mu.symbol.width)
        vals = _value_norms(mu.density_on(grid))
        h = 2 * np.pi / grid.size
        f = mu.symbol
        best = float(np.max(vals))
        for g in np.argsort(vals)[::-1][:VINF_REFINE]:
            t0 = grid.nodes[g]
            res = minimize_scalar(lambda t: -float(_value_norms(f(np.array([t])))[0]),
                                  bounds=(t0 - h, t0 + h), method="bounded", options={"xatol": 1e-12})
            best = max(best, -float(res.fun))
        return best
    if isinstance(mu, DiscreteMeasure):
        if len(mu.angles) and np.any(mu.weights != 0):
            return math.inf
        return 0.0
    return float(np.max(_value_norms(mu.fourier_range(mu.kmin, mu.kmax))))


def _sot_ascent(W, x, maxiter=20000, tol=1e-15):
    val = -1.0
    for _ in range(maxiter):
        Wx = W @ x
        nrm = np.linalg.norm(Wx, axis=1)
        new = float(nrm.sum())
        if new - val <= tol * max(new, 1e-300):
            return max(val, new)
        val = new
        live = nrm > 0
        g = np.einsum("iba,ib->a", W[live].conj(), Wx[live] / nrm[live, None])
        gn = np.linalg.norm(g)
        if gn == 0:
            return val
        x = g / gn
    return val


def sot_norm_estimate(mu, budget=16, seed=DEFAULT_SEED, grid=None):
    """Lower bound for ||mu||_SOT = sup_{|x|=1} |mu_x|.

    Maximises the convex map x -> sum_i ||W_i x|| over the sphere with the
    normalised-gradient ascent (monotone), from the all-ones vector, the
    basis vectors and ``budget`` seeded random starts.
    """
    if isinstance(mu, LazyMeasure):
        raise NotComputable("use msot_membership for coefficient-defined measures")
    if not mu.is_operator:
        raise DimensionError("SOT norm needs an operator-valued measure")
    mu = atomize(mu, grid)
    if len(mu.angles) == 0:
        return 0.0
    W = mu.weights
    d = mu.dim
    starts = [np.ones(d, dtype=np.complex128) / np.sqrt(d)] + list(np.eye(d, dtype=np.complex128))
    rng = np.random.default_rng(seed)
    for _ in range(budget):
        x = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        starts.append(x / np.linalg.norm(x))
    return float(max(_sot_ascent(W, x) for x in starts))


# ------------------------------------------------------------------ pairings

def integrate_poly(mu, psi):
    """T_mu(psi) = sum_k psi^(k) mu^(k) for a scalar TrigPoly ``psi``."""
    coeffs = mu.fourier_range(psi.kmin, psi.kmax)
    return np.tensordot(psi.coeffs, coeffs, axes=(0, 0))


def psi_pair(mu, G):
    """Psi_mu(G) = sum_k J mu^(k)(G_k) for a tensor polynomial.

    ``G`` is a ``TensorField`` or a TrigPoly of kernel matrices (see
    ``operator_core.TensorElement.kernel``).
    """
    poly = getattr(G, "poly", G)
    coeffs = mu.fourier_range(poly.kmin, poly.kmax)
    return complex(np.sum(coeffs * poly.coeffs))


def phi_apply(mu, g):
    """Phi_mu(sum_k x_k phi_k) = sum_k mu^(k)(x_k)."""
    coeffs = mu.fourier_range(g.kmin, g.kmax)
    return np.einsum("kab,kb->a", coeffs, g.coeffs)


# ------------------------------------------------------------------- Poisson

def poisson_cutoff(r, eps=TAIL_EPS):
    """K(r) = ceil(ln eps / ln r)."""
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    return int(math.ceil(math.log(eps) / math.log(r)))


def _poisson_range(mu, r):
    K = poisson_cutoff(r)
    if isinstance(mu, LazyMeasure):
        lo, hi = max(mu.kmin, -K), min(mu.kmax, K)
        if lo > hi:
            lo = hi = 0
        return lo, hi
    if isinstance(mu, DensityMeasure):
        return max(-mu.symbol.kmax, -K), min(-mu.symbol.kmin, K)
    return -K, K


def poisson_poly(mu, r):
    """P_r * mu = sum_k mu^(k) r^|k| e^{ikt} as a TrigPoly (series cut at K(r))."""
    lo, hi = _poisson_range(mu, r)
    ks = np.arange(lo, hi + 1)
    coeffs = mu.fourier_range(lo, hi)
    damp = r ** np.abs(ks)
    return TrigPoly(coeffs * damp.reshape((-1,) + (1,) * len(mu.value_shape)), lo)


def poisson_mean(mu, r, t):
    return poisson_poly(mu, r)(t)


def poisson_grid(r):
    return Grid(OVERSAMPLE * poisson_cutoff(r))


def poisson_l1(mu, r, grid=None):
    """int ||P_r * mu(t)|| dt/2pi on the grid (default 8 K(r) nodes)."""
    p = poisson_poly(mu, r)
    grid = grid or poisson_grid(r)
    if grid.size < p.width:
        grid = Grid.oversampled(p.width)
    return float(grid.integrate(_value_norms(p.on_grid(grid))))


def poisson_sup(mu, r, grid=None):
    """max_t ||P_r * mu(t)|| over the grid nodes."""
    p = poisson_poly(mu, r)
    grid = grid or poisson_grid(r)
    if grid.size < p.width:
        grid = Grid.oversampled(p.width)
    return float(np.max(_value_norms(p.on_grid(grid))))


def poisson_ladder(mu, r_ladder=DEFAULT_R_LADDER):
    """``{r: (L1 value, grid size)}`` over the ladder."""
    out = {}
    for r in r_ladder:
        g = poisson_grid(r)
        out[r] = (poisson_l1(mu, r, g), g.size)
    return out


def poisson_variation(mu, r_ladder=DEFAULT_R_LADDER):
    """sup over the ladder of ||P_r * mu||_{L^1}; approximates |mu| from below."""
    return max(v for v, _ in poisson_ladder(mu, r_ladder).values())


# ---------------------------------------------------------------------- JSON

def _enc(a):
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [_enc(b) for b in a]


def _dec(obj):
    def walk(o):
        if len(o) == 2 and all(isinstance(v, (int, float)) for v in o):
            return complex(o[0], o[1])
        return [walk(v) for v in o]
    return np.array(walk(obj), dtype=np.complex128)


def measure_to_dict(mu):
    if isinstance(mu, DiscreteMeasure):
        return {"type": "discrete", "d": mu.dim,
                "atoms": [{"t": float(t), "W": _enc(W)} for t, W in zip(mu.angles, mu.weights)]}
    if isinstance(mu, DensityMeasure):
        return {"type": "density", "coeffs": {str(k): _enc(c) for k, c in mu.symbol.as_dict().items()}}
    if mu.kind == "spectral":
        return {"type": "lazy", "kind": "spectral", "d": mu.params["d"]}
    raise ValueError(f"lazy measure of kind {mu.kind!r} has no serial form")


def measure_from_dict(obj):
    kind = obj.get("type")
    if kind == "discrete":
        atoms = obj["atoms"]
        if not atoms:
            d = int(obj["d"])
            return zero_measure((d, d))
        return DiscreteMeasure([a["t"] for a in atoms], np.array([_dec(a["W"]) for a in atoms]))
    if kind == "density":
        return DensityMeasure(TrigPoly.from_dict({int(k): _dec(v) for k, v in obj["coeffs"].items()}))
    if kind == "lazy" and obj.get("kind") == "spectral":
        return LazyMeasure.spectral(int(obj["d"]))
    raise ValueError(f"unknown measure literal: type={kind!r}")


def dumps_measure(mu):
    return json.dumps(measure_to_dict(mu))


def loads_measure(text):
    return measure_from_dict(json.loads(text))

