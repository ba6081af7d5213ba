"""Named examples with closed-form values, each checked by a report.

Every example returns a ``GalleryReport``: a set of metrics, each with the
computed value, the expected value, where the expected value comes from
(``closed_form`` or ``computed``) and a tolerance.
"""
import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import block_matrix as bm
from .measures import (
    DiscreteMeasure,
    LazyMeasure,
    mu_x,
    semivariation_lb,
    sot_norm_estimate,
    variation,
    vinf_norm,
)
from .operator_core import rank_one, spectral_norm, spectral_norms
from .torus import Grid, tilde_h2_seq

DEFAULT_SEED = 0xC0FFEE
EXACT_TOL = 1e-9
QUAD_TOL = 1e-6


@dataclass
class Metric:
    computed: float
    expected: float
    tol: float
    source: str = "closed_form"
    relative: bool = False

    @property
    def error(self):
        err = abs(self.computed - self.expected)
        return err / abs(self.expected) if self.relative else err

    @property
    def passed(self):
        return bool(self.error <= self.tol)


@dataclass
class GalleryReport:
    name: str
    params: dict
    metrics: dict = field(default_factory=dict)
    artifacts: dict = field(default_factory=dict)

    def add(self, metric, computed, expected, tol=EXACT_TOL, source="closed_form", relative=False):
        self.metrics[metric] = Metric(float(computed), float(expected), tol, source, relative)

    @property
    def computed(self):
        return {k: m.computed for k, m in self.metrics.items()}

    @property
    def expected(self):
        return {k: (m.expected, m.source) for k, m in self.metrics.items()}

    @property
    def passed(self):
        return all(m.passed for m in self.metrics.values())

    def rows(self):
        return [
            {"name": self.name, "metric": k, "computed": m.computed, "expected": m.expected,
             "tol": m.tol, "pass": m.passed}
            for k, m in self.metrics.items()
        ]

    def to_dict(self):
        return {
            "name": self.name,
            "params": self.params,
            "metrics": {
                k: {"computed": m.computed, "expected": m.expected, "source": m.source,
                    "tol": m.tol, "relative": m.relative, "pass": m.passed}
                for k, m in self.metrics.items()
            },
            "pass": self.passed,
        }


def fmt(v):
    """17 significant digits, so equal floats always print equal."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def reports_to_csv(reports):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "metric", "computed", "expected", "tol", "pass"])
    for r in reports:
        for row in r.rows():
            w.writerow([fmt(row[c]) for c in ("name", "metric", "computed", "expected", "tol", "pass")])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else str(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def reports_to_json(reports):
    return json.dumps([_jsonable(r.to_dict()) for r in reports], indent=2, sort_keys=True) + "\n"


# ------------------------------------------------------------------ examples

def diag_rank_one(d=8, seed=DEFAULT_SEED):
    """T_j = projection onto e_j, j = 1..d."""
    eye = np.eye(d, dtype=np.complex128)
    T = np.array([rank_one(eye[j], eye[j]) for j in range(d)])
    rep = GalleryReport("diag_rank_one", {"d": d, "N": d, "grid": 8 * d, "seed": seed})
    partial = tilde_h2_seq(T)
    norms = spectral_norms(T)
    rep.add("tilde_h2_partial_min", min(partial), 1.0, QUAD_TOL)
    rep.add("tilde_h2_partial_max", max(partial), 1.0, QUAD_TOL)
    rep.add("block_norm_min", norms.min(), 1.0)
    rep.add("block_norm_max", norms.max(), 1.0)
    rep.add("sot_norm", bm.sot_norm_seq(T), 1.0)
    rep.add("l2_norm", bm.l2_norm_seq(T), math.sqrt(d))
    return rep


def row_rank_one_matrix(N=8, d=None, seed=DEFAULT_SEED):
    """(T_n) with T_n = z -> <z, e_n> x as a 1 x N operator matrix, plus x."""
    d = N if d is None else d
    if d < N:
        raise ValueError("row_rank_one needs d >= N")
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    eye = np.eye(d, dtype=np.complex128)
    T = np.array([rank_one(eye[n], x) for n in range(N)])
    return T, x


def row_rank_one(N=8, d=None, seed=DEFAULT_SEED):
    T, x = row_rank_one_matrix(N, d, seed)
    d = T.shape[1]
    nx = float(np.linalg.norm(x))
    rep = GalleryReport("row_rank_one", {"d": d, "N": N, "grid": 8 * N, "seed": seed})
    partial = tilde_h2_seq(T)
    rep.add("sot_norm", bm.sot_norm_seq(T), nx)
    for n in (1, N // 2, N):
        if n >= 1:
            rep.add(f"tilde_h2_partial_{n}", partial[n - 1], nx * math.sqrt(n), QUAD_TOL)
    rep.artifacts["matrix"] = T[None]
    return rep


def harmonic_operators(d, N):
    """T_j = (multiplication by e^{ijs}) / j on Fourier modes -d..d, j = 1..N."""
    n = 2 * d + 1
    return np.array([np.eye(n, k=-j, dtype=np.complex128) / j for j in range(1, N + 1)])


def harmonic_multiplication(d=256, N=8, n_t=4, seed=DEFAULT_SEED):
    T = harmonic_operators(d, N)
    target = sum(1.0 / j for j in range(1, N + 1))
    rep = GalleryReport("harmonic_multiplication", {"d": d, "N": N, "grid": n_t, "seed": seed})
    norms = spectral_norms(T)
    rep.add("block_norm_max_dev", np.max(np.abs(norms - 1.0 / np.arange(1, N + 1))), 0.0)
    ts = Grid(n_t).nodes
    j = np.arange(1, N + 1)
    sup = max(spectral_norm(np.tensordot(np.exp(1j * j * t), T, axes=(0, 0))) for t in ts)
    rep.add("sup_partial_sum", sup, target, 0.02, relative=True)
    rep.add("sup_below_limit", float(sup <= target + 1e-12), 1.0, 0.0)
    return rep


def mu1_mu2_measures(d=4, m=6, seed=DEFAULT_SEED):
    """H-valued nu with m atoms, and mu1 = <., nu> y0, mu2 = <., y0> nu."""
    rng = np.random.default_rng(seed)
    w = rng.standard_normal((m, d)) + 1j * rng.standard_normal((m, d))
    angles = 2 * np.pi * (np.arange(m) + 0.5 * rng.random(m)) / m
    y0 = np.zeros(d, dtype=np.complex128)
    y0[0] = 1.0
    nu = DiscreteMeasure(angles, w)
    mu1 = DiscreteMeasure(angles, np.array([rank_one(wi, y0) for wi in w]))
    mu2 = DiscreteMeasure(angles, np.array([rank_one(y0, wi) for wi in w]))
    return nu, mu1, mu2, y0


def mu1_mu2(d=4, m=6, seed=DEFAULT_SEED):
    nu, mu1, mu2, y0 = mu1_mu2_measures(d, m, seed)
    rep = GalleryReport("mu1_mu2", {"d": d, "N": m, "grid": 0, "seed": seed})
    var_nu = variation(nu)
    semi_nu = semivariation_lb(nu, budget=32, seed=seed)
    rep.add("mu1_sot_vs_semivariation", sot_norm_estimate(mu1, budget=32, seed=seed), semi_nu, QUAD_TOL, relative=True)
    rep.add("mu1_variation", variation(mu1), var_nu)
    rep.add("mu2_sot", sot_norm_estimate(mu2, budget=32, seed=seed), var_nu, QUAD_TOL, relative=True)
    rng = np.random.default_rng(seed + 1)
    x = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    x /= np.linalg.norm(x)
    rep.add("mu2_x_variation", variation(mu_x(mu2, x)), abs(np.vdot(y0, x)) * var_nu)
    rep.add("semivariation_le_variation", float(semi_nu <= var_nu + 1e-12), 1.0, 0.0, source="computed")
    return rep


def no_rn_measure(d=16, seed=DEFAULT_SEED):
    mu = LazyMeasure.spectral(d)
    rep = GalleryReport("no_rn_measure", {"d": d, "N": d, "grid": 0, "seed": seed})
    norms = spectral_norms(mu.fourier_range(1, d))
    rep.add("coeff_norm_min", norms.min(), 1.0, 1e-12)
    rep.add("coeff_norm_max", norms.max(), 1.0, 1e-12)
    outside = spectral_norms(mu.fourier_range(-d, 0))
    rep.add("coeff_norm_outside", outside.max(), 0.0, 1e-12)
    rep.add("vinf_lower_bound", vinf_norm(mu), 1.0, 1e-12)
    return rep


def inclusion_chain(dims=(2, 4, 8), seed=DEFAULT_SEED):
    """Atoms e_i~ (x) e_i at m = d distinct points: semivariation 1, SOT sqrt(m), variation m."""
    rep = GalleryReport("inclusion_chain", {"d": max(dims), "N": len(dims), "grid": 0, "seed": seed})
    for d in dims:
        eye = np.eye(d, dtype=np.complex128)
        mu = DiscreteMeasure(2 * np.pi * np.arange(d) / d, np.array([rank_one(e, e) for e in eye]))
        semi = semivariation_lb(mu, budget=8, seed=seed)
        sot = sot_norm_estimate(mu, budget=8, seed=seed)
        var = variation(mu)
        rep.add(f"semivariation_d{d}", semi, 1.0)
        rep.add(f"sot_norm_d{d}", sot, math.sqrt(d), QUAD_TOL)
        rep.add(f"variation_d{d}", var, float(d))
        rep.add(f"variation_over_semivariation_d{d}", var / semi, float(d), QUAD_TOL, source="computed")
    return rep


REGISTRY = {
    "diag_rank_one": diag_rank_one,
    "row_rank_one": row_rank_one,
    "harmonic_multiplication": harmonic_multiplication,
    "mu1_mu2": mu1_mu2,
    "no_rn_measure": no_rn_measure,
    "inclusion_chain": inclusion_chain,
}


def run_example(name, seed=DEFAULT_SEED, **params):
    if name not in REGISTRY:
        raise KeyError(f"unknown example {name!r}; known: {', '.join(REGISTRY)}")
    return REGISTRY[name](seed=seed, **params)


def run_all(seed=DEFAULT_SEED, names=None):
    return [run_example(n, seed=seed) for n in (names or REGISTRY)]
