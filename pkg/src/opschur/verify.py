"""The acceptance battery: numbered property checks with fixed seeds.

Each check returns a ``CheckResult``; ``detail`` holds only numbers and
counts (never timings) so that reports are reproducible byte for byte.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from . import block_matrix as bm
from . import gallery
from .measures import (
    DensityMeasure,
    DiscreteMeasure,
    LazyMeasure,
    poisson_variation,
    variation,
    vinf_norm,
)
from .operator_core import TensorElement, trace_norm
from ._kernels import jacobi_singular_values, spectral_norms
from .toeplitz import (
    ToeplitzSpec,
    build_F,
    build_toeplitz,
    direct_schur_pairing,
    msot_ladder,
    mult2_rhs,
    schur_action_rhs,
    toeplitz_norm_ladder,
)
from .torus import TrigPoly, bilinear_BA, l1_tensor_norm

DEFAULT_SEED = 0xC0FFEE
SLACK = 1e-8


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)


def _cgauss(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_discrete(rng, d, max_atoms=4):
    """Atoms at jittered, well separated angles with Gaussian weights."""
    n = int(rng.integers(1, max_atoms + 1))
    angles = 2 * np.pi * (np.arange(n) + 0.5 * rng.random(n)) / n + 2 * np.pi * rng.random()
    return DiscreteMeasure(angles, _cgauss(rng, n, d, d))


def check_submultiplicative(seed, count=200):
    rng = np.random.default_rng(seed)
    worst, bad = -math.inf, 0
    for i in range(count):
        d = (1, 2, 3)[i % 3]
        N = (2, 4, 8)[(i // 3) % 3]
        A, B = _cgauss(rng, N, N, d, d), _cgauss(rng, N, N, d, d)
        bound = bm.opnorm(A) * bm.opnorm(B)
        gap = bm.opnorm(bm.schur_product(A, B)) - bound
        worst = max(worst, gap / bound)
        bad += gap > SLACK * max(1.0, bound)
    return CheckResult(1, "schur_submultiplicative", bad == 0, {"instances": count, "violations": bad, "max_rel_gap": worst})


def check_double_sum(seed, count=200):
    rng = np.random.default_rng(seed + 1)
    worst, bad = -math.inf, 0
    for i in range(count):
        d = (1, 2, 3)[i % 3]
        N, M = int(rng.integers(1, 9)), int(rng.integers(1, 9))
        A, x = _cgauss(rng, N, M, d, d), _cgauss(rng, M, d)
        lhs = float(np.sum(np.abs(np.einsum("kjab,jb->kja", A, x)) ** 2))
        rhs = bm.opnorm(A) ** 2 * float(np.sum(np.abs(x) ** 2))
        worst = max(worst, (lhs - rhs) / rhs)
        bad += lhs - rhs > SLACK * max(1.0, rhs)
    return CheckResult(2, "double_sum_bound", bad == 0, {"instances": count, "violations": bad, "max_rel_gap": worst})


def check_projections(seed, count=100):
    rng = np.random.default_rng(seed + 2)
    worst = 0.0
    for _ in range(count):
        d = int(rng.integers(1, 4))
        N, M = int(rng.integers(1, 7)), int(rng.integers(1, 7))
        A = _cgauss(rng, N, M, d, d)
        k, j = int(rng.integers(1, N + 1)), int(rng.integers(1, M + 1))
        row_formula = bm.sot_norm_seq(A[k - 1].conj().transpose(0, 2, 1))
        col_formula = bm.sot_norm_seq(A[:, j - 1])
        errs = [
            abs(bm.opnorm(bm.project(A, bm.Row(k))) - row_formula),
            abs(bm.opnorm(bm.project(A, bm.Col(j))) - col_formula),
        ]
        for l, sup in bm.diagonal_sups(A).items():
            errs.append(abs(bm.opnorm(bm.project(A, bm.Diagonal(l))) - sup))
        worst = max(worst, max(errs))
    return CheckResult(3, "projection_norms", worst <= 1e-9, {"instances": count, "max_abs_err": worst})


def check_bilinear(seed, count=100):
    rng = np.random.default_rng(seed + 3)
    worst = 0.0
    for _ in range(count):
        A, x, y = _cgauss(rng, 4, 4, 2, 2), _cgauss(rng, 4, 2), _cgauss(rng, 4, 2)
        worst = max(worst, abs(bilinear_BA(A, x, y) - bm.seq_inner(bm.apply(A, x), y)))
    return CheckResult(4, "bilinear_identity", worst <= 1e-9, {"instances": count, "max_abs_err": worst})


def check_gallery(seed):
    names = ("diag_rank_one", "row_rank_one", "harmonic_multiplication", "no_rn_measure")
    reports = [gallery.run_example(n, seed=seed) for n in names]
    detail = {}
    for r in reports:
        for m, met in r.metrics.items():
            detail[f"{r.name}.{m}"] = met.computed
    failed = [f"{r.name}.{m}" for r in reports for m, met in r.metrics.items() if not met.passed]
    detail["failed_metrics"] = len(failed)
    return CheckResult(5, "gallery_closed_forms", not failed, detail)


def check_poisson(seed, count=20, r=0.999):
    rng = np.random.default_rng(seed + 5)
    worst = 0.0
    for _ in range(count):
        mu = random_discrete(rng, int(rng.integers(1, 4)))
        exact = variation(mu)
        worst = max(worst, abs(poisson_variation(mu, (r,)) - exact) / exact)
    return CheckResult(6, "poisson_variation", worst <= 0.01, {"instances": count, "r": r, "max_rel_err": worst})


def check_toeplitz(seed):
    ladder = (1, 2, 4, 8, 16, 32, 64)
    one = np.ones((1, 1))
    cos2 = DensityMeasure(TrigPoly.from_dict({-1: one, 1: one}))
    vals = toeplitz_norm_ladder(cos2, ladder)
    closed = [2 * math.cos(math.pi / (n + 1)) for n in ladder]
    closed_err = max(abs(a - b) for a, b in zip(vals, closed))
    symbols = [cos2]
    rng = np.random.default_rng(seed + 6)
    for d in (1, 2, 3):
        symbols.append(DensityMeasure(TrigPoly(_cgauss(rng, 5, d, d), -2)))
    monotone, below = True, True
    for mu in symbols:
        v = toeplitz_norm_ladder(mu, ladder)
        monotone &= all(b >= a - 1e-12 for a, b in zip(v, v[1:]))
        below &= max(v) <= vinf_norm(mu) + SLACK
    ok = monotone and below and closed_err <= 1e-9 and vals[-1] >= 0.95 * 2.0
    return CheckResult(7, "toeplitz_ladder", bool(ok), {
        "monotone": monotone, "below_vinf": below, "closed_form_max_err": closed_err, "ladder_at_64": vals[-1]})


def check_action_identities(seed, count=50):
    rng = np.random.default_rng(seed + 7)
    worst1 = worst2 = 0.0
    for _ in range(count):
        d, N = int(rng.integers(1, 4)), int(rng.integers(1, 7))
        mu, nu = random_discrete(rng, d), random_discrete(rng, d)
        B, x, y = _cgauss(rng, N, N, d, d), _cgauss(rng, N, d), _cgauss(rng, N, d)
        A = build_toeplitz(mu, N)
        worst1 = max(worst1, abs(schur_action_rhs(mu, B, x, y) - direct_schur_pairing(A, B, x, y)))
        worst2 = max(worst2, abs(mult2_rhs(mu, nu, x, y) - direct_schur_pairing(A, build_toeplitz(nu, N), x, y)))
    ok = worst1 <= 1e-9 and worst2 <= 1e-9
    return CheckResult(8, "multiplier_action_identities", ok, {"instances": count, "max_err_single": worst1, "max_err_pair": worst2})


def check_multiplier_bound(seed, count=20, probes=100):
    rng = np.random.default_rng(seed + 8)
    bad = tensor_bad = 0
    worst = tensor_worst = -math.inf
    for _ in range(count):
        d, N = int(rng.integers(1, 4)), int(rng.integers(2, 7))
        mu = random_discrete(rng, d)
        var = variation(mu)
        A = build_toeplitz(mu, N)
        for _ in range(probes):
            B = _cgauss(rng, N, N, d, d)
            nb = bm.opnorm(B)
            for C in (bm.schur_product(A, B), bm.schur_product(B, A)):
                gap = bm.opnorm(C) - var * nb
                worst = max(worst, gap / (var * nb))
                bad += gap > SLACK * max(1.0, var * nb)
        x, y = _cgauss(rng, N, d), _cgauss(rng, N, d)
        bound = var * bm.seq_norm(x) * bm.seq_norm(y)
        val, _ = l1_tensor_norm(build_F(ToeplitzSpec(mu, N), x, y))
        tensor_worst = max(tensor_worst, (val - bound) / bound)
        tensor_bad += val > bound + 1e-6
    ok = bad == 0 and tensor_bad == 0
    return CheckResult(9, "multiplier_upper_bound", ok, {
        "measures": count, "probes": probes, "violations": bad, "max_rel_gap": worst,
        "tensor_violations": tensor_bad, "tensor_max_rel_gap": tensor_worst})


def check_msot(seed, d=8):
    rng = np.random.default_rng(seed + 9)
    x = _cgauss(rng, d)
    x /= np.linalg.norm(x)
    mu = LazyMeasure.spectral(d)
    ladder = msot_ladder(mu, x)
    k = np.arange(1, d + 1)
    err = max(abs(v - math.sqrt(float(np.sum(np.abs(x) ** 2 * r ** (2 * k))))) for r, v in ladder.items())
    rmax = max(ladder)
    top = ladder[rmax]
    vals = [ladder[r] for r in sorted(ladder)]
    increasing = all(b >= a for a, b in zip(vals, vals[1:]))
    near = abs(top - 1.0) <= 1.0 - rmax ** d + 1e-9
    ok = err <= 1e-6 and increasing and near
    return CheckResult(10, "msot_surrogate", bool(ok), {"max_abs_err": err, "sup_value": top, "increasing": increasing})


def haar_unitaries(rng, n, d):
    Z = _cgauss(rng, n, d, d) / math.sqrt(2)
    Q, R = np.linalg.qr(Z)
    ph = np.diagonal(R, axis1=1, axis2=2)
    return Q * (ph / np.abs(ph))[:, None, :]


def check_oracles(seed, count=1000, tensors=100, samples=10_000):
    rng = np.random.default_rng(seed + 10)
    worst = 0.0
    for _ in range(count):
        m, n = int(rng.integers(1, 9)), int(rng.integers(1, 9))
        T = _cgauss(rng, m, n)
        ref = jacobi_singular_values(T[None])[0][0]
        worst = max(worst, abs(spectral_norms(T[None])[0] - ref) / ref)
    d = 2
    gap_worst, above = 0.0, 0
    for _ in range(tensors):
        r = int(rng.integers(1, 5))
        u = TensorElement(_cgauss(rng, r, d), _cgauss(rng, r, d))
        tn = trace_norm(u)
        U = haar_unitaries(rng, samples, d)
        sampled = float(np.max(np.abs(np.einsum("nab,ab->n", U, u.kernel()))))
        above += sampled > tn * (1 + 1e-12) or tn > u.projective_bound() * (1 + 1e-12)
        gap_worst = max(gap_worst, (tn - sampled) / tn)
    ok = worst <= 1e-9 and above == 0 and gap_worst <= 0.02
    return CheckResult(11, "oracle_agreement", ok, {
        "matrices": count, "max_rel_err": worst, "tensors": tensors, "samples": samples,
        "max_duality_gap": gap_worst, "order_violations": above})


QUICK = (1, 3, 4, 8)


def check_determinism(seed):
    a = format_report(run_checks(QUICK, seed))
    b = format_report(run_checks(QUICK, seed))
    return CheckResult(12, "determinism", a == b, {"rerun_checks": len(QUICK), "identical": a == b})


CHECKS = {
    1: check_submultiplicative,
    2: check_double_sum,
    3: check_projections,
    4: check_bilinear,
    5: check_gallery,
    6: check_poisson,
    7: check_toeplitz,
    8: check_action_identities,
    9: check_multiplier_bound,
    10: check_msot,
    11: check_oracles,
    12: check_determinism,
}
NAMES = {
    "submultiplicative": 1, "double_sum": 2, "projections": 3, "bilinear": 4, "gallery": 5,
    "poisson": 6, "toeplitz": 7, "actions": 8, "multiplier": 9, "msot": 10, "oracles": 11,
    "determinism": 12,
}


class UnknownSuite(KeyError):
    pass


def select(selector):
    """``'all'``, or a comma list of criterion numbers and/or short names."""
    if selector in (None, "", "all"):
        return tuple(CHECKS)
    out = []
    for part in str(selector).split(","):
        part = part.strip()
        if part.isdigit() and int(part) in CHECKS:
            out.append(int(part))
        elif part in NAMES:
            out.append(NAMES[part])
        else:
            raise UnknownSuite(part)
    return tuple(dict.fromkeys(out))


def run_checks(numbers, seed=DEFAULT_SEED):
    return [CHECKS[n](seed) for n in numbers]


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def format_report(results):
    lines = []
    for r in results:
        detail = " ".join(f"{k}={_fmt(v)}" for k, v in r.detail.items())
        lines.append(f"{r.number:>2} {r.name:<30} {'PASS' if r.passed else 'FAIL'}  {detail}")
    return "\n".join(lines) + "\n"


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (float, np.floating)):
        return float(v) if math.isfinite(v) else _fmt(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def results_to_rows(results):
    return [
        {"criterion": r.number, "name": r.name, "pass": bool(r.passed),
         "detail": {k: _json_value(v) for k, v in r.detail.items()}}
        for r in results
    ]
