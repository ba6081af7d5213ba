"""Command-line front end.

Exit codes: 0 success, 1 a verification criterion failed, 2 bad arguments or
unreadable input, 3 unknown verification suite.
"""
import argparse
import csv
import dataclasses
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import block_matrix as bm
from . import gallery, verify
from ._accel import set_threads
from .measures import (
    DEFAULT_R_LADDER,
    LazyMeasure,
    NotComputable,
    measure_from_dict,
    poisson_ladder,
    semivariation_lb,
    sot_norm_estimate,
    variation,
    vinf_norm,
)
from .toeplitz import build_toeplitz, multiplier_upper_bound
from .torus import Grid, tilde_h2_matrix


@dataclass
class RunConfig:
    seed: int = 0xC0FFEE
    d: int = 2
    N: int = 8
    grid: int = 0
    r_ladder: tuple = DEFAULT_R_LADDER
    n_ladder: tuple = (2, 4, 8, 16, 32, 64)
    budget: int = 32
    format: str = "csv"
    out: str = ""
    threads: int = 0

    def validate(self):
        for name in ("d", "N", "budget"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.grid < 0 or self.threads < 0 or self.seed < 0:
            raise ValueError("grid, threads and seed must be non-negative")
        if not all(0 < r < 1 for r in self.r_ladder):
            raise ValueError("r_ladder entries must lie in (0, 1)")
        if not all(n >= 1 for n in self.n_ladder):
            raise ValueError("n_ladder entries must be positive")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        return self


class InputError(Exception):
    pass


def load_config(path):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise InputError("config must be a JSON object")
    names = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = set(raw) - names
    if unknown:
        raise InputError(f"unknown config fields: {', '.join(sorted(unknown))}")
    for key in ("r_ladder", "n_ladder"):
        if key in raw:
            raw[key] = tuple(raw[key])
    return raw


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot parse {path}: {exc}") from exc


def read_matrix(path):
    try:
        return bm.opmatrix_from_dict(_read_json(path))
    except (ValueError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def read_measure(path):
    try:
        return measure_from_dict(_read_json(path))
    except (ValueError, TypeError, KeyError) as exc:
        raise InputError(f"{path}: {exc}") from exc


# ------------------------------------------------------------------ output

def fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _json_value(v):
    """Floats go out as round-trip numbers; non-finite ones as strings."""
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if np.isfinite(v) else fmt(v)
    return v


def render(rows, fmt_name):
    if fmt_name == "json":
        return json.dumps([{k: _json_value(v) for k, v in r.items()} for r in rows], indent=2) + "\n"
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = list(rows[0])
    w.writerow(cols)
    for r in rows:
        w.writerow([fmt(r.get(c, "")) for c in cols])
    return buf.getvalue()


def emit(text, cfg):
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- commands

def cmd_norms(args, cfg):
    A = read_matrix(args.matrix)
    grid = Grid(cfg.grid) if cfg.grid else None
    rows = [
        {"metric": "opnorm", "value": bm.opnorm(A)},
        {"metric": "sot_matrix", "value": bm.sot_norm_matrix(A)},
        {"metric": "weak_lb", "value": bm.weak_l2_norm_matrix(A, seed=cfg.seed)},
        {"metric": "tilde_h2", "value": tilde_h2_matrix(A, grid)},
        {"metric": "frobenius", "value": float(np.linalg.norm(A))},
    ]
    rows += [{"metric": f"diag_sup[{l}]", "value": v} for l, v in bm.diagonal_sups(A).items()]
    return render(rows, cfg.format), 0


def cmd_product(args, cfg):
    A, B = read_matrix(args.left), read_matrix(args.right)
    if A.shape != B.shape:
        raise InputError(f"shapes differ: {A.shape} vs {B.shape}")
    C = bm.schur_product(A, B)
    if args.save:
        with open(args.save, "w") as fh:
            json.dump(bm.opmatrix_to_dict(C), fh)
    na, nb, nc = bm.opnorm(A), bm.opnorm(B), bm.opnorm(C)
    rows = [
        {"metric": "opnorm_left", "value": na},
        {"metric": "opnorm_right", "value": nb},
        {"metric": "opnorm_product", "value": nc},
        {"metric": "bound_holds", "value": bool(nc <= na * nb * (1 + 1e-8))},
    ]
    return render(rows, cfg.format), 0


def cmd_toeplitz(args, cfg):
    mu = read_measure(args.measure)
    ladder = tuple(int(n) for n in args.ladder.split(",")) if args.ladder else cfg.n_ladder
    rows = [{"N": n, "opnorm": bm.opnorm(build_toeplitz(mu, n))} for n in ladder]
    if not isinstance(mu, LazyMeasure):
        rows.append({"N": "vinf", "opnorm": vinf_norm(mu)})
    return render(rows, cfg.format), 0


def cmd_multiplier(args, cfg):
    mu = read_measure(args.measure)
    N = args.N or cfg.N
    A = build_toeplitz(mu, N)
    rows = []
    try:
        rows.append({"metric": "upper_bound", "value": multiplier_upper_bound(mu)})
    except NotComputable:
        pass
    for side in ("right", "left"):
        rows.append({"metric": f"lower_bound_{side}",
                     "value": bm.multiplier_norm_lb(A, side=side, budget=cfg.budget, seed=cfg.seed)})
    rows.append({"metric": "opnorm", "value": bm.opnorm(A)})
    return render(rows, cfg.format), 0


def cmd_measure(args, cfg):
    mu = read_measure(args.measure)
    rows = []
    if not isinstance(mu, LazyMeasure):
        rows.append({"metric": "variation", "value": variation(mu)})
        rows.append({"metric": "semivariation_lb", "value": semivariation_lb(mu, budget=cfg.budget, seed=cfg.seed)})
        if mu.is_operator:
            rows.append({"metric": "sot_norm_lb", "value": sot_norm_estimate(mu, budget=cfg.budget, seed=cfg.seed)})
    rows.append({"metric": "vinf", "value": vinf_norm(mu)})
    if not isinstance(mu, LazyMeasure):
        for r, (v, G) in poisson_ladder(mu, cfg.r_ladder).items():
            rows.append({"metric": f"poisson_l1[r={fmt(float(r))},G={G}]", "value": v})
    return render(rows, cfg.format), 0


def cmd_gallery(args, cfg):
    names = list(gallery.REGISTRY) if args.name == "all" else [args.name]
    for n in names:
        if n not in gallery.REGISTRY:
            raise InputError(f"unknown example {n!r}; known: {', '.join(gallery.REGISTRY)}")
    reports = [gallery.run_example(n, seed=cfg.seed) for n in names]
    if args.export_matrix:
        mats = [r.artifacts["matrix"] for r in reports if "matrix" in r.artifacts]
        if not mats:
            raise InputError("none of the selected examples exports a matrix")
        with open(args.export_matrix, "w") as fh:
            json.dump(bm.opmatrix_to_dict(mats[0]), fh)
    text = gallery.reports_to_json(reports) if cfg.format == "json" else gallery.reports_to_csv(reports)
    return text, 0 if all(r.passed for r in reports) else 1


def cmd_verify(args, cfg):
    try:
        numbers = verify.select(args.suite)
    except verify.UnknownSuite as exc:
        print(f"unknown suite: {exc.args[0]}", file=sys.stderr)
        return "", 3
    results = verify.run_checks(numbers, cfg.seed)
    if cfg.format == "json":
        text = json.dumps(verify.results_to_rows(results), indent=2) + "\n"
    else:
        text = verify.format_report(results)
    return text, 0 if all(r.passed for r in results) else 1


COMMANDS = {
    "norms": cmd_norms,
    "product": cmd_product,
    "toeplitz": cmd_toeplitz,
    "multiplier": cmd_multiplier,
    "measure": cmd_measure,
    "gallery": cmd_gallery,
    "verify": cmd_verify,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=lambda s: int(s, 0), default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS)
    common.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    common.add_argument("--config", default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="opschur", parents=[common],
                                description="Operator-valued Schur products, Toeplitz matrices and measures.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("norms", parents=[common], help="norm table for an operator matrix")
    s.add_argument("matrix")
    s = sub.add_parser("product", parents=[common], help="Schur product of two operator matrices")
    s.add_argument("left")
    s.add_argument("right")
    s.add_argument("--save", help="write the product matrix as JSON")
    s = sub.add_parser("toeplitz", parents=[common], help="Toeplitz norm ladder of a measure")
    s.add_argument("measure")
    s.add_argument("--ladder", help="comma-separated truncation sizes")
    s = sub.add_parser("multiplier", parents=[common], help="Schur multiplier bounds for a measure")
    s.add_argument("measure")
    s.add_argument("--N", type=int, default=0)
    s = sub.add_parser("measure", parents=[common], help="size functionals of a measure")
    s.add_argument("measure")
    s = sub.add_parser("gallery", parents=[common], help="run named examples")
    s.add_argument("name", nargs="?", default="all")
    s.add_argument("--export-matrix", help="write the example's operator matrix as JSON")
    s = sub.add_parser("verify", parents=[common], help="run the acceptance battery")
    s.add_argument("suite", nargs="?", default="all")
    return p


def make_config(ns):
    values = {}
    if getattr(ns, "config", None):
        values.update(load_config(ns.config))
    for f in ("seed", "out", "format", "threads"):
        if hasattr(ns, f):
            values[f] = getattr(ns, f)
    try:
        return RunConfig(**values).validate()
    except (TypeError, ValueError) as exc:
        raise InputError(f"invalid configuration: {exc}") from exc


def main(argv=None):
    ns = build_parser().parse_args(argv)
    try:
        cfg = make_config(ns)
        if cfg.threads:
            set_threads(cfg.threads)
        text, code = COMMANDS[ns.command](ns, cfg)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, NotComputable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if text:
        emit(text, cfg)
    return code


if __name__ == "__main__":
    sys.exit(main())
