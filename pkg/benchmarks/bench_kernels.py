"""Compare the numba and numpy paths of the batched norm kernels.

    python3 benchmarks/bench_kernels.py [--batch 20000] [--dim 3] [--repeat 3]

The first numba call includes compilation (or a cache load); it is timed
separately and excluded from the steady-state numbers.
"""
import argparse
import time

import numpy as np

from opschur import _kernels
from opschur._accel import HAS_NUMBA


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--batch", type=int, default=20000)
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    shape = (args.batch, args.dim, args.dim)
    stack = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    ref = np.linalg.norm(stack, ord=2, axis=(1, 2))

    print(f"batch={args.batch} dim={args.dim} numba={'yes' if HAS_NUMBA else 'no'}")
    print(f"{'kernel':<16}{'path':<8}{'seconds':>12}{'max rel err':>16}")
    for name, run in (
        ("power_norm", lambda jit: _kernels.spectral_norms(stack, jit=jit)),
        ("jacobi_svals", lambda jit: _kernels.jacobi_singular_values(stack, jit=jit)[:, 0]),
    ):
        paths = [("numpy", False)] + ([("numba", True)] if HAS_NUMBA else [])
        for label, jit in paths:
            if jit:
                t0 = time.perf_counter()
                run(True)
                print(f"{name:<16}{'compile':<8}{time.perf_counter() - t0:>12.4f}{'':>16}")
            secs, out = best_of(lambda: run(jit), args.repeat)
            err = np.max(np.abs(out - ref) / ref)
            print(f"{name:<16}{label:<8}{secs:>12.4f}{err:>16.3e}")


if __name__ == "__main__":
    main()
