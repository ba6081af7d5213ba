import os
import subprocess
import sys

import numpy as np
import pytest

from opschur import _kernels

from conftest import cgauss


def test_power_norm_matches_lapack(rng, jit):
    for m, n in [(1, 1), (2, 2), (3, 5), (8, 8), (7, 2)]:
        stack = cgauss(rng, 50, m, n)
        got = _kernels.spectral_norms(stack, jit=jit)
        ref = np.linalg.norm(stack, ord=2, axis=(1, 2))
        assert np.max(np.abs(got - ref) / ref) < 1e-10


def test_paths_agree(rng):
    stack = cgauss(rng, 200, 4, 4)
    a = _kernels.spectral_norms(stack, jit=False)
    b = _kernels.spectral_norms(stack, jit=True)
    np.testing.assert_allclose(a, b, rtol=1e-11)


def test_zero_and_degenerate(jit):
    z = np.zeros((3, 4, 4), dtype=complex)
    assert np.all(_kernels.spectral_norms(z, jit=jit) == 0)
    eye = np.broadcast_to(np.eye(5), (2, 5, 5)).astype(complex)
    np.testing.assert_allclose(_kernels.spectral_norms(eye, jit=jit), 1.0, atol=1e-14)


def test_empty_batch():
    assert _kernels.spectral_norms(np.zeros((0, 3, 3))).shape == (0,)


def test_jacobi_on_diagonal_matrices(jit):
    # singular values of a diagonal matrix are the sorted moduli of its entries
    diag = np.array([3 - 4j, -1, 0.5j, 2])
    D = np.diag(diag)[None]
    sv = _kernels.jacobi_singular_values(D, jit=jit)[0]
    np.testing.assert_allclose(sv, [5, 2, 1, 0.5], atol=1e-15)


def test_jacobi_matches_lapack(rng, jit):
    for m, n in [(2, 2), (5, 3), (3, 5), (8, 8)]:
        stack = cgauss(rng, 30, m, n)
        sv = _kernels.jacobi_singular_values(stack, jit=jit)
        ref = np.linalg.svd(stack, compute_uv=False)
        np.testing.assert_allclose(sv, ref, rtol=1e-12, atol=1e-13)


def test_warm_starts_large_clustered_matrix():
    # finite section of a peaked Toeplitz symbol: tiny gap at the top
    n = 301
    S = sum(np.eye(n, k=-j) / j for j in range(1, 6)).astype(complex)
    got = _kernels.spectral_norms(S[None])[0]
    assert got == pytest.approx(np.linalg.norm(S, 2), rel=1e-12)


def test_start_vectors_deterministic():
    a = _kernels.start_vectors(6)
    b = _kernels.start_vectors(6)
    assert a is b
    np.testing.assert_allclose(np.linalg.norm(a, axis=1), 1.0)


def test_env_flag_selects_numpy_path():
    code = "from opschur import _accel; print(_accel.ENABLE_JIT)"
    env = dict(os.environ, OPSCHUR_DISABLE_JIT="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "False"
