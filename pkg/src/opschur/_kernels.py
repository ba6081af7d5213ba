"""Hot loops: batched power-iteration norms and one-sided Jacobi SVD.

Each kernel exists twice, a numba version looping per matrix and a numpy
version vectorised across the batch. ``_accel.ENABLE_JIT`` picks which one the
public wrappers dispatch to; both are importable for testing and benchmarks.
"""
import numpy as np

from ._accel import ENABLE_JIT, HAS_NUMBA, njit

POWER_TOL = 1e-12
# increments at round-off level end the iteration regardless of the tail estimate
NOISE = 1e-15
POWER_MAXITER = 100_000
N_RESTARTS = 3
RESTART_SEED = 0x5EED
JACOBI_TOL = 1e-15
JACOBI_MAXSWEEP = 100
SQUARING_DIM = 48
SQUARINGS = 30

if HAS_NUMBA:
    from numba import prange
else:  # pragma: no cover
    prange = range


_START_CACHE = {}


def start_vectors(n):
    """All-ones start followed by ``N_RESTARTS`` seeded complex Gaussian starts."""
    if n not in _START_CACHE:
        rng = np.random.default_rng(RESTART_SEED + n)
        s = np.empty((N_RESTARTS + 1, n), dtype=np.complex128)
        s[0] = 1.0
        s[1:] = rng.standard_normal((N_RESTARTS, n)) + 1j * rng.standard_normal((N_RESTARTS, n))
        s /= np.linalg.norm(s, axis=1)[:, None]
        s.setflags(write=False)
        _START_CACHE[n] = s
    return _START_CACHE[n]


# ---------------------------------------------------------------- power norm

@njit(parallel=True)
def power_norm_batch_numba(grams, starts, tol, maxiter):
    nb = grams.shape[0]
    n = grams.shape[1]
    out = np.empty(nb)
    for b in prange(nb):
        g = grams[b]
        best = 0.0
        v = np.empty(n, dtype=np.complex128)
        w = np.empty(n, dtype=np.complex128)
        for s in range(starts.shape[0]):
            for i in range(n):
                v[i] = starts[s, i]
            lam_old = -1.0
            inc_old = 0.0
            lam = 0.0
            for it in range(maxiter):
                lam = 0.0
                nw = 0.0
                for i in range(n):
                    acc = 0j
                    for j in range(n):
                        acc += g[i, j] * v[j]
                    w[i] = acc
                    lam += (v[i].conjugate() * acc).real
                    nw += acc.real * acc.real + acc.imag * acc.imag
                if nw == 0.0:
                    lam = 0.0
                    break
                nw = np.sqrt(nw)
                for i in range(n):
                    v[i] = w[i] / nw
                if it > 0:
                    inc = abs(lam - lam_old)
                    if inc <= NOISE * lam:
                        break
                    rho = inc / inc_old if inc_old > 0.0 else 1.0
                    if rho < 1.0 and inc / (1.0 - rho) <= tol * lam:
                        break
                    inc_old = inc
                lam_old = lam
            if lam > best:
                best = lam
        out[b] = np.sqrt(best)
    return out


def power_norm_batch_numpy(grams, starts, tol, maxiter):
    nb, n, _ = grams.shape
    best = np.zeros(nb)
    for s in starts:
        v = np.broadcast_to(s, (nb, n)).copy()
        lam = np.zeros(nb)
        lam_old = np.full(nb, -1.0)
        inc_old = np.zeros(nb)
        active = np.arange(nb)
        it = 0
        while active.size and it < maxiter:
            va = v[active]
            w = np.einsum("bij,bj->bi", grams[active], va)
            lam_a = np.einsum("bi,bi->b", va.conj(), w).real
            nw = np.linalg.norm(w, axis=1)
            zero = nw == 0.0
            lam_a[zero] = 0.0
            v[active] = w / np.where(zero, 1.0, nw)[:, None]
            lam[active] = lam_a
            done = zero
            if it > 0:
                inc = np.abs(lam_a - lam_old[active])
                prev = inc_old[active]
                rho = np.where(prev > 0, inc / np.where(prev > 0, prev, 1.0), 1.0)
                tail = inc / np.where(rho < 1.0, 1.0 - rho, 1.0)
                done = done | (inc <= NOISE * lam_a) | ((rho < 1.0) & (tail <= tol * lam_a))
                inc_old[active] = inc
            lam_old[active] = lam_a
            active = active[~done]
            it += 1
        np.maximum(best, lam, out=best)
    return np.sqrt(best)


def gram_stack(stack):
    """Smaller of A^H A and A A^H for every matrix in a (B, m, n) stack."""
    stack = np.asarray(stack, dtype=np.complex128)
    if stack.shape[1] < stack.shape[2]:
        return stack @ stack.conj().transpose(0, 2, 1)
    return stack.conj().transpose(0, 2, 1) @ stack


def warm_starts(gram, starts, squarings=SQUARINGS, tol=POWER_TOL):
    """Push each start through gram^(2^q), q <= squarings.

    Large Gram matrices often have a tiny relative gap at the top, which makes
    plain power iteration crawl. Repeated squaring (rescaled each time) gives
    the same direction in a handful of matrix products. Squaring stops once
    the Rayleigh quotient of the first warmed start settles.
    """
    P = gram / max(np.linalg.norm(gram), 1e-300)
    rq_old = -1.0
    for _ in range(squarings):
        P = P @ P
        nrm = np.linalg.norm(P)
        if nrm == 0.0:
            return starts
        P /= nrm
        v = P @ starts[0]
        nv = np.linalg.norm(v)
        if nv == 0.0:
            continue
        v /= nv
        rq = float(np.vdot(v, gram @ v).real)
        if abs(rq - rq_old) <= tol * 1e-2 * abs(rq):
            break
        rq_old = rq
    out = starts @ P.T
    nrm = np.linalg.norm(out, axis=1)
    ok = nrm > 0
    out[ok] /= nrm[ok, None]
    out[~ok] = starts[~ok]
    return np.ascontiguousarray(out)


def spectral_norms(stack, tol=POWER_TOL, maxiter=POWER_MAXITER, jit=None):
    """Largest singular value of each matrix in a (B, m, n) stack.

    Gram matrices larger than ``SQUARING_DIM`` get warm starts from
    ``warm_starts``; the Rayleigh quotient is still iterated on the Gram itself.
    """
    stack = np.asarray(stack, dtype=np.complex128)
    if stack.ndim != 3:
        raise ValueError("expected a (B, m, n) stack")
    if stack.shape[0] == 0:
        return np.zeros(0)
    if min(stack.shape[1:]) == 1:
        return np.sqrt(np.einsum("bij,bij->b", stack.conj(), stack).real)
    grams = np.ascontiguousarray(gram_stack(stack))
    starts = start_vectors(grams.shape[1])
    use_jit = ENABLE_JIT if jit is None else (jit and HAS_NUMBA)
    kernel = power_norm_batch_numba if use_jit else power_norm_batch_numpy
    if grams.shape[1] > SQUARING_DIM:
        return np.array([kernel(grams[b:b + 1], warm_starts(grams[b], starts), tol, maxiter)[0]
                         for b in range(grams.shape[0])])
    return kernel(grams, np.ascontiguousarray(starts), tol, maxiter)


# ------------------------------------------------------------ Jacobi SVD

@njit
def _jacobi_one(a, tol, maxsweep):
    m, n = a.shape
    for sweep in range(maxsweep):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = 0.0
                beta = 0.0
                gamma = 0j
                for i in range(m):
                    alpha += a[i, p].real ** 2 + a[i, p].imag ** 2
                    beta += a[i, q].real ** 2 + a[i, q].imag ** 2
                    gamma += a[i, p].conjugate() * a[i, q]
                g = abs(gamma)
                if g == 0.0 or g <= tol * np.sqrt(alpha * beta):
                    continue
                rotated = True
                phase = gamma / g
                zeta = (beta - alpha) / (2.0 * g)
                t = (1.0 if zeta >= 0 else -1.0) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                for i in range(m):
                    ap = a[i, p]
                    aq = a[i, q] * phase.conjugate()
                    a[i, p] = c * ap - s * aq
                    a[i, q] = s * ap + c * aq
        if not rotated:
            break
    out = np.empty(n)
    for j in range(n):
        acc = 0.0
        for i in range(m):
            acc += a[i, j].real ** 2 + a[i, j].imag ** 2
        out[j] = np.sqrt(acc)
    return out


@njit(parallel=True)
def jacobi_svals_batch_numba(stack, tol, maxsweep):
    nb = stack.shape[0]
    out = np.empty((nb, stack.shape[2]))
    for b in prange(nb):
        out[b] = _jacobi_one(stack[b].copy(), tol, maxsweep)
    return out


def jacobi_svals_batch_numpy(stack, tol, maxsweep):
    a = stack.copy()
    nb, m, n = a.shape
    for _ in range(maxsweep):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                ap = a[:, :, p]
                aq = a[:, :, q]
                alpha = np.einsum("bi,bi->b", ap.conj(), ap).real
                beta = np.einsum("bi,bi->b", aq.conj(), aq).real
                gamma = np.einsum("bi,bi->b", ap.conj(), aq)
                g = np.abs(gamma)
                act = (g > 0.0) & (g > tol * np.sqrt(alpha * beta))
                if not act.any():
                    continue
                rotated = True
                gs = np.where(act, g, 1.0)
                phase = np.where(act, gamma / gs, 1.0)
                zeta = (beta - alpha) / (2.0 * gs)
                t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                t = np.where(act, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                aq = aq * np.where(act, phase.conj(), 1.0)[:, None]
                new_p = c[:, None] * ap - s[:, None] * aq
                new_q = s[:, None] * ap + c[:, None] * aq
                a[:, :, p] = new_p
                a[:, :, q] = new_q
        if not rotated:
            break
    return np.linalg.norm(a, axis=1)


def jacobi_singular_values(stack, tol=JACOBI_TOL, maxsweep=JACOBI_MAXSWEEP, jit=None):
    """Singular values (descending) of each matrix in a (B, m, n) stack."""
    stack = np.asarray(stack, dtype=np.complex128)
    if stack.ndim != 3:
        raise ValueError("expected a (B, m, n) stack")
    if stack.shape[1] < stack.shape[2]:
        stack = np.conj(np.swapaxes(stack, 1, 2))
    stack = np.ascontiguousarray(stack)
    use_jit = ENABLE_JIT if jit is None else (jit and HAS_NUMBA)
    if use_jit:
        sv = jacobi_svals_batch_numba(stack, tol, maxsweep)
    else:
        sv = jacobi_svals_batch_numpy(stack, tol, maxsweep)
    return -np.sort(-sv, axis=1)
