"""Compiled numerical kernels: Hermitian Jacobi eigensolver and the bound ascent.

Everything here works on plain complex128 / float64 arrays so that numba can
compile it. The public wrappers live in :mod:`bellscope.hermitian` and
:mod:`bellscope.regime_bounds`.
"""
import math

import numpy as np
from numba import njit

REGIME_TENSOR = 1
REGIME_GLOBAL = 2

JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100


@njit(cache=True, nogil=True)
def _offdiag_mass(a):
    n = a.shape[0]
    s = 0.0
    for p in range(n):
        for q in range(p + 1, n):
            z = a[p, q]
            s += 2.0 * (z.real * z.real + z.imag * z.imag)
    return math.sqrt(s)


@njit(cache=True, nogil=True)
def jacobi_eigh(m, want_vectors):
    """Cyclic complex Jacobi. Returns (unsorted eigenvalues, eigenvectors, sweeps)."""
    n = m.shape[0]
    a = m.copy()
    v = np.eye(n, dtype=np.complex128)
    scale = 0.0
    for i in range(n):
        for j in range(n):
            z = a[i, j]
            scale += z.real * z.real + z.imag * z.imag
    tol = JACOBI_TOL * max(1.0, math.sqrt(scale))
    sweeps = 0
    while sweeps < JACOBI_MAX_SWEEPS and _offdiag_mass(a) >= tol:
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r < 1e-300:
                    continue
                e = apq / r
                ec = e.conjugate()
                theta = (a[q, q].real - a[p, p].real) / (2.0 * r)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # unitary block acting on columns (p, q)
                upp = complex(c, 0.0)
                upq = complex(s, 0.0)
                uqp = -s * ec
                uqq = c * ec
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = akp * upp + akq * uqp
                    a[k, q] = akp * upq + akq * uqq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = upp.conjugate() * apk + uqp.conjugate() * aqk
                    a[q, k] = upq.conjugate() * apk + uqq.conjugate() * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                if want_vectors:
                    for k in range(n):
                        vkp = v[k, p]
                        vkq = v[k, q]
                        v[k, p] = vkp * upp + vkq * uqp
                        v[k, q] = vkp * upq + vkq * uqq
    w = np.empty(n)
    for i in range(n):
        w[i] = a[i, i].real
    return w, v, sweeps


@njit(cache=True, nogil=True)
def _extreme_eigs(m):
    w, _, _ = jacobi_eigh(m, False)
    return w.max(), w.min()


@njit(cache=True, nogil=True)
def expm_small(g):
    """Matrix exponential by scaling and squaring with a degree-18 Taylor sum."""
    n = g.shape[0]
    norm = 0.0
    for i in range(n):
        row = 0.0
        for j in range(n):
            row += abs(g[i, j])
        norm = max(norm, row)
    squarings = 0
    while norm > 0.25:
        norm *= 0.5
        squarings += 1
    h = g / (2.0 ** squarings)
    result = np.eye(n, dtype=np.complex128)
    term = np.eye(n, dtype=np.complex128)
    for k in range(1, 19):
        term = term @ h / k
        result = result + term
    for _ in range(squarings):
        result = result @ result
    return result


def n_params(dim, contraction):
    return dim * dim + (dim if contraction else 0)


@njit(cache=True, nogil=True)
def observable_from_params(x, dim, contraction):
    """V diag(eigs) V^dagger with V = exp(G), G anti-Hermitian built from ``x``."""
    g = np.zeros((dim, dim), dtype=np.complex128)
    idx = 0
    for i in range(dim):
        g[i, i] = 1j * x[idx]
        idx += 1
    for i in range(dim):
        for j in range(i + 1, dim):
            re = x[idx]
            im = x[idx + 1]
            g[i, j] = complex(re, im)
            g[j, i] = complex(-re, im)
            idx += 2
    eigs = np.empty(dim)
    if contraction:
        for i in range(dim):
            eigs[i] = min(1.0, max(-1.0, x[idx + i]))
    else:
        n_plus = (dim + 1) // 2
        for i in range(dim):
            eigs[i] = 1.0 if i < n_plus else -1.0
    v = expm_small(g)
    vd = v.copy()
    for i in range(dim):
        for j in range(dim):
            vd[i, j] = v[i, j] * eigs[j]
    out = vd @ v.conj().T
    # exact Hermitian assembly; the product above is Hermitian only to rounding
    herm = 0.5 * (out + out.conj().T)
    return herm


@njit(cache=True, nogil=True)
def _kron(a, b):
    na = a.shape[0]
    nb = b.shape[0]
    out = np.empty((na * nb, na * nb), dtype=np.complex128)
    for i in range(na):
        for j in range(na):
            aij = a[i, j]
            for k in range(nb):
                for l in range(nb):
                    out[i * nb + k, j * nb + l] = aij * b[k, l]
    return out


@njit(cache=True, nogil=True)
def _sym(a, b):
    return 0.5 * (a @ b + b @ a)


@njit(cache=True, nogil=True)
def composite(a1, a2, b1, b2, regime):
    """B = a1*b1 + a1*b2 + a2*b1 - a2*b2 with the regime's product."""
    if regime == REGIME_TENSOR:
        return _kron(a1, b1) + _kron(a1, b2) + _kron(a2, b1) - _kron(a2, b2)
    return _sym(a1, b1) + _sym(a1, b2) + _sym(a2, b1) - _sym(a2, b2)


@njit(cache=True, nogil=True)
def _evaluate(obs, regime):
    b = composite(obs[0], obs[1], obs[2], obs[3], regime)
    return _extreme_eigs(b)


@njit(cache=True, nogil=True)
def ascend(x0, dim, contraction, regime, max_iters, initial_step, step_decay, fd_eps, min_step):
    """Normalized finite-difference gradient ascent on lambda_max(B).

    Returns (x, best value, iterations, largest lambda_max(B^dagger B) seen).
    """
    m = x0.shape[0] // 4
    x = x0.copy()
    if contraction:
        for k in range(4):
            for i in range(dim * dim, m):
                x[k * m + i] = min(1.0, max(-1.0, x[k * m + i]))
    obs = np.empty((4, dim, dim), dtype=np.complex128)
    for k in range(4):
        obs[k] = observable_from_params(x[k * m:(k + 1) * m], dim, contraction)
    hi, lo = _evaluate(obs, regime)
    f = hi
    gram = max(hi * hi, lo * lo)
    grad = np.zeros_like(x)
    step = initial_step
    it = 0
    while it < max_iters and step >= min_step:
        it += 1
        for k in range(4):
            saved = obs[k].copy()
            block = x[k * m:(k + 1) * m].copy()
            for j in range(m):
                orig = block[j]
                block[j] = orig + fd_eps
                obs[k] = observable_from_params(block, dim, contraction)
                fp, lp = _evaluate(obs, regime)
                block[j] = orig - fd_eps
                obs[k] = observable_from_params(block, dim, contraction)
                fm, lm = _evaluate(obs, regime)
                block[j] = orig
                gram = max(gram, fp * fp, lp * lp, fm * fm, lm * lm)
                grad[k * m + j] = (fp - fm) / (2.0 * fd_eps)
            obs[k] = saved
        gnorm = math.sqrt(np.sum(grad * grad))
        if gnorm == 0.0:
            break
        trial = x + (step / gnorm) * grad
        if contraction:
            for k in range(4):
                for i in range(dim * dim, m):
                    trial[k * m + i] = min(1.0, max(-1.0, trial[k * m + i]))
        tobs = np.empty_like(obs)
        for k in range(4):
            tobs[k] = observable_from_params(trial[k * m:(k + 1) * m], dim, contraction)
        th, tl = _evaluate(tobs, regime)
        gram = max(gram, th * th, tl * tl)
        if th > f:
            x = trial
            obs = tobs
            f = th
        else:
            step *= step_decay
    return x, f, it, gram
