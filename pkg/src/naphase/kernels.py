"""Coset-enumeration histograms for oscillatory sums.

Both kernels walk the points ``x = c + ϖ^d y`` with ``y`` running over
``(O/ϖ^{k-d})^n``, evaluate an integral polynomial ``G`` modulo ϖ^M and
bin the result.  With ``check_grad`` a point is kept only when every partial
derivative of ``G`` vanishes modulo ϖ^{M-k}; the caller uses this to sum over
half-depth cosets exactly (the linear term integrates to zero otherwise).

* ``padic``: residues are int64 (the caller guarantees ``p^M < 2^31`` so that
  products fit).  The histogram is indexed by ``G(x) mod p^M``.
* ``laurent``: elements of F_p[[t]]/t^M are digit vectors; only the digit of
  ``t^{M-1}`` matters for the character, so the histogram has ``p`` bins.
"""
from __future__ import annotations

import numpy as np

from ._accel import njit

CHUNK = 1 << 15


# ---------------------------------------------------------------------------
# p-adic


def _padic_hist_py(exps, coefs, center, p, d, k, M, check_grad):
    n = exps.shape[1]
    T = exps.shape[0]
    mod = p ** M
    gmod = p ** (M - k) if M > k else 1
    span = p ** (k - d)
    npts = span ** n
    maxdeg = 0
    for t in range(T):
        for i in range(n):
            if exps[t, i] > maxdeg:
                maxdeg = exps[t, i]
    step = p ** d
    counts = np.zeros(mod, np.int64)
    pw = np.empty((n, maxdeg + 1), np.int64)
    x = np.empty(n, np.int64)
    for idx in range(npts):
        r = idx
        for i in range(n):
            x[i] = (center[i] + (r % span) * step) % mod
            r //= span
        for i in range(n):
            pw[i, 0] = 1 % mod
            for j in range(1, maxdeg + 1):
                pw[i, j] = pw[i, j - 1] * x[i] % mod
        g = 0
        for t in range(T):
            v = coefs[t]
            for i in range(n):
                v = v * pw[i, exps[t, i]] % mod
            g = (g + v) % mod
        ok = True
        if check_grad and gmod > 1:
            for i in range(n):
                s = 0
                for t in range(T):
                    e = exps[t, i]
                    if e == 0:
                        continue
                    v = coefs[t] * e % gmod
                    for l in range(n):
                        ee = exps[t, l] - 1 if l == i else exps[t, l]
                        v = v * (pw[l, ee] % gmod) % gmod
                    s = (s + v) % gmod
                if s != 0:
                    ok = False
                    break
        if ok:
            counts[g] += 1
    return counts


_padic_hist_nb = njit(_padic_hist_py)


def _padic_hist_np(exps, coefs, center, p, d, k, M, check_grad):
    n = exps.shape[1]
    mod = p ** M
    gmod = p ** (M - k) if M > k else 1
    span = p ** (k - d)
    npts = span ** n
    maxdeg = int(exps.max()) if exps.size else 0
    counts = np.zeros(mod, np.int64)
    for start in range(0, npts, CHUNK):
        idx = np.arange(start, min(npts, start + CHUNK), dtype=np.int64)
        xs = []
        r = idx.copy()
        for i in range(n):
            xs.append((center[i] + (r % span) * p ** d) % mod)
            r //= span
        pw = []
        for i in range(n):
            col = [np.ones_like(idx) % mod]
            for _ in range(maxdeg):
                col.append(col[-1] * xs[i] % mod)
            pw.append(col)
        g = np.zeros_like(idx)
        for t in range(exps.shape[0]):
            v = np.full_like(idx, coefs[t])
            for i in range(n):
                v = v * pw[i][exps[t, i]] % mod
            g = (g + v) % mod
        keep = np.ones(idx.shape, bool)
        if check_grad and gmod > 1:
            for i in range(n):
                s = np.zeros_like(idx)
                for t in range(exps.shape[0]):
                    e = int(exps[t, i])
                    if e == 0:
                        continue
                    v = np.full_like(idx, coefs[t] * e % gmod)
                    for l in range(n):
                        ee = exps[t, l] - 1 if l == i else exps[t, l]
                        v = v * (pw[l][ee] % gmod) % gmod
                    s = (s + v) % gmod
                keep &= s == 0
        counts += np.bincount(g[keep], minlength=mod)
    return counts


def padic_histogram(exps, coefs, center, p, d, k, M, check_grad=False):
    exps = np.ascontiguousarray(exps, dtype=np.int64)
    coefs = np.ascontiguousarray(coefs, dtype=np.int64)
    center = np.ascontiguousarray(center, dtype=np.int64)
    if p ** M >= 2 ** 31:
        raise OverflowError("p^M too large for int64 residues")
    fn = _padic_hist_nb if _padic_hist_nb is not None else _padic_hist_np
    return fn(exps, coefs, center, p, d, k, M, check_grad)


# ---------------------------------------------------------------------------
# F_p((t))


def _laurent_hist_py(exps, coefs, center, p, d, k, M, check_grad):
    n = exps.shape[1]
    T = exps.shape[0]
    glen = M - k if M > k else 0
    span = p ** (k - d)
    npts = span ** n
    maxdeg = 0
    for t in range(T):
        for i in range(n):
            if exps[t, i] > maxdeg:
                maxdeg = exps[t, i]
    counts = np.zeros(p, np.int64)
    pw = np.zeros((n, maxdeg + 1, M), np.int64)
    x = np.zeros((n, M), np.int64)
    acc = np.zeros(M, np.int64)
    v = np.zeros(M, np.int64)
    w = np.zeros(M, np.int64)
    for idx in range(npts):
        r = idx
        for i in range(n):
            y = r % span
            r //= span
            for j in range(M):
                x[i, j] = center[i, j]
            for j in range(d, k):
                x[i, j] = y % p
                y //= p
        for i in range(n):
            for j in range(M):
                pw[i, 0, j] = 0
            pw[i, 0, 0] = 1
            for e in range(1, maxdeg + 1):
                for j in range(M):
                    s = 0
                    for a in range(j + 1):
                        s += pw[i, e - 1, a] * x[i, j - a]
                    pw[i, e, j] = s % p
        for j in range(M):
            acc[j] = 0
        for t in range(T):
            for j in range(M):
                v[j] = coefs[t, j]
            for i in range(n):
                e = exps[t, i]
                if e == 0:
                    continue
                for j in range(M):
                    s = 0
                    for a in range(j + 1):
                        s += v[a] * pw[i, e, j - a]
                    w[j] = s % p
                for j in range(M):
                    v[j] = w[j]
            for j in range(M):
                acc[j] = (acc[j] + v[j]) % p
        ok = True
        if check_grad and glen > 0:
            for i in range(n):
                for j in range(glen):
                    w[j] = 0
                grad_zero = True
                gs = np.zeros(glen, np.int64)
                for t in range(T):
                    e = exps[t, i]
                    if e % p == 0:
                        continue
                    for j in range(glen):
                        v[j] = coefs[t, j] * e % p
                    for l in range(n):
                        ee = exps[t, l] - 1 if l == i else exps[t, l]
                        if ee == 0:
                            continue
                        for j in range(glen):
                            s = 0
                            for a in range(j + 1):
                                s += v[a] * pw[l, ee, j - a]
                            w[j] = s % p
                        for j in range(glen):
                            v[j] = w[j]
                    for j in range(glen):
                        gs[j] = (gs[j] + v[j]) % p
                for j in range(glen):
                    if gs[j] != 0:
                        grad_zero = False
                if not grad_zero:
                    ok = False
                    break
        if ok:
            counts[acc[M - 1]] += 1
    return counts


_laurent_hist_nb = njit(_laurent_hist_py)


def _conv_trunc(a, b, p, L):
    """Truncated product of digit arrays ``a, b`` of shape (chunk, >=L)."""
    out = np.zeros((a.shape[0], L), np.int64)
    for i in range(L):
        ai = a[:, i]
        if not ai.any():
            continue
        for j in range(L - i):
            out[:, i + j] += ai * b[:, j]
    return out % p


def _laurent_hist_np(exps, coefs, center, p, d, k, M, check_grad):
    n = exps.shape[1]
    glen = M - k if M > k else 0
    span = p ** (k - d)
    npts = span ** n
    maxdeg = int(exps.max()) if exps.size else 0
    counts = np.zeros(p, np.int64)
    for start in range(0, npts, CHUNK):
        idx = np.arange(start, min(npts, start + CHUNK), dtype=np.int64)
        c = idx.shape[0]
        xs = []
        r = idx.copy()
        for i in range(n):
            y = r % span
            r //= span
            xi = np.tile(center[i], (c, 1))
            for j in range(d, k):
                xi[:, j] = y % p
                y //= p
            xs.append(xi)
        pw = []
        for i in range(n):
            one = np.zeros((c, M), np.int64)
            one[:, 0] = 1
            col = [one]
            for _ in range(maxdeg):
                col.append(_conv_trunc(col[-1], xs[i], p, M))
            pw.append(col)
        acc = np.zeros((c, M), np.int64)
        for t in range(exps.shape[0]):
            v = np.tile(coefs[t], (c, 1))
            for i in range(n):
                if exps[t, i]:
                    v = _conv_trunc(v, pw[i][exps[t, i]], p, M)
            acc = (acc + v) % p
        keep = np.ones(c, bool)
        if check_grad and glen > 0:
            for i in range(n):
                gs = np.zeros((c, glen), np.int64)
                for t in range(exps.shape[0]):
                    e = int(exps[t, i])
                    if e % p == 0:
                        continue
                    v = np.tile(coefs[t][:glen] * e % p, (c, 1))
                    for l in range(n):
                        ee = exps[t, l] - 1 if l == i else exps[t, l]
                        if ee:
                            v = _conv_trunc(v, pw[l][ee], p, glen)
                    gs = (gs + v) % p
                keep &= ~gs.any(axis=1)
        counts += np.bincount(acc[keep, M - 1], minlength=p)
    return counts


def laurent_histogram(exps, coefs, center, p, d, k, M, check_grad=False):
    exps = np.ascontiguousarray(exps, dtype=np.int64)
    coefs = np.ascontiguousarray(coefs, dtype=np.int64)
    center = np.ascontiguousarray(center, dtype=np.int64)
    fn = _laurent_hist_nb if _laurent_hist_nb is not None else _laurent_hist_np
    return fn(exps, coefs, center, p, d, k, M, check_grad)


def reference_histogram(kind, exps, coefs, center, p, d, k, M, check_grad=False):
    """Interpreted run of the loop kernel (used to cross-check both backends)."""
    exps = np.ascontiguousarray(exps, dtype=np.int64)
    coefs = np.ascontiguousarray(coefs, dtype=np.int64)
    center = np.ascontiguousarray(center, dtype=np.int64)
    fn = _padic_hist_py if kind == "padic" else _laurent_hist_py
    return fn(exps, coefs, center, p, d, k, M, check_grad)


def numpy_histogram(kind, exps, coefs, center, p, d, k, M, check_grad=False):
    exps = np.ascontiguousarray(exps, dtype=np.int64)
    coefs = np.ascontiguousarray(coefs, dtype=np.int64)
    center = np.ascontiguousarray(center, dtype=np.int64)
    fn = _padic_hist_np if kind == "padic" else _laurent_hist_np
    return fn(exps, coefs, center, p, d, k, M, check_grad)
