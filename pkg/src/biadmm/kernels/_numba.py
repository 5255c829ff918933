"""numba-compiled kernels. Loop-level twins of ``_numpy``."""

import math

import numpy as np
from numba import njit

from .codes import NORM_L1, NORM_L2, NORM_LINF


@njit(cache=True)
def _prox_inplace(u, sigma, q):
    d = u.shape[0]
    if sigma <= 0.0:
        return
    if q == NORM_L1:
        for c in range(d):
            a = abs(u[c]) - sigma
            if a > 0.0:
                u[c] = a if u[c] > 0.0 else -a
            else:
                u[c] = 0.0
    elif q == NORM_L2:
        s = 0.0
        for c in range(d):
            s += u[c] * u[c]
        nrm = math.sqrt(s)
        scale = 1.0 - sigma / nrm if nrm > sigma else 0.0
        for c in range(d):
            u[c] *= scale
    else:
        # u - projection of u onto the L1 ball of radius sigma
        total = 0.0
        for c in range(d):
            total += abs(u[c])
        if total <= sigma:
            for c in range(d):
                u[c] = 0.0
            return
        srt = np.sort(np.abs(u))[::-1]
        csum = 0.0
        tau = 0.0
        for j in range(d):
            csum += srt[j]
            t = (csum - sigma) / (j + 1)
            if j == 0 or srt[j] - t > 0.0:
                tau = t
            else:
                break
        for c in range(d):
            a = abs(u[c])
            # prox = u - sign(u) * max(|u| - tau, 0) = sign(u) * min(|u|, tau)
            if a > tau:
                u[c] = tau if u[c] > 0.0 else -tau


@njit(cache=True)
def prox_rows(U, sigma, q):
    out = U.copy()
    for l in range(U.shape[0]):
        _prox_inplace(out[l], sigma[l], q)
    return out


@njit(cache=True)
def edge_update(A, e0, e1, V, L, sigma, nu, q):
    n_edges = e0.shape[0]
    d = A.shape[1]
    u = np.empty(d)
    diff = np.empty(d)
    primal = 0.0
    change = 0.0
    for l in range(n_edges):
        i = e0[l]
        j = e1[l]
        for c in range(d):
            diff[c] = A[i, c] - A[j, c]
            u[c] = diff[c] - L[l, c] / nu
        _prox_inplace(u, sigma[l], q)
        r2 = 0.0
        ch2 = 0.0
        for c in range(d):
            r = u[c] - diff[c]
            L[l, c] += nu * r
            dv = u[c] - V[l, c]
            V[l, c] = u[c]
            r2 += r * r
            ch2 += dv * dv
        if r2 > primal:
            primal = r2
        if ch2 > change:
            change = ch2
    return math.sqrt(primal), nu * math.sqrt(change)


@njit(cache=True)
def scatter_edges(W, e0, e1, out):
    d = W.shape[1]
    for l in range(e0.shape[0]):
        i = e0[l]
        j = e1[l]
        for c in range(d):
            out[i, c] += W[l, c]
            out[j, c] -= W[l, c]


@njit(cache=True)
def tridiagonalize(S):
    d = S.shape[0]
    A = S.copy()
    Q = np.eye(d)
    for k in range(d - 2):
        m = d - k - 1
        tail = 0.0
        for i in range(k + 2, d):
            tail += A[i, k] * A[i, k]
        if tail == 0.0:
            continue
        x0 = A[k + 1, k]
        xnorm = math.sqrt(x0 * x0 + tail)
        alpha = -xnorm if x0 >= 0.0 else xnorm
        v = np.empty(m)
        v[0] = x0 - alpha
        for i in range(1, m):
            v[i] = A[k + 1 + i, k]
        vn = 0.0
        for i in range(m):
            vn += v[i] * v[i]
        vn = math.sqrt(vn)
        for i in range(m):
            v[i] /= vn
        p = np.zeros(m)
        for i in range(m):
            acc = 0.0
            for j in range(m):
                acc += A[k + 1 + i, k + 1 + j] * v[j]
            p[i] = 2.0 * acc
        pv = 0.0
        for i in range(m):
            pv += p[i] * v[i]
        w = np.empty(m)
        for i in range(m):
            w[i] = p[i] - pv * v[i]
        for i in range(m):
            for j in range(m):
                A[k + 1 + i, k + 1 + j] -= v[i] * w[j] + w[i] * v[j]
        A[k + 1, k] = alpha
        A[k, k + 1] = alpha
        for i in range(k + 2, d):
            A[i, k] = 0.0
            A[k, i] = 0.0
        for r in range(d):
            acc = 0.0
            for j in range(m):
                acc += Q[r, k + 1 + j] * v[j]
            acc *= 2.0
            for j in range(m):
                Q[r, k + 1 + j] -= acc * v[j]
    diag = np.empty(d)
    off = np.zeros(max(d - 1, 0))
    for i in range(d):
        diag[i] = A[i, i]
    for i in range(d - 1):
        off[i] = A[i, i + 1]
    return diag, off, Q


@njit(cache=True)
def _negligible(off, diag, i, tol, floor):
    a = abs(off[i])
    return a <= tol * (abs(diag[i]) + abs(diag[i + 1])) or a <= floor


@njit(cache=True)
def tridiagonal_qr(diag, off, Q, tol, max_iter):
    d = diag.shape[0]
    nrows = Q.shape[0]
    tnorm = 0.0
    for i in range(d):
        tnorm = max(tnorm, abs(diag[i]))
    omax = 0.0
    for i in range(d - 1):
        omax = max(omax, abs(off[i]))
    tnorm += 2.0 * omax
    floor = tol * tnorm * 1e-2
    sweeps = 0
    m = d - 1
    while m > 0:
        if _negligible(off, diag, m - 1, tol, floor):
            off[m - 1] = 0.0
            m -= 1
            continue
        lo = m - 1
        while lo > 0:
            if _negligible(off, diag, lo - 1, tol, floor):
                off[lo - 1] = 0.0
                break
            lo -= 1
        if sweeps >= max_iter:
            return -1
        sweeps += 1
        b = off[m - 1]
        delta = 0.5 * (diag[m - 1] - diag[m])
        denom = delta + math.copysign(math.hypot(delta, b), delta)
        if denom != 0.0:
            mu = diag[m] - b * b / denom
        else:
            mu = diag[m] - abs(b)
        x = diag[lo] - mu
        z = off[lo]
        for k in range(lo, m):
            r = math.hypot(x, z)
            if r == 0.0:
                c = 1.0
                s = 0.0
            else:
                c = x / r
                s = z / r
            if k > lo:
                off[k - 1] = r
            dk = diag[k]
            dk1 = diag[k + 1]
            ek = off[k]
            diag[k] = c * c * dk + 2.0 * c * s * ek + s * s * dk1
            diag[k + 1] = s * s * dk - 2.0 * c * s * ek + c * c * dk1
            off[k] = c * s * (dk1 - dk) + (c * c - s * s) * ek
            if k < m - 1:
                x = off[k]
                z = s * off[k + 1]
                off[k + 1] = c * off[k + 1]
            for row in range(nrows):
                qa = Q[row, k]
                qb = Q[row, k + 1]
                Q[row, k] = c * qa + s * qb
                Q[row, k + 1] = -s * qa + c * qb
    return sweeps
