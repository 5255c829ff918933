"""Pure-numpy kernels. Same signatures and semantics as the numba set."""

import math

import numpy as np

from .codes import NORM_L1, NORM_L2, NORM_LINF


def l1_ball_threshold_rows(absu, radius):
    """Row-wise soft-threshold level that projects ``absu`` rows onto L1 balls.

    ``absu`` holds absolute values (k x d); ``radius`` is length k. Rows
    already inside their ball get threshold 0.
    """
    k, d = absu.shape
    srt = -np.sort(-absu, axis=1)
    csum = np.cumsum(srt, axis=1) - radius[:, None]
    j = np.arange(1, d + 1, dtype=np.float64)
    active = srt - csum / j > 0
    # the first index always qualifies in exact arithmetic; rounding can hide it
    active[:, 0] = True
    # rho = last index where the condition holds (condition is monotone)
    rho = d - np.argmax(active[:, ::-1], axis=1)
    tau = csum[np.arange(k), rho - 1] / rho
    inside = absu.sum(axis=1) <= radius
    tau[inside] = 0.0
    return np.maximum(tau, 0.0)


def prox_rows(U, sigma, q):
    """Prox of ``sigma[l] * ||.||_q`` applied to every row of ``U``."""
    if q == NORM_L1:
        s = sigma[:, None]
        return np.sign(U) * np.maximum(np.abs(U) - s, 0.0)
    if q == NORM_L2:
        norms = np.sqrt(np.einsum("ij,ij->i", U, U))
        scale = np.zeros_like(norms)
        pos = norms > sigma
        scale[pos] = 1.0 - sigma[pos] / norms[pos]
        return U * scale[:, None]
    if q == NORM_LINF:
        absu = np.abs(U)
        tau = l1_ball_threshold_rows(absu, sigma)
        proj = np.sign(U) * np.maximum(absu - tau[:, None], 0.0)
        proj[sigma <= 0.0] = 0.0
        inside = absu.sum(axis=1) <= sigma
        proj[inside] = U[inside]
        return U - proj
    raise ValueError(f"unknown norm code {q}")


def edge_update(A, e0, e1, V, L, sigma, nu, q):
    """Splitting-variable and dual update for one edge block, in place.

    For each edge ``l`` the new ``V[l]`` is the prox of the row difference
    ``A[e0[l]] - A[e1[l]] - L[l] / nu``; then ``L[l] += nu * (V[l] - diff)``.
    Returns ``(max_l ||V[l] - diff_l||, nu * max_l ||V[l] - V_old[l]||)``.
    """
    if len(e0) == 0:
        return 0.0, 0.0
    diff = A[e0] - A[e1]
    Vnew = prox_rows(diff - L / nu, sigma, q)
    r = Vnew - diff
    L += nu * r
    change = Vnew - V
    V[...] = Vnew
    primal = math.sqrt(np.max(np.einsum("ij,ij->i", r, r)))
    dual = math.sqrt(np.max(np.einsum("ij,ij->i", change, change)))
    return primal, nu * dual


def scatter_edges(W, e0, e1, out):
    """``out[e0[l]] += W[l]`` and ``out[e1[l]] -= W[l]`` for every edge."""
    if len(e0):
        np.add.at(out, e0, W)
        np.subtract.at(out, e1, W)


def tridiagonalize(S):
    """Householder reduction ``S = Q T Q^T``; returns (diag, offdiag, Q)."""
    A = np.array(S, dtype=np.float64, copy=True)
    d = A.shape[0]
    Q = np.eye(d)
    for k in range(d - 2):
        x = A[k + 1:, k]
        tail = np.dot(x[1:], x[1:])
        if tail == 0.0:
            continue
        xnorm = math.sqrt(x[0] * x[0] + tail)
        alpha = -xnorm if x[0] >= 0.0 else xnorm
        v = x.copy()
        v[0] -= alpha
        v /= math.sqrt(np.dot(v, v))
        # H = I - 2 v v^T on the trailing block; symmetric rank-2 update
        B = A[k + 1:, k + 1:]
        p = 2.0 * (B @ v)
        w = p - np.dot(p, v) * v
        B -= np.outer(v, w) + np.outer(w, v)
        A[k + 1, k] = A[k, k + 1] = alpha
        A[k + 2:, k] = 0.0
        A[k, k + 2:] = 0.0
        Qk = Q[:, k + 1:]
        Qk -= 2.0 * np.outer(Qk @ v, v)
    return np.diag(A).copy(), np.diag(A, 1).copy(), Q


def tridiagonal_qr(diag, off, Q, tol, max_iter):
    """Implicit Wilkinson-shift QR on a symmetric tridiagonal matrix.

    ``diag``/``off`` are overwritten (eigenvalues end up in ``diag``) and the
    rotations are accumulated into the columns of ``Q``. Returns the number of
    QR sweeps, or -1 when ``max_iter`` is exceeded.
    """
    d = diag.shape[0]
    tnorm = np.max(np.abs(diag)) + (2.0 * np.max(np.abs(off)) if d > 1 else 0.0)
    floor = tol * tnorm * 1e-2
    QT = np.ascontiguousarray(Q.T)
    sweeps = 0
    m = d - 1
    while m > 0:
        if abs(off[m - 1]) <= tol * (abs(diag[m - 1]) + abs(diag[m])) or abs(off[m - 1]) <= floor:
            off[m - 1] = 0.0
            m -= 1
            continue
        lo = m - 1
        while lo > 0:
            if abs(off[lo - 1]) <= tol * (abs(diag[lo - 1]) + abs(diag[lo])) or abs(off[lo - 1]) <= floor:
                off[lo - 1] = 0.0
                break
            lo -= 1
        if sweeps >= max_iter:
            Q[...] = QT.T
            return -1
        sweeps += 1
        b = off[m - 1]
        delta = 0.5 * (diag[m - 1] - diag[m])
        denom = delta + math.copysign(math.hypot(delta, b), delta)
        mu = diag[m] - b * b / denom if denom != 0.0 else diag[m] - abs(b)
        x = diag[lo] - mu
        z = off[lo]
        for k in range(lo, m):
            r = math.hypot(x, z)
            if r == 0.0:
                c, s = 1.0, 0.0
            else:
                c, s = x / r, z / r
            if k > lo:
                off[k - 1] = r
            dk, dk1, ek = diag[k], diag[k + 1], off[k]
            diag[k] = c * c * dk + 2.0 * c * s * ek + s * s * dk1
            diag[k + 1] = s * s * dk - 2.0 * c * s * ek + c * c * dk1
            off[k] = c * s * (dk1 - dk) + (c * c - s * s) * ek
            if k < m - 1:
                x = off[k]
                z = s * off[k + 1]
                off[k + 1] = c * off[k + 1]
            qk = QT[k].copy()
            QT[k] = c * qk + s * QT[k + 1]
            QT[k + 1] = -s * qk + c * QT[k + 1]
    Q[...] = QT.T
    return sweeps
