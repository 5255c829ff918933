"""Symmetric Sylvester solver ``M A + A N = G`` and a dense Kronecker oracle.

M and N are symmetric here, so the Bartels-Stewart reduction becomes a pair
of orthogonal diagonalizations: with ``M = U diag(lam) U^T`` and
``N = W diag(theta) W^T`` the solution is
``A = U [(U^T G W)_ij / (lam_i + theta_j)] W^T``.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels

EIG_TOL = 1e-14
SYMMETRY_TOL = 1e-10
SINGULAR_TOL = 1e-12
KRON_MAX_SIZE = 400


class SingularPencilError(ValueError):
    pass


class EigenConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class EigenFactorization:
    vectors: np.ndarray
    values: np.ndarray

    def reconstruct(self):
        return (self.vectors * self.values) @ self.vectors.T


def as_symmetric(S, name="matrix"):
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError(f"{name} must be square, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise ValueError(f"{name} has non-finite entries")
    scale = np.linalg.norm(S)
    if scale > 0 and np.linalg.norm(S - S.T) > SYMMETRY_TOL * scale:
        raise ValueError(f"{name} is not symmetric")
    return 0.5 * (S + S.T)


def sym_eigen(S, backend=None):
    """Eigendecomposition of a real symmetric matrix, eigenvalues ascending.

    Householder tridiagonalization followed by implicit-shift QR sweeps.
    ``backend`` picks the kernel set ('numba' or 'numpy'); default follows
    ``BIADMM_BACKEND``.
    """
    S = as_symmetric(S)
    k = kernels.active if backend is None else kernels.get(backend)
    d = S.shape[0]
    if d == 0:
        return EigenFactorization(np.zeros((0, 0)), np.zeros(0))
    diag, off, Q = k.tridiagonalize(np.ascontiguousarray(S))
    sweeps = k.tridiagonal_qr(diag, off, Q, EIG_TOL, 100 * d)
    if sweeps < 0:
        raise EigenConvergenceError(f"QR iteration did not converge within {100 * d} sweeps")
    order = np.argsort(diag, kind="stable")
    return EigenFactorization(np.ascontiguousarray(Q[:, order]), diag[order])


class SylvesterSolver:
    """Factor M and N once; solve ``M A + A N = G`` for many right-hand sides."""

    def __init__(self, M, N, backend=None):
        self.M = as_symmetric(M, "M")
        self.N = as_symmetric(N, "N")
        self.eig_M = sym_eigen(self.M, backend)
        self.eig_N = sym_eigen(self.N, backend)
        denom = self.eig_M.values[:, None] + self.eig_N.values[None, :]
        if denom.min() <= SINGULAR_TOL:
            raise SingularPencilError(
                f"eigenvalue sums must be positive; smallest is {denom.min():.3e}"
            )
        self._inv_denom = 1.0 / denom
        self._U = self.eig_M.vectors
        self._W = self.eig_N.vectors
        self._UT = np.ascontiguousarray(self._U.T)
        self._WT = np.ascontiguousarray(self._W.T)

    @property
    def shape(self):
        return self.M.shape[0], self.N.shape[0]

    def solve(self, G):
        G = np.asarray(G, dtype=np.float64)
        if G.shape != self.shape:
            raise ValueError(f"G has shape {G.shape}, expected {self.shape}")
        H = self._UT @ G @ self._W
        H *= self._inv_denom
        return self._U @ H @ self._WT

    def residual(self, A, G):
        return np.linalg.norm(self.M @ A + A @ self.N - G)


def solve_sylvester(M, N, G, backend=None):
    """Solve ``M A + A N = G`` for symmetric M (n x n) and N (p x p)."""
    return SylvesterSolver(M, N, backend).solve(G)


def kron_oracle(M, N, G):
    """Reference solve of ``(I_p kron M + N kron I_n) vec(A) = vec(G)``.

    Dense and O((np)^3); refuses systems with ``n * p > 400``.
    """
    M = np.asarray(M, dtype=np.float64)
    N = np.asarray(N, dtype=np.float64)
    G = np.asarray(G, dtype=np.float64)
    n, p = G.shape
    if n * p > KRON_MAX_SIZE:
        raise ValueError(f"kron_oracle is limited to n*p <= {KRON_MAX_SIZE}, got {n * p}")
    K = np.kron(np.eye(p), M) + np.kron(N, np.eye(n))
    g = G.reshape(-1, order="F")
    a = np.linalg.solve(K, g)
    return a.reshape((n, p), order="F")
