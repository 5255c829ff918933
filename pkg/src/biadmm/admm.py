"""bi-ADMM and its compositional variant (biC-ADMM).

The fit minimizes

    0.5 * ||X - A||_F^2 + gamma1 * sum_l w_l ||A[l1] - A[l2]||_q
                        + gamma2 * sum_k u_k ||A[:, k1] - A[:, k2]||_q

optionally subject to ``A @ 1 = 1``, by splitting each row difference into
``V[l]`` and each column difference into ``Z[k]``. The A-step is a Sylvester
equation whose coefficient matrices never change within a fit, so they are
factored once up front.
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .graph import WeightedEdgeSet
from .prox import norm_code, vector_norm
from .sylvester import SylvesterSolver

logger = logging.getLogger(__name__)

SIMPLEX_TOL = 1e-6


class InvalidConfigError(ValueError):
    pass


class InputDataError(ValueError):
    """The data matrix violates a precondition of the requested fit."""

    def __init__(self, message, row=None):
        self.row = row
        super().__init__(message)


class NonFiniteIterateError(FloatingPointError):
    def __init__(self, iteration, block):
        self.iteration = iteration
        self.block = block
        super().__init__(
            f"non-finite values in block {block!r} at iteration {iteration}; "
            "check the data scale and the augmentation constants nu"
        )


@dataclass(frozen=True)
class AdmmConfig:
    """Penalty levels, augmentation constants and stopping rule.

    Unset ``nu`` values default to 8 for general fits and to 1 for
    compositional fits.
    """

    gamma1: float = 0.0
    gamma2: float = 0.0
    q: object = 2
    nu1: float = None
    nu2: float = None
    nu3: float = None
    max_iters: int = 10_000
    tol_primal: float = 1e-6
    tol_dual: float = 1e-6
    compositional: bool = False

    def __post_init__(self):
        default = 1.0 if self.compositional else 8.0
        for name in ("nu1", "nu2", "nu3"):
            if getattr(self, name) is None:
                object.__setattr__(self, name, 1.0 if name == "nu3" else default)
        try:
            norm_code(self.q)
        except ValueError as exc:
            raise InvalidConfigError(str(exc)) from None
        if not (self.nu1 > 0 and self.nu2 > 0):
            raise InvalidConfigError("nu1 and nu2 must be positive")
        if self.compositional and not self.nu3 > 0:
            raise InvalidConfigError("nu3 must be positive for compositional fits")
        if not (self.gamma1 >= 0 and self.gamma2 >= 0):
            raise InvalidConfigError("gamma1 and gamma2 must be nonnegative")
        if int(self.max_iters) < 1:
            raise InvalidConfigError("max_iters must be at least 1")
        if not (self.tol_primal >= 0 and self.tol_dual >= 0):
            raise InvalidConfigError("tolerances must be nonnegative")

    def with_gammas(self, gamma1, gamma2):
        return replace(self, gamma1=float(gamma1), gamma2=float(gamma2))


@dataclass
class AdmmState:
    """Primal matrix, splitting variables and duals.

    ``V`` and ``L1`` are |E1| x p (one row per row-edge); ``Z`` and ``L2`` are
    |E2| x n (one row per column-edge); ``L3`` has length n and is only used
    by compositional fits.
    """

    A: np.ndarray
    V: np.ndarray
    Z: np.ndarray
    L1: np.ndarray
    L2: np.ndarray
    L3: np.ndarray
    iter: int = 0

    def copy(self):
        return AdmmState(
            self.A.copy(), self.V.copy(), self.Z.copy(),
            self.L1.copy(), self.L2.copy(), self.L3.copy(), self.iter,
        )


@dataclass
class FitResult:
    A_hat: np.ndarray
    V_final: np.ndarray
    Z_final: np.ndarray
    iterations: int
    primal_residual: float
    dual_residual: float
    objective: float
    converged: bool
    config: AdmmConfig
    state: AdmmState = field(repr=False)


def initial_state(X, rows, cols, config):
    """V and Z start at the data's row/column differences; duals at zero."""
    X = np.asarray(X, dtype=np.float64)
    n, p = X.shape
    XT = X.T
    return AdmmState(
        A=X.copy(),
        V=np.ascontiguousarray(X[rows.heads] - X[rows.tails]),
        Z=np.ascontiguousarray(XT[cols.heads] - XT[cols.tails]),
        L1=np.zeros((len(rows), p)),
        L2=np.zeros((len(cols), n)),
        L3=np.zeros(n),
    )


def assemble_MN(rows, cols, config, n, p):
    """Coefficient matrices of the A-step Sylvester equation."""
    M = np.eye(n) + config.nu1 * _laplacian(rows, n)
    N = config.nu2 * _laplacian(cols, p)
    if config.compositional:
        N = N + config.nu3 * np.ones((p, p))
    return M, N


def _laplacian(es, dim):
    if es.dimension != dim:
        raise ValueError(f"edge set is over {es.dimension} items, expected {dim}")
    return es.laplacian()


def assemble_G(X, V, L1, Z, L2, config, rows, cols, s=None):
    """Right-hand side of the A-step Sylvester equation.

    ``s`` is ``1 + L3 / nu3`` and is required for compositional fits.
    """
    G = np.array(X, dtype=np.float64, copy=True)
    kernels.scatter_edges(np.ascontiguousarray(L1 + config.nu1 * V), rows.heads, rows.tails, G)
    GT = np.ascontiguousarray(G.T)
    kernels.scatter_edges(np.ascontiguousarray(L2 + config.nu2 * Z), cols.heads, cols.tails, GT)
    G = np.ascontiguousarray(GT.T)
    if config.compositional:
        if s is None:
            raise ValueError("compositional fits need s = 1 + L3 / nu3")
        G += config.nu3 * np.asarray(s)[:, None]
    return G


def objective(X, A, rows, cols, gamma1, gamma2, q):
    """Penalized least-squares objective of the convex biclustering problem."""
    X = np.asarray(X, dtype=np.float64)
    A = np.asarray(A, dtype=np.float64)
    fit_term = 0.5 * np.sum((X - A) ** 2)
    row_pen = np.dot(rows.weights, vector_norm(A[rows.heads] - A[rows.tails], q, axis=1)) if len(rows) else 0.0
    AT = A.T
    col_pen = np.dot(cols.weights, vector_norm(AT[cols.heads] - AT[cols.tails], q, axis=1)) if len(cols) else 0.0
    return float(fit_term + gamma1 * row_pen + gamma2 * col_pen)


def residuals(state, prev, config, rows, cols):
    """Primal and dual residuals recomputed from their definitions.

    primal: largest constraint violation over all edge blocks (and the
    row-sum block for compositional fits). dual: ``nu`` times the largest
    change of a splitting-variable block since ``prev``.
    """
    A = state.A
    AT = A.T
    primal = 0.0
    if len(rows):
        r = state.V - (A[rows.heads] - A[rows.tails])
        primal = max(primal, np.sqrt((r * r).sum(axis=1)).max())
    if len(cols):
        r = state.Z - (AT[cols.heads] - AT[cols.tails])
        primal = max(primal, np.sqrt((r * r).sum(axis=1)).max())
    if config.compositional:
        primal = max(primal, float(np.linalg.norm(1.0 - A.sum(axis=1))))
    dual = 0.0
    if len(rows):
        dv = state.V - prev.V
        dual = max(dual, config.nu1 * np.sqrt((dv * dv).sum(axis=1)).max())
    if len(cols):
        dz = state.Z - prev.Z
        dual = max(dual, config.nu2 * np.sqrt((dz * dz).sum(axis=1)).max())
    return float(primal), float(dual)


def _check_inputs(X, rows, cols, config):
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise InputDataError("X must be a 2-d matrix")
    n, p = X.shape
    if n < 2 or p < 2:
        raise InputDataError(f"need at least 2 rows and 2 columns, got {X.shape}")
    if not np.all(np.isfinite(X)):
        raise InputDataError("X has non-finite entries")
    if not isinstance(rows, WeightedEdgeSet) or not isinstance(cols, WeightedEdgeSet):
        raise TypeError("rows and cols must be WeightedEdgeSet instances")
    if rows.dimension != n or cols.dimension != p:
        raise ValueError(
            f"edge sets cover {rows.dimension} rows / {cols.dimension} columns; X is {n} x {p}"
        )
    if config.compositional:
        dev = np.abs(X.sum(axis=1) - 1.0)
        bad = np.flatnonzero(dev > SIMPLEX_TOL)
        if bad.size:
            raise InputDataError(
                f"compositional fit needs rows summing to 1; row {bad[0]} sums to {X[bad[0]].sum():.8g}",
                row=int(bad[0]),
            )
    return X


def fit(X, rows, cols, config, init=None, verify_sylvester=False, callback=None):
    """Run bi-ADMM (or biC-ADMM when ``config.compositional``) to convergence.

    Parameters
    ----------
    X : array_like, shape (n, p)
    rows, cols : WeightedEdgeSet
        Row and column fusion graphs.
    config : AdmmConfig
    init : AdmmState, optional
        Starting point; defaults to :func:`initial_state`. Not modified.
    verify_sylvester : bool
        Assert the Sylvester residual bound after every A-step (slow).
    callback : callable, optional
        Called as ``callback(state, primal, dual)`` after each iteration.

    Returns
    -------
    FitResult
        ``converged`` is False when ``max_iters`` ran out first.
    """
    X = _check_inputs(X, rows, cols, config)
    n, p = X.shape
    M, N = assemble_MN(rows, cols, config, n, p)
    solver = SylvesterSolver(M, N)
    qc = norm_code(config.q)
    nu1, nu2, nu3 = float(config.nu1), float(config.nu2), float(config.nu3)
    sig1 = np.ascontiguousarray(config.gamma1 * rows.weights / nu1)
    sig2 = np.ascontiguousarray(config.gamma2 * cols.weights / nu2)
    h1, t1, h2, t2 = rows.heads, rows.tails, cols.heads, cols.tails

    state = initial_state(X, rows, cols, config) if init is None else init.copy()
    if state.V.shape != (len(rows), p) or state.Z.shape != (len(cols), n):
        raise ValueError("initial state does not match the edge sets")
    V, Z, L1, L2, L3 = state.V, state.Z, state.L1, state.L2, state.L3
    A = state.A

    primal = dual = np.inf
    converged = False
    it = 0
    for it in range(1, int(config.max_iters) + 1):
        G = X.copy()
        kernels.scatter_edges(L1 + nu1 * V, h1, t1, G)
        GT = np.ascontiguousarray(G.T)
        kernels.scatter_edges(L2 + nu2 * Z, h2, t2, GT)
        G = GT.T
        if config.compositional:
            G = G + (nu3 + L3)[:, None]
        A = solver.solve(G)
        if verify_sylvester:
            res = solver.residual(A, G)
            bound = 1e-8 * max(1.0, np.linalg.norm(G))
            if res > bound:
                raise AssertionError(f"Sylvester residual {res:.3e} exceeds {bound:.3e} at iteration {it}")
        if not np.all(np.isfinite(A)):
            raise NonFiniteIterateError(it, "A")

        p1, d1 = kernels.edge_update(A, h1, t1, V, L1, sig1, nu1, qc)
        AT = np.ascontiguousarray(A.T)
        p2, d2 = kernels.edge_update(AT, h2, t2, Z, L2, sig2, nu2, qc)
        primal = max(p1, p2)
        if config.compositional:
            gap = 1.0 - A.sum(axis=1)
            L3 += nu3 * gap
            primal = max(primal, float(np.sqrt(gap @ gap)))
        dual = max(d1, d2)
        if not (np.isfinite(primal) and np.isfinite(dual)):
            if not (np.isfinite(p1) and np.isfinite(d1)):
                raise NonFiniteIterateError(it, "V/L1")
            if not (np.isfinite(p2) and np.isfinite(d2)):
                raise NonFiniteIterateError(it, "Z/L2")
            raise NonFiniteIterateError(it, "L3")
        if callback is not None:
            state.A = A
            state.iter = it
            callback(state, primal, dual)
        if primal <= config.tol_primal and dual <= config.tol_dual:
            converged = True
            break

    state.A = A
    state.iter = it
    if not converged:
        logger.info("ADMM stopped at max_iters=%d (primal %.3e, dual %.3e)", it, primal, dual)
    return FitResult(
        A_hat=A,
        V_final=V,
        Z_final=Z,
        iterations=it,
        primal_residual=float(primal),
        dual_residual=float(dual),
        objective=objective(X, A, rows, cols, config.gamma1, config.gamma2, config.q),
        converged=converged,
        config=config,
        state=state,
    )
