"""Proximal maps of ``sigma * ||.||_q`` for q in {1, 2, inf}."""

from dataclasses import dataclass

import numpy as np

from .kernels import NORM_L1, NORM_L2, NORM_LINF
from .kernels._numpy import l1_ball_threshold_rows

_NORM_ALIASES = {
    1: NORM_L1,
    "1": NORM_L1,
    "l1": NORM_L1,
    2: NORM_L2,
    "2": NORM_L2,
    "l2": NORM_L2,
    np.inf: NORM_LINF,
    "inf": NORM_LINF,
    "linf": NORM_LINF,
}


def norm_code(q):
    """Map ``1``, ``2``, ``np.inf`` or ``'l1'``/``'l2'``/``'linf'`` to a kernel code."""
    key = q.lower() if isinstance(q, str) else q
    try:
        return _NORM_ALIASES[key]
    except (KeyError, TypeError):
        raise ValueError(f"unsupported norm {q!r}; use 1, 2 or inf") from None


def vector_norm(x, q, axis=-1):
    """L_q norm along ``axis`` for q in {1, 2, inf}."""
    code = norm_code(q)
    if code == NORM_L1:
        return np.abs(x).sum(axis=axis)
    if code == NORM_L2:
        return np.sqrt((x * x).sum(axis=axis))
    return np.abs(x).max(axis=axis, initial=0.0)


@dataclass(frozen=True)
class ProxSpec:
    q: object
    sigma: float

    def __post_init__(self):
        norm_code(self.q)
        if not self.sigma >= 0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma}")


def project_l1_ball(u, radius):
    """Euclidean projection of ``u`` onto ``{x : ||x||_1 <= radius}``."""
    u = np.asarray(u, dtype=np.float64)
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    if np.abs(u).sum() <= radius:
        return u.copy()
    if radius == 0:
        return np.zeros_like(u)
    absu = np.abs(u)
    tau = l1_ball_threshold_rows(absu[None, :], np.array([float(radius)]))[0]
    return np.sign(u) * np.maximum(absu - tau, 0.0)


def prox(u, spec):
    """Minimizer of ``spec.sigma * ||v||_q + 0.5 * ||u - v||^2`` over v.

    q=1 soft-thresholds each entry, q=2 shrinks the whole block toward zero,
    q=inf uses the Moreau decomposition ``u - P(u)`` with P the projection onto
    the L1 ball of radius sigma.
    """
    u = np.asarray(u, dtype=np.float64)
    code = norm_code(spec.q)
    sigma = float(spec.sigma)
    if sigma == 0.0:
        return u.copy()
    if code == NORM_L1:
        return np.sign(u) * np.maximum(np.abs(u) - sigma, 0.0)
    if code == NORM_L2:
        nrm = np.linalg.norm(u)
        if nrm <= sigma:
            return np.zeros_like(u)
        return (1.0 - sigma / nrm) * u
    return u - project_l1_ball(u, sigma)


def prox_objective(v, u, spec):
    """``sigma * ||v||_q + 0.5 * ||u - v||^2``."""
    v = np.asarray(v, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    return spec.sigma * vector_norm(v, spec.q) + 0.5 * np.sum((u - v) ** 2)
