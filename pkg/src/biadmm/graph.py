"""Fusion edge sets over rows or columns and their kernel weights."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist


@dataclass(frozen=True)
class WeightedEdgeSet:
    """Edges ``(a, b)`` with ``a < b`` over ``dimension`` items, plus weights."""

    edges: np.ndarray
    weights: np.ndarray
    dimension: int

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        weights = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if edges.shape[0] != weights.shape[0]:
            raise ValueError("edges and weights must have the same length")
        if not np.all(np.isfinite(weights)) or np.any(weights < 0):
            raise ValueError("weights must be finite and nonnegative")
        if edges.size:
            if np.any(edges[:, 0] >= edges[:, 1]):
                raise ValueError("every edge must satisfy a < b")
            if edges.min() < 0 or edges.max() >= self.dimension:
                raise ValueError("edge index out of range")
            keys = edges[:, 0] * self.dimension + edges[:, 1]
            if np.unique(keys).size != keys.size:
                raise ValueError("duplicate edge")
        keep = weights > 0
        object.__setattr__(self, "edges", np.ascontiguousarray(edges[keep]))
        object.__setattr__(self, "weights", np.ascontiguousarray(weights[keep]))
        object.__setattr__(self, "dimension", int(self.dimension))

    def __len__(self):
        return self.edges.shape[0]

    @property
    def heads(self):
        return self.edges[:, 0]

    @property
    def tails(self):
        return self.edges[:, 1]

    @property
    def total_weight(self):
        return float(self.weights.sum())

    def laplacian(self):
        """Unit-weight incidence Gram ``sum_l (e_a - e_b)(e_a - e_b)^T``."""
        L = np.zeros((self.dimension, self.dimension))
        a, b = self.heads, self.tails
        np.add.at(L, (a, a), 1.0)
        np.add.at(L, (b, b), 1.0)
        np.add.at(L, (a, b), -1.0)
        np.add.at(L, (b, a), -1.0)
        return L

    def relabel(self, perm):
        """Edge set after moving item ``i`` to position ``perm[i]``."""
        perm = np.asarray(perm)
        mapped = perm[self.edges]
        lo = mapped.min(axis=1)
        hi = mapped.max(axis=1)
        order = np.lexsort((hi, lo))
        return WeightedEdgeSet(np.column_stack([lo, hi])[order], self.weights[order], self.dimension)


def full_edge_set(dimension):
    """Complete graph on ``dimension`` items with unit weights."""
    if dimension < 2:
        raise ValueError("need at least 2 items for an edge set")
    a, b = np.triu_indices(dimension, k=1)
    return WeightedEdgeSet(np.column_stack([a, b]), np.ones(a.size), dimension)


def build_knn_weights(X, axis="row", m=5, phi=1.0):
    """Gaussian-kernel weights on the symmetrized m-nearest-neighbour graph.

    An edge (a, b) is kept when b is among a's ``m`` nearest neighbours or a is
    among b's, in squared Euclidean distance; its weight is
    ``exp(-phi * d2(a, b))``. Distance ties are broken toward the lower index.
    Weights that underflow to zero are dropped.

    Parameters
    ----------
    X : array_like, shape (n, p)
    axis : {'row', 'column'}
        Items are the rows (observations) or the columns (features) of X.
    m : int
        Neighbour count, ``1 <= m < dimension``.
    phi : float
        Kernel scale, ``phi >= 0``.
    """
    X = np.asarray(X, dtype=np.float64)
    if axis in ("row", "rows", 0):
        items = X
    elif axis in ("column", "columns", "col", 1):
        items = X.T
    else:
        raise ValueError(f"axis must be 'row' or 'column', got {axis!r}")
    dim = items.shape[0]
    if dim < 2:
        raise ValueError("need at least 2 items to build weights")
    if m < 1 or m >= dim:
        raise ValueError(f"neighbour count m={m} must satisfy 1 <= m < {dim}")
    if phi < 0:
        raise ValueError("phi must be nonnegative")
    d2 = cdist(items, items, "sqeuclidean")
    ranked = np.where(np.eye(dim, dtype=bool), np.inf, d2)
    nbrs = np.argsort(ranked, axis=1, kind="stable")[:, :m]
    src = np.repeat(np.arange(dim), m)
    dst = nbrs.ravel()
    lo = np.minimum(src, dst)
    hi = np.maximum(src, dst)
    keys = np.unique(lo * dim + hi)
    a, b = keys // dim, keys % dim
    w = np.exp(-phi * d2[a, b])
    return WeightedEdgeSet(np.column_stack([a, b]), w, dim)


def rescale_single_gamma(rows, cols, n, p):
    """Rescale so row weights sum to 1/sqrt(p) and column weights to 1/sqrt(n)."""
    out = []
    for es, target in ((rows, 1.0 / math.sqrt(p)), (cols, 1.0 / math.sqrt(n))):
        total = es.total_weight
        if not total > 0:
            raise ValueError("cannot rescale an edge set with zero total weight")
        out.append(WeightedEdgeSet(es.edges, es.weights * (target / total), es.dimension))
    return out[0], out[1]


def normalize_frobenius(X):
    """Centre by the grand mean and scale to unit Frobenius norm."""
    X = np.asarray(X, dtype=np.float64)
    Xc = X - X.mean()
    nrm = np.linalg.norm(Xc)
    return Xc / nrm if nrm > 0 else Xc


@dataclass(frozen=True)
class EdgeRecipe:
    """How to build row/column edge sets from a data matrix.

    ``normalize=True`` computes distances on the centred, unit-Frobenius
    version of the data (the weights only; the fit itself sees the data it is
    given). ``single_gamma=True`` applies :func:`rescale_single_gamma`.
    """

    m1: int = 5
    m2: int = 5
    phi: float = 1.0
    full_graph: bool = False
    normalize: bool = False
    single_gamma: bool = False

    def build(self, X):
        X = np.asarray(X, dtype=np.float64)
        n, p = X.shape
        if self.full_graph:
            rows, cols = full_edge_set(n), full_edge_set(p)
        else:
            base = normalize_frobenius(X) if self.normalize else X
            rows = build_knn_weights(base, "row", min(self.m1, n - 1), self.phi)
            cols = build_knn_weights(base, "column", min(self.m2, p - 1), self.phi)
        if self.single_gamma:
            rows, cols = rescale_single_gamma(rows, cols, n, p)
        return rows, cols
