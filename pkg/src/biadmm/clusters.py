"""Row/column cluster labels from a fit, and the adjusted Rand index."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import comb


@dataclass(frozen=True)
class BiclusterLabels:
    row_labels: np.ndarray
    col_labels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "row_labels", canonical_labels(self.row_labels))
        object.__setattr__(self, "col_labels", canonical_labels(self.col_labels))

    @property
    def n_row_clusters(self):
        return int(self.row_labels.max()) + 1 if self.row_labels.size else 0

    @property
    def n_col_clusters(self):
        return int(self.col_labels.max()) + 1 if self.col_labels.size else 0

    def product_labels(self):
        """One label per matrix cell: its (row cluster, column cluster) pair."""
        return canonical_labels(
            (self.row_labels[:, None] * self.n_col_clusters + self.col_labels[None, :]).ravel()
        )


def canonical_labels(labels):
    """Relabel to 0, 1, 2, ... in order of first occurrence."""
    labels = np.asarray(labels).ravel()
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(first.size)
    return rank[inverse.ravel()]


def connected_components(dimension, edges):
    """Union-find components over ``dimension`` items, canonically labelled."""
    parent = list(range(dimension))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in edges:
        ra, rb = find(int(a)), find(int(b))
        if ra != rb:
            if ra < rb:
                parent[rb] = ra
            else:
                parent[ra] = rb
    return canonical_labels([find(i) for i in range(dimension)])


def fusion_threshold(A_hat, eps):
    n, p = A_hat.shape
    return eps * max(1.0, np.linalg.norm(A_hat) / math.sqrt(n * p))


def extract_labels(result, rows, cols, eps=1e-6):
    """Clusters = connected components of edges whose splitting variable vanished.

    A row edge ``l`` fuses its endpoints when ``||V[l]||_2`` is at most
    ``eps * max(1, ||A_hat||_F / sqrt(n p))``; column edges likewise via Z.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    thr = fusion_threshold(result.A_hat, eps)
    v_norm = np.sqrt((result.V_final ** 2).sum(axis=1)) if len(rows) else np.zeros(0)
    z_norm = np.sqrt((result.Z_final ** 2).sum(axis=1)) if len(cols) else np.zeros(0)
    row_lab = connected_components(rows.dimension, rows.edges[v_norm <= thr])
    col_lab = connected_components(cols.dimension, cols.edges[z_norm <= thr])
    return BiclusterLabels(row_lab, col_lab)


def _pair_sums(a, b):
    a = canonical_labels(a)
    b = canonical_labels(b)
    table = np.zeros((a.max() + 1, b.max() + 1), dtype=np.int64)
    np.add.at(table, (a, b), 1)
    sum_ij = comb(table, 2).sum()
    sum_a = comb(table.sum(axis=1), 2).sum()
    sum_b = comb(table.sum(axis=0), 2).sum()
    return sum_ij, sum_a, sum_b, comb(a.size, 2)


def adjusted_rand_index(a, b):
    """Hubert-Arabie adjusted Rand index of two partitions of the same items.

    Returns 1.0 when the partitions are identical and the index is 0/0.
    """
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if a.size != b.size:
        raise ValueError(f"label vectors differ in length: {a.size} vs {b.size}")
    if a.size < 2:
        raise ValueError("need at least 2 items")
    sum_ij, sum_a, sum_b, total = _pair_sums(a, b)
    expected = sum_a * sum_b / total
    denom = 0.5 * (sum_a + sum_b) - expected
    if denom == 0:
        return 1.0 if np.array_equal(canonical_labels(a), canonical_labels(b)) else 0.0
    return float((sum_ij - expected) / denom)


def agreement_ari(a, b):
    """ARI that scores a degenerate 0/0 comparison as 0 instead of 1.

    Two all-singleton (or two single-cluster) partitions carry no evidence
    of structure; counting them as perfect agreement would make the trivial
    ends of a tuning grid look maximally stable.
    """
    sum_ij, sum_a, sum_b, total = _pair_sums(a, b)
    expected = sum_a * sum_b / total
    denom = 0.5 * (sum_a + sum_b) - expected
    if denom == 0:
        return 0.0
    return float((sum_ij - expected) / denom)


def ari_report(estimated, truth):
    """Row, column and product-cell ARIs of ``estimated`` against ``truth``."""
    return {
        "ari_rows": adjusted_rand_index(estimated.row_labels, truth.row_labels),
        "ari_cols": adjusted_rand_index(estimated.col_labels, truth.col_labels),
        "ari_product": adjusted_rand_index(estimated.product_labels(), truth.product_labels()),
    }
