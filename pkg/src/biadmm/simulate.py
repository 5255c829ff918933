"""Synthetic data: Gaussian checkerboards and manipulated microbiome compositions."""

from dataclasses import dataclass, field

import numpy as np

from .clusters import BiclusterLabels

MEAN_LEVELS = np.arange(-10, 11, dtype=np.float64)
MAX_LABEL_DRAWS = 100
MAX_SAMPLE_DRAWS = 1000

ENLARGED, SHRUNK, UNCHANGED = "enlarged", "shrunk", "unchanged"
GROUP_CODES = {ENLARGED: 0, SHRUNK: 1, UNCHANGED: 2}


@dataclass(frozen=True)
class CheckerboardSpec:
    n: int = 50
    p: int = 40
    K: int = 4
    R: int = 4
    sigma: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if not (1 <= self.K <= self.n and 1 <= self.R <= self.p):
            raise ValueError("need 1 <= K <= n and 1 <= R <= p")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")


def _labels_with_all_clusters(rng, size, k):
    for _ in range(MAX_LABEL_DRAWS):
        lab = rng.integers(0, k, size=size)
        if np.unique(lab).size == k:
            return lab
    raise RuntimeError(f"could not realize {k} non-empty clusters over {size} items")


def draw_checkerboard_design(spec, rng):
    """Row labels, column labels and the K x R block means."""
    rl = _labels_with_all_clusters(rng, spec.n, spec.K)
    cl = _labels_with_all_clusters(rng, spec.p, spec.R)
    mu = rng.choice(MEAN_LEVELS, size=(spec.K, spec.R))
    return rl, cl, mu


def gen_checkerboard(spec):
    """Gaussian checkerboard data with uniform cluster labels.

    Each block mean is drawn uniformly from the integers -10..10 and every
    entry gets independent N(0, sigma^2) noise. Labels that would leave a
    cluster empty are redrawn.

    Returns
    -------
    X : ndarray, shape (n, p)
    truth : BiclusterLabels
    """
    rng = np.random.default_rng(spec.seed)
    rl, cl, mu = draw_checkerboard_design(spec, rng)
    X = mu[rl][:, cl] + spec.sigma * rng.standard_normal((spec.n, spec.p))
    return X, BiclusterLabels(rl, cl)


def gen_checkerboard_pair(spec):
    """Training and validation matrices sharing labels and block means.

    The validation copy has independent noise; it is what ARI-based tuning
    scores against.
    """
    rng = np.random.default_rng(spec.seed)
    rl, cl, mu = draw_checkerboard_design(spec, rng)
    mean = mu[rl][:, cl]
    train = mean + spec.sigma * rng.standard_normal((spec.n, spec.p))
    valid = mean + spec.sigma * rng.standard_normal((spec.n, spec.p))
    return train, valid, BiclusterLabels(rl, cl)


def default_proportion_means():
    """24 taxa: 6 rare (total 0.03), 13 middle (total 0.10), 5 dominant (total 0.87).

    Sorted ascending so the group boundaries follow abundance order.
    """
    rare = np.linspace(0.004, 0.006, 6)
    middle = np.linspace(0.0065, 0.1 / 13 * 2 - 0.0065, 13)
    dominant = np.array([0.05, 0.10, 0.17, 0.25, 0.30])
    means = np.concatenate([rare, middle, dominant])
    return means / means.sum()


def default_groups():
    return (ENLARGED,) * 6 + (UNCHANGED,) * 13 + (SHRUNK,) * 5


@dataclass(frozen=True)
class CompositionalSpec:
    """Dirichlet-multinomial counts with a group-ratio manipulation.

    ``dispersion`` is the overdispersion theta of the DM model; the Dirichlet
    concentration is ``(1 - theta) / theta``.
    """

    n_control: int = 50
    n_treatment: int = 50
    proportion_means: np.ndarray = field(default_factory=default_proportion_means)
    dispersion: float = 0.01
    reads_per_sample: int = 10_000
    groups: tuple = field(default_factory=default_groups)
    ratio_fold_reduction: float = 1400.0
    seed: int = 0

    def __post_init__(self):
        pm = np.asarray(self.proportion_means, dtype=np.float64)
        object.__setattr__(self, "proportion_means", pm)
        if pm.ndim != 1 or np.any(pm <= 0) or abs(pm.sum() - 1.0) > 1e-10:
            raise ValueError("proportion_means must be a positive vector summing to 1")
        if len(self.groups) != pm.size:
            raise ValueError("need one group label per taxon")
        unknown = set(self.groups) - set(GROUP_CODES)
        if unknown:
            raise ValueError(f"unknown group labels {sorted(unknown)}")
        if not (0 < self.dispersion < 1):
            raise ValueError("dispersion must be in (0, 1)")
        if self.reads_per_sample < 1:
            raise ValueError("reads_per_sample must be at least 1")
        if not self.ratio_fold_reduction > 0:
            raise ValueError("ratio_fold_reduction must be positive")
        if self.n_control < 0 or self.n_treatment < 0 or self.n_control + self.n_treatment < 1:
            raise ValueError("need at least one sample")

    @property
    def concentration(self):
        return (1.0 - self.dispersion) / self.dispersion

    @property
    def group_codes(self):
        return np.array([GROUP_CODES[g] for g in self.groups])


def draw_dm_counts(rng, spec):
    alpha = spec.proportion_means * spec.concentration
    probs = rng.dirichlet(alpha)
    return rng.multinomial(spec.reads_per_sample, probs).astype(np.float64)


def manipulate_counts(counts, groups, fold):
    """Cut the shrunk/enlarged count ratio by ``fold``, keeping their total.

    Returns None when either group has zero counts (ratio undefined).
    """
    enl = groups == GROUP_CODES[ENLARGED]
    shr = groups == GROUP_CODES[SHRUNK]
    c_enl = counts[enl].sum()
    c_shr = counts[shr].sum()
    if c_enl <= 0 or c_shr <= 0:
        return None
    ratio = (c_shr / c_enl) / fold
    total = c_enl + c_shr
    new_enl = total / (1.0 + ratio)
    new_shr = total - new_enl
    out = counts.copy()
    out[enl] *= new_enl / c_enl
    out[shr] *= new_shr / c_shr
    return out


def gen_compositional(spec):
    """Relative abundances for control and manipulated treatment samples.

    Rows are control samples first, then treatment samples. Rescaled counts
    stay real-valued before normalization.

    Returns
    -------
    X : ndarray, shape (n_control + n_treatment, n_taxa)
    truth : BiclusterLabels
        rows: 0 control, 1 treatment; columns: taxon group.
    """
    rng = np.random.default_rng(spec.seed)
    groups = spec.group_codes
    rows = []
    for _ in range(spec.n_control):
        c = draw_dm_counts(rng, spec)
        rows.append(c / c.sum())
    for _ in range(spec.n_treatment):
        for _ in range(MAX_SAMPLE_DRAWS):
            c = manipulate_counts(draw_dm_counts(rng, spec), groups, spec.ratio_fold_reduction)
            if c is not None:
                break
        else:
            raise RuntimeError("could not draw a treatment sample with both groups present")
        rows.append(c / c.sum())
    X = np.vstack(rows)
    row_truth = np.r_[np.zeros(spec.n_control, dtype=int), np.ones(spec.n_treatment, dtype=int)]
    return X, BiclusterLabels(row_truth, groups)
