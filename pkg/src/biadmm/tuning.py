"""Choosing (gamma1, gamma2): hold-out validation, stability, ARI oracle.

Every grid point is an independent cold-started fit, so reports do not
depend on the order in which points are evaluated. Ties in the score go to
the larger ``gamma1 + gamma2`` (then the larger ``gamma1``).
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from .admm import AdmmConfig, fit
from .clusters import BiclusterLabels, adjusted_rand_index, agreement_ari, ari_report, extract_labels
from .graph import EdgeRecipe, rescale_single_gamma

HOLDOUT, STABILITY, ARI_ORACLE = "holdout", "stability", "ari_oracle"
MAX_MASK_DRAWS = 10
MAX_BOOTSTRAP_DRAWS = 100


def _strictly_ascending(values, name):
    values = tuple(float(v) for v in values)
    if not values:
        raise ValueError(f"{name} must be nonempty")
    if any(v < 0 or not np.isfinite(v) for v in values):
        raise ValueError(f"{name} must be finite and nonnegative")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError(f"{name} must be strictly ascending")
    return values


@dataclass(frozen=True)
class TuningGrid:
    """Candidate penalty levels.

    With ``single=True`` the grid is the diagonal ``gamma1 == gamma2`` over
    ``gamma1_values`` and fits use weights rescaled for a shared penalty.
    """

    gamma1_values: tuple
    gamma2_values: tuple = None
    single: bool = False

    def __post_init__(self):
        g1 = _strictly_ascending(self.gamma1_values, "gamma1_values")
        object.__setattr__(self, "gamma1_values", g1)
        if self.single:
            object.__setattr__(self, "gamma2_values", g1)
        else:
            if self.gamma2_values is None:
                raise ValueError("gamma2_values required for a two-parameter grid")
            object.__setattr__(self, "gamma2_values", _strictly_ascending(self.gamma2_values, "gamma2_values"))

    @classmethod
    def log_spaced(cls, lo, hi, num=20, single=False, lo2=None, hi2=None, num2=None):
        g1 = np.logspace(np.log10(lo), np.log10(hi), num)
        if single:
            return cls(tuple(g1), single=True)
        g2 = np.logspace(np.log10(lo2 or lo), np.log10(hi2 or hi), num2 or num)
        return cls(tuple(g1), tuple(g2))

    def points(self):
        if self.single:
            return [(g, g) for g in self.gamma1_values]
        return list(itertools.product(self.gamma1_values, self.gamma2_values))

    def __len__(self):
        return len(self.gamma1_values) if self.single else len(self.gamma1_values) * len(self.gamma2_values)


@dataclass
class TuningReport:
    method: str
    scores: list
    selected: tuple
    best_score: float
    extras: dict = field(default_factory=dict)

    def score_table(self):
        """Rows of ``(gamma1, gamma2, score)`` in grid order."""
        return [(s["gamma1"], s["gamma2"], s["score"]) for s in self.scores]


def _select(scores, maximize):
    def key(s):
        val = s["score"] if maximize else -s["score"]
        return (val, s["gamma1"] + s["gamma2"], s["gamma1"])

    best = max(scores, key=key)
    return (best["gamma1"], best["gamma2"]), best["score"]


def single_gamma_mode(rows, cols, n, p, gamma):
    """Shared-penalty formulation: rescaled weights and ``gamma1 = gamma2 = gamma``."""
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    r, c = rescale_single_gamma(rows, cols, n, p)
    return float(gamma), float(gamma), r, c


def _edges_for(grid, rows, cols, n, p, recipe_rescaled):
    if grid.single and not recipe_rescaled:
        return rescale_single_gamma(rows, cols, n, p)
    return rows, cols


def _draw_mask(rng, shape, frac):
    n, p = shape
    count = max(1, int(round(frac * n * p)))
    for _ in range(MAX_MASK_DRAWS):
        flat = rng.choice(n * p, size=count, replace=False)
        mask = np.zeros(n * p, dtype=bool)
        mask[flat] = True
        mask = mask.reshape(shape)
        if not np.any(mask.all(axis=0)):
            return mask
    raise ValueError(f"hold-out mask covered a whole column in {MAX_MASK_DRAWS} draws")


def holdout_validate(X, rows, cols, grid, holdout_frac=0.1, seed=0, config=None):
    """Score each grid point by prediction error on held-out entries.

    A uniform random subset of entries is masked and replaced by the mean of
    the observed entries in its column; the fit's values at the masked cells
    are compared with the true ones (mean squared error, lower is better).
    """
    X = np.asarray(X, dtype=np.float64)
    if not 0 < holdout_frac < 0.5:
        raise ValueError("holdout_frac must be in (0, 0.5)")
    config = config or AdmmConfig()
    rng = np.random.default_rng(seed)
    mask = _draw_mask(rng, X.shape, holdout_frac)
    observed = np.where(mask, 0.0, X)
    col_means = observed.sum(axis=0) / (~mask).sum(axis=0)
    X_imp = np.where(mask, col_means[None, :], X)
    n, p = X.shape
    rows, cols = _edges_for(grid, rows, cols, n, p, False)
    scores = []
    for g1, g2 in grid.points():
        res = fit(X_imp, rows, cols, config.with_gammas(g1, g2))
        err = float(np.mean((res.A_hat[mask] - X[mask]) ** 2))
        scores.append({"gamma1": g1, "gamma2": g2, "score": err, "converged": res.converged})
    selected, best = _select(scores, maximize=False)
    return TuningReport(HOLDOUT, scores, selected, best, {"n_masked": int(mask.sum())})


def _bootstrap_rows(rng, n):
    for _ in range(MAX_BOOTSTRAP_DRAWS):
        idx = rng.integers(0, n, size=n)
        if np.unique(idx).size >= 2:
            return idx
    raise RuntimeError("could not draw a non-degenerate bootstrap sample")


def stability_select(X, grid, recipe=None, repetitions=50, seed=0, config=None, eps=1e-6):
    """Pick the grid point whose column clustering is most reproducible.

    Each repetition draws two bootstrap row-resamples of X, rebuilds the edge
    sets on each, fits both at every grid point and records the ARI of the two
    column partitions. Comparisons between two trivial partitions (both
    all-singleton or both one-cluster) count as 0. Scores are averaged over
    repetitions; the largest wins.
    """
    X = np.asarray(X, dtype=np.float64)
    if repetitions < 2:
        raise ValueError("repetitions must be at least 2")
    config = config or AdmmConfig()
    recipe = recipe or EdgeRecipe()
    if grid.single and not recipe.single_gamma:
        recipe = EdgeRecipe(recipe.m1, recipe.m2, recipe.phi, recipe.full_graph, recipe.normalize, True)
    n = X.shape[0]
    points = grid.points()
    totals = np.zeros(len(points))
    streams = np.random.SeedSequence(seed).spawn(repetitions)
    for ss in streams:
        rng = np.random.default_rng(ss)
        samples = []
        for _ in range(2):
            Xb = X[_bootstrap_rows(rng, n)]
            samples.append((Xb, *recipe.build(Xb)))
        for i, (g1, g2) in enumerate(points):
            cfg = config.with_gammas(g1, g2)
            labs = []
            for Xb, r, c in samples:
                res = fit(Xb, r, c, cfg)
                labs.append(extract_labels(res, r, c, eps).col_labels)
            totals[i] += agreement_ari(labs[0], labs[1])
    means = totals / repetitions
    scores = [{"gamma1": g1, "gamma2": g2, "score": float(s)} for (g1, g2), s in zip(points, means)]
    selected, best = _select(scores, maximize=True)
    return TuningReport(STABILITY, scores, selected, best, {"repetitions": repetitions})


def ari_oracle_tune(X_train, X_valid, truth, grid, recipe=None, config=None, eps=1e-6):
    """Simulation-only tuning: maximize product-cell ARI against known labels.

    Every grid point is fit on ``X_valid``; the best point is then applied to
    ``X_train`` (when given), and that fit's ARIs land in ``extras``.
    """
    if not isinstance(truth, BiclusterLabels):
        raise TypeError("truth must be BiclusterLabels")
    config = config or AdmmConfig()
    recipe = recipe or EdgeRecipe()
    if grid.single and not recipe.single_gamma:
        recipe = EdgeRecipe(recipe.m1, recipe.m2, recipe.phi, recipe.full_graph, recipe.normalize, True)
    rows, cols = recipe.build(X_valid)
    scores = []
    for g1, g2 in grid.points():
        res = fit(X_valid, rows, cols, config.with_gammas(g1, g2))
        lab = extract_labels(res, rows, cols, eps)
        ari = adjusted_rand_index(lab.product_labels(), truth.product_labels())
        scores.append({"gamma1": g1, "gamma2": g2, "score": ari,
                       "n_row_clusters": lab.n_row_clusters, "n_col_clusters": lab.n_col_clusters})
    selected, best = _select(scores, maximize=True)
    extras = {}
    if X_train is not None:
        r_t, c_t = recipe.build(X_train)
        res = fit(X_train, r_t, c_t, config.with_gammas(*selected))
        lab = extract_labels(res, r_t, c_t, eps)
        extras = {f"train_{k}": v for k, v in ari_report(lab, truth).items()}
        extras["train_converged"] = res.converged
    return TuningReport(ARI_ORACLE, scores, selected, best, extras)
