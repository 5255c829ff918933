"""Convex biclustering by ADMM with a Sylvester-equation A-step.

``fit`` runs bi-ADMM on general matrices and biC-ADMM (rows constrained to
the simplex) when ``AdmmConfig(compositional=True)``.
"""

from ._backend import BACKEND
from .admm import (
    AdmmConfig,
    AdmmState,
    FitResult,
    InputDataError,
    InvalidConfigError,
    NonFiniteIterateError,
    fit,
    initial_state,
    objective,
)
from .clusters import BiclusterLabels, adjusted_rand_index, agreement_ari, ari_report, extract_labels
from .graph import (
    EdgeRecipe,
    WeightedEdgeSet,
    build_knn_weights,
    full_edge_set,
    normalize_frobenius,
    rescale_single_gamma,
)
from .prox import ProxSpec, project_l1_ball, prox
from .simulate import CheckerboardSpec, CompositionalSpec, gen_checkerboard, gen_checkerboard_pair, gen_compositional
from .sylvester import SylvesterSolver, kron_oracle, solve_sylvester, sym_eigen
from .tuning import TuningGrid, TuningReport, ari_oracle_tune, holdout_validate, single_gamma_mode, stability_select

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AdmmConfig",
    "AdmmState",
    "BiclusterLabels",
    "CheckerboardSpec",
    "CompositionalSpec",
    "EdgeRecipe",
    "FitResult",
    "InputDataError",
    "InvalidConfigError",
    "NonFiniteIterateError",
    "ProxSpec",
    "SylvesterSolver",
    "TuningGrid",
    "TuningReport",
    "WeightedEdgeSet",
    "adjusted_rand_index",
    "agreement_ari",
    "ari_oracle_tune",
    "ari_report",
    "build_knn_weights",
    "extract_labels",
    "fit",
    "full_edge_set",
    "gen_checkerboard",
    "gen_checkerboard_pair",
    "gen_compositional",
    "holdout_validate",
    "initial_state",
    "kron_oracle",
    "normalize_frobenius",
    "objective",
    "project_l1_ball",
    "prox",
    "rescale_single_gamma",
    "single_gamma_mode",
    "solve_sylvester",
    "stability_select",
    "sym_eigen",
]
