"""Nonlinear feature selection with Nystrom-approximated HSIC Lasso.

Features are scored by normalized HSIC against the target and against each
other, and selected with a non-negative least-angle regression walk, so the
chosen set is relevant to the output and low in redundancy.
"""

from land._backend import BACKEND
from land.dataio import Dataset, load_dataset, split, synth_generate
from land.kernelmap import KernelConfig, Target, build_feature_map, build_output_map
from land.metrics import auc, independence_rate, pearson, screen_mr_nhsic
from land.numerics import ValidationError
from land.scoring import EngineConfig, FeatureMaps, nhsic_approx, nhsic_exact
from land.solver import SelectionPath, hsic_lasso_naive, land_select, objective_value

__all__ = [
    "BACKEND",
    "Dataset",
    "EngineConfig",
    "FeatureMaps",
    "KernelConfig",
    "SelectionPath",
    "Target",
    "ValidationError",
    "auc",
    "build_feature_map",
    "build_output_map",
    "hsic_lasso_naive",
    "independence_rate",
    "land_select",
    "load_dataset",
    "nhsic_approx",
    "nhsic_exact",
    "objective_value",
    "pearson",
    "screen_mr_nhsic",
    "select_features",
    "split",
    "synth_generate",
]


def select_features(X, y, m, kernel=None, engine=None):
    """Run LAND on a d x n matrix ``X`` and target ``y`` (array or Target)."""
    kernel = kernel or KernelConfig()
    engine = engine or EngineConfig()
    maps = FeatureMaps.build(X, kernel, engine)
    return land_select(maps, build_output_map(y, kernel), m, engine)
