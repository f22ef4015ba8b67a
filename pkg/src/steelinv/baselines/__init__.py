"""Conventional inverse baselines."""

from .direct import DirectInverseModel, train_direct_inverse
from .forest import (
    Forest,
    ForestModel,
    ForestParams,
    LeafNode,
    SplitNode,
    fit_forest,
    fit_tree,
    predict_forest,
    predict_tree,
)

__all__ = [
    "DirectInverseModel",
    "Forest",
    "ForestModel",
    "ForestParams",
    "LeafNode",
    "SplitNode",
    "fit_forest",
    "fit_tree",
    "predict_forest",
    "predict_tree",
    "train_direct_inverse",
]
