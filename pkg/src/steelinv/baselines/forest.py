"""Multi-output regression forest (CART trees on bootstrap resamples).

Splits minimize the summed squared deviation of all outputs across the two
children. A node becomes a leaf at ``max_depth``, when it cannot be cut into
two children of at least ``min_leaf`` rows, or when no cut lowers the error.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence, Union

import numpy as np

from ..data.dataset import Dataset
from ..data.scaler import Scaler
from ..errors import ModelFormatError, NotFittedError
from ..training.base import BaseInverseModel


@dataclass
class ForestParams:
    """Forest hyperparameters (fixed defaults, no search)."""
    n_trees: int = 100
    max_depth: int = 12
    min_leaf: int = 2
    features_per_split: int = 1
    bootstrap: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1 or self.min_leaf < 1 or self.features_per_split < 1:
            raise ValueError("n_trees, min_leaf and features_per_split must be positive")
        if self.max_depth < 0:
            raise ValueError("max_depth must be non-negative")


@dataclass(eq=False)
class LeafNode:
    mean_vector: np.ndarray
    n_samples: int


@dataclass(eq=False)
class SplitNode:
    feature_index: int
    threshold: float
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Union[LeafNode, SplitNode]


def _sse(y: np.ndarray) -> float:
    return float(np.sum((y - y.mean(axis=0)) ** 2))


def _best_cut(column: np.ndarray, y: np.ndarray, min_leaf: int) -> Optional[tuple[float, float]]:
    """(sse, threshold) of the best admissible cut on one input column."""
    order = np.argsort(column, kind="stable")
    xs, ys = column[order], y[order]
    n = xs.shape[0]
    if n < 2:
        return None
    csum = np.cumsum(ys, axis=0)
    csq = np.cumsum(ys * ys, axis=0)
    k = np.arange(1, n)[:, None]
    left_sum, left_sq = csum[:-1], csq[:-1]
    right_sum, right_sq = csum[-1] - left_sum, csq[-1] - left_sq
    sse = (left_sq - left_sum ** 2 / k).sum(axis=1) + (right_sq - right_sum ** 2 / (n - k)).sum(axis=1)

    sizes = k[:, 0]
    valid = (xs[1:] > xs[:-1]) & (sizes >= min_leaf) & (n - sizes >= min_leaf)
    if not valid.any():
        return None
    best = int(np.argmin(np.where(valid, sse, np.inf)))
    threshold = (xs[best] + xs[best + 1]) / 2.0
    if threshold >= xs[best + 1]:
        threshold = xs[best]
    return float(sse[best]), float(threshold)


def fit_tree(x: np.ndarray, y: np.ndarray, params: ForestParams, seed: Any) -> TreeNode:
    """Grow one CART tree on inputs ``x`` (N x d) and outputs ``y`` (N x m)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape[0] != y.shape[0]:
        raise ValueError("inputs and outputs have different row counts")
    if x.shape[0] < 2 * params.min_leaf:
        raise ValueError(f"need at least {2 * params.min_leaf} rows, got {x.shape[0]}")
    rng = np.random.default_rng(seed)
    return _grow(x, y, params, rng, depth=0)


def _grow(x: np.ndarray, y: np.ndarray, params: ForestParams, rng: np.random.Generator,
          depth: int) -> TreeNode:
    leaf = LeafNode(mean_vector=y.mean(axis=0), n_samples=x.shape[0])
    if depth >= params.max_depth or x.shape[0] < 2 * params.min_leaf:
        return leaf

    n_candidates = min(params.features_per_split, x.shape[1])
    candidates = np.sort(rng.choice(x.shape[1], size=n_candidates, replace=False))
    best: Optional[tuple[float, int, float]] = None
    for j in candidates:
        cut = _best_cut(x[:, j], y, params.min_leaf)
        if cut is not None and (best is None or cut[0] < best[0]):
            best = (cut[0], int(j), cut[1])
    if best is None:
        return leaf

    _, feature, threshold = best
    go_left = x[:, feature] <= threshold
    left_y, right_y = y[go_left], y[~go_left]
    if _sse(left_y) + _sse(right_y) >= _sse(y):
        return leaf
    return SplitNode(
        feature_index=feature,
        threshold=threshold,
        left=_grow(x[go_left], left_y, params, rng, depth + 1),
        right=_grow(x[~go_left], right_y, params, rng, depth + 1),
    )


def _leftmost_leaf(node: TreeNode) -> LeafNode:
    while isinstance(node, SplitNode):
        node = node.left
    return node


def predict_tree(node: TreeNode, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    out = np.empty((x.shape[0], _leftmost_leaf(node).mean_vector.shape[0]))
    stack = [(node, np.arange(x.shape[0]))]
    while stack:
        current, rows = stack.pop()
        if isinstance(current, LeafNode):
            out[rows] = current.mean_vector
            continue
        go_left = x[rows, current.feature_index] <= current.threshold
        stack.append((current.left, rows[go_left]))
        stack.append((current.right, rows[~go_left]))
    return out


def tree_depth(node: TreeNode) -> int:
    if isinstance(node, LeafNode):
        return 0
    return 1 + max(tree_depth(node.left), tree_depth(node.right))


def node_to_dict(node: TreeNode) -> dict[str, Any]:
    if isinstance(node, LeafNode):
        return {"mean_vector": node.mean_vector.tolist(), "n_samples": node.n_samples}
    return {
        "feature_index": node.feature_index,
        "threshold": node.threshold,
        "left": node_to_dict(node.left),
        "right": node_to_dict(node.right),
    }


def node_from_dict(data: Any) -> TreeNode:
    try:
        if "mean_vector" in data:
            return LeafNode(np.array(data["mean_vector"], dtype=np.float64), int(data["n_samples"]))
        return SplitNode(
            feature_index=int(data["feature_index"]),
            threshold=float(data["threshold"]),
            left=node_from_dict(data["left"]),
            right=node_from_dict(data["right"]),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ModelFormatError(f"malformed tree node: {e}") from e


@dataclass(eq=False)
class Forest:
    trees: list[TreeNode] = field(default_factory=list)
    params: ForestParams = field(default_factory=ForestParams)


def fit_forest(x: np.ndarray, y: np.ndarray, params: ForestParams, threads: int = 1) -> Forest:
    """Fit ``n_trees`` trees; tree ``i`` draws from seed ``[params.seed, i]``.

    The per-tree seeds make threaded and serial fits identical.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = x.shape[0]

    def fit_one(i: int) -> TreeNode:
        rows = np.arange(n)
        if params.bootstrap:
            rows = np.random.default_rng([params.seed, i, 0]).integers(0, n, size=n)
        return fit_tree(x[rows], y[rows], params, seed=[params.seed, i, 1])

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            trees = list(pool.map(fit_one, range(params.n_trees)))
    else:
        trees = [fit_one(i) for i in range(params.n_trees)]
    return Forest(trees=trees, params=params)


def predict_forest(forest: Optional[Forest], x: np.ndarray) -> np.ndarray:
    """Unweighted mean of the tree predictions."""
    if forest is None or not forest.trees:
        raise NotFittedError("forest must be fitted before predicting")
    total = predict_tree(forest.trees[0], x)
    for tree in forest.trees[1:]:
        total += predict_tree(tree, x)
    return total / len(forest.trees)


class ForestModel(BaseInverseModel):
    """Random-forest inverse baseline: hardness -> 13 features."""

    kind = "forest"

    def __init__(self, scaler: Scaler, params: Optional[ForestParams] = None, threads: int = 1):
        params = params or ForestParams()
        super().__init__(scaler, seed=params.seed)
        self.params = params
        self.threads = threads
        self.forest: Optional[Forest] = None

    @property
    def name(self) -> str:
        return "random_forest"

    @property
    def display_name(self) -> str:
        return "Random Forest"

    @property
    def fitted(self) -> bool:
        return self.forest is not None

    def fit(self, train: Dataset, val: Dataset) -> None:
        self.forest = fit_forest(train.target_matrix, train.features, self.params, self.threads)
        depth = max(tree_depth(t) for t in self.forest.trees)
        self.logger.info(f"{self.name}: {self.params.n_trees} trees, max depth {depth}")

    def predict_normalized(self, targets: np.ndarray) -> np.ndarray:
        return predict_forest(self.forest, targets)

    def to_dict(self) -> dict[str, Any]:
        if self.forest is None:
            raise NotFittedError("forest must be fitted before saving")
        return {
            "kind": self.kind,
            "params": {
                "n_trees": self.params.n_trees,
                "max_depth": self.params.max_depth,
                "min_leaf": self.params.min_leaf,
                "features_per_split": self.params.features_per_split,
                "bootstrap": self.params.bootstrap,
                "seed": self.params.seed,
            },
            "scaler": self.scaler.to_dict(),
            "trees": [node_to_dict(t) for t in self.forest.trees],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ForestModel":
        if data.get("kind") != cls.kind:
            raise ModelFormatError("not a forest document")
        try:
            params = ForestParams(**data["params"])
        except (KeyError, TypeError, ValueError) as e:
            raise ModelFormatError(f"malformed forest params: {e}") from e
        model = cls(Scaler.from_dict(data.get("scaler")), params)
        model.forest = Forest(trees=[node_from_dict(t) for t in data.get("trees", [])],
                              params=params)
        if not model.forest.trees:
            raise ModelFormatError("forest has no trees")
        return model


__all__: Sequence[str] = (
    "Forest",
    "ForestModel",
    "ForestParams",
    "LeafNode",
    "SplitNode",
    "TreeNode",
    "fit_forest",
    "fit_tree",
    "predict_forest",
    "predict_tree",
)
