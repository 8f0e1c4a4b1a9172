"""Evaluation quantities: error-diversity Dice, plain Dice, tree statistics."""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .image import DomainError
from .tree import ComponentTree, leaf_count as _tree_leaf_count


@dataclass(frozen=True)
class LabelMap:
    """Discrete segmentation labels over an image domain."""

    dims: tuple[int, int, int]
    labels: np.ndarray

    def __post_init__(self):
        w, h, d = self.dims
        labels = np.ascontiguousarray(np.asarray(self.labels).reshape(-1),
                                      dtype=np.int64)
        if labels.size != w * h * d:
            raise DomainError(
                f"labels length {labels.size} != product of dims {w * h * d}")
        if labels.size and labels.min() < 0:
            raise DomainError("labels must be non-negative")
        labels.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dims", (int(w), int(h), int(d)))


def _check_dims(*maps: LabelMap) -> None:
    dims = {m.dims for m in maps}
    if len(dims) > 1:
        raise DomainError(f"dims mismatch: {sorted(dims)}")


def error_diversity(pred1: LabelMap, pred2: LabelMap, gt: LabelMap) -> float:
    """Dice overlap of the two predictions' error sets against the ground
    truth: 2|E1 ∩ E2| / (|E1| + |E2|). Both error sets empty -> 0 (no shared
    error when there are no errors)."""
    _check_dims(pred1, pred2, gt)
    e1 = pred1.labels != gt.labels
    e2 = pred2.labels != gt.labels
    denom = int(e1.sum()) + int(e2.sum())
    if denom == 0:
        return 0.0
    return 2.0 * int(np.count_nonzero(e1 & e2)) / denom


def dice(pred: LabelMap, gt: LabelMap, class_id: int) -> float:
    """Classic Dice coefficient on one class mask; empty/empty -> 1."""
    _check_dims(pred, gt)
    a = pred.labels == class_id
    b = gt.labels == class_id
    denom = int(a.sum()) + int(b.sum())
    if denom == 0:
        return 1.0
    return 2.0 * int(np.count_nonzero(a & b)) / denom


@dataclass(frozen=True)
class TreeStats:
    node_count: int
    leaf_count: int
    max_depth: int
    child_count_histogram: dict[int, int]
    area_min: int
    area_max: int
    area_mean: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["child_count_histogram"] = {str(k): v
                                      for k, v in sorted(self.child_count_histogram.items())}
        return d


def tree_stats(tree: ComponentTree) -> TreeStats:
    counts = tree.children_counts()
    hist: dict[int, int] = {}
    for c in counts:
        hist[int(c)] = hist.get(int(c), 0) + 1
    depth = _max_depth(tree)
    return TreeStats(
        node_count=tree.num_nodes,
        leaf_count=int(np.count_nonzero(counts == 0)),
        max_depth=depth,
        child_count_histogram=hist,
        area_min=int(tree.node_area.min()),
        area_max=int(tree.node_area.max()),
        area_mean=float(tree.node_area.mean()),
    )


def _max_depth(tree: ComponentTree) -> int:
    # levels order parents before children, so one pass resolves all depths
    from .tree import TreeKind

    descending = tree.kind is TreeKind.MAX
    order = np.argsort(tree.node_level if descending else -tree.node_level,
                       kind="stable")
    depth = np.zeros(tree.num_nodes, dtype=np.int64)
    for node in order:
        if node != tree.root:
            depth[node] = depth[tree.node_parent[node]] + 1
    return int(depth.max())


def leaf_count(tree: ComponentTree) -> int:
    return _tree_leaf_count(tree)
