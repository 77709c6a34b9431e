"""Defect-scored decision tree over discretized metrics.

Internal nodes split on one metric's discretized ranges; every leaf keeps
the mean raw defect count of the training records that reached it. The same
tree doubles as the defect predictor used for exemplar-project discovery.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .datasets import METRICS, ClassRecord, VersionedDataset
from .discretize import BinMap, apply_bins, mdlp_cuts
from .stats import entropy

DEFAULT_MAX_DEPTH = 10
DEFAULT_PREDICT_THRESHOLD = 0.5


@dataclass(frozen=True)
class Condition:
    """One branch condition: a metric constrained to one discretized range."""

    metric: str
    range_index: int
    low: float
    high: float

    def key(self) -> tuple[str, int]:
        return (self.metric, self.range_index)


@dataclass(frozen=True)
class Branch:
    """Root-to-leaf conditions plus the leaf's defect score."""

    conditions: tuple[Condition, ...]
    score: float
    support: int

    def condition_keys(self) -> frozenset[tuple[str, int]]:
        return frozenset(c.key() for c in self.conditions)

    def sort_key(self) -> tuple:
        return tuple(c.key() for c in self.conditions)


@dataclass(frozen=True)
class TreeNode:
    """Node of the defect tree; a leaf when ``split_metric`` is None."""

    score: float
    support: int
    level: int
    split_metric: Optional[str] = None
    split_bins: Optional[BinMap] = None
    children: Optional[dict[int, "TreeNode"]] = None

    @property
    def is_leaf(self) -> bool:
        return self.split_metric is None


def default_min_leaf(n_records: int) -> int:
    return max(5, n_records // 50)


def fit_bins(train: VersionedDataset) -> dict[str, BinMap]:
    """Discretize every metric of a training set against defectiveness."""
    labels = [1 if r.is_defective() else 0 for r in train.records]
    bins = {}
    for metric in METRICS:
        values = [r.metrics[metric] for r in train.records]
        bins[metric] = mdlp_cuts(values, labels, metric=metric)
    return bins


def _mean_defects(records: list[ClassRecord]) -> float:
    return sum(r.defects for r in records) / len(records)


def _gain_of_partition(labels: list[int], groups: dict[int, list[int]]) -> float:
    total = len(labels)
    parent = entropy(labels)
    weighted = sum(len(g) * entropy(g) for g in groups.values()) / total
    return parent - weighted


def build_tree(
    train: VersionedDataset,
    bins: dict[str, BinMap],
    max_depth: int = DEFAULT_MAX_DEPTH,
    min_leaf: int | None = None,
) -> TreeNode:
    """Grow the defect tree by recursive information-gain splitting.

    At each node the metric with the highest gain on the binary defective
    label wins (ties go to canonical metric order); growth stops at
    ``max_depth``, when a split would leave a child below ``min_leaf``
    records, or when no split has positive gain.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    if min_leaf is None:
        min_leaf = default_min_leaf(len(train.records))
    if min_leaf < 1:
        raise ValueError("min_leaf must be >= 1")
    return _grow(list(train.records), bins, 0, max_depth, min_leaf, frozenset())


def _grow(
    records: list[ClassRecord],
    bins: dict[str, BinMap],
    level: int,
    max_depth: int,
    min_leaf: int,
    used: frozenset[str],
) -> TreeNode:
    score = _mean_defects(records)
    support = len(records)
    leaf = TreeNode(score=score, support=support, level=level)
    if level >= max_depth:
        return leaf
    labels = [1 if r.is_defective() else 0 for r in records]
    if len(set(labels)) < 2:
        return leaf

    best_metric = None
    best_gain = 0.0
    best_groups: dict[int, list[ClassRecord]] = {}
    for metric in METRICS:
        if metric in used or bins[metric].n_ranges < 2:
            continue
        groups: dict[int, list[ClassRecord]] = {}
        for rec in records:
            idx = apply_bins(bins[metric], rec.metrics[metric])
            groups.setdefault(idx, []).append(rec)
        if len(groups) < 2 or min(len(g) for g in groups.values()) < min_leaf:
            continue
        label_groups = {
            idx: [1 if r.is_defective() else 0 for r in g]
            for idx, g in groups.items()
        }
        gain = _gain_of_partition(labels, label_groups)
        if gain > best_gain + 1e-12:
            best_metric, best_gain, best_groups = metric, gain, groups
    if best_metric is None:
        return leaf

    children = {
        idx: _grow(
            grp, bins, level + 1, max_depth, min_leaf, used | {best_metric}
        )
        for idx, grp in sorted(best_groups.items())
    }
    return TreeNode(
        score=score,
        support=support,
        level=level,
        split_metric=best_metric,
        split_bins=bins[best_metric],
        children=children,
    )


def _route_index(node: TreeNode, record: ClassRecord) -> int:
    """Child key for a record, falling back to the nearest populated range."""
    assert node.children is not None and node.split_bins is not None
    idx = apply_bins(node.split_bins, record.metrics[node.split_metric])
    if idx in node.children:
        return idx
    return min(node.children, key=lambda k: (abs(k - idx), k))


def locate(tree: TreeNode, record: ClassRecord) -> Branch:
    """The unique root-to-leaf branch a record satisfies."""
    conditions: list[Condition] = []
    node = tree
    while not node.is_leaf:
        key = _route_index(node, record)
        low, high = node.split_bins.range_bounds(key)
        conditions.append(Condition(node.split_metric, key, low, high))
        node = node.children[key]
    return Branch(tuple(conditions), node.score, node.support)


def _leaves_under(
    node: TreeNode, prefix: tuple[Condition, ...]
) -> list[Branch]:
    if node.is_leaf:
        return [Branch(prefix, node.score, node.support)]
    out: list[Branch] = []
    for key in sorted(node.children):
        low, high = node.split_bins.range_bounds(key)
        cond = Condition(node.split_metric, key, low, high)
        out.extend(_leaves_under(node.children[key], prefix + (cond,)))
    return out


def siblings_at(tree: TreeNode, branch: Branch, lvl: int) -> list[Branch]:
    """Leaf branches reachable from the branch's ancestor at depth ``lvl``,
    excluding the branch itself. A ``lvl`` above the root yields no siblings;
    the caller treats that as search exhaustion."""
    if lvl < 0:
        return []
    if lvl > len(branch.conditions):
        raise ValueError(f"lvl {lvl} is below the branch's leaf")
    node = tree
    prefix: tuple[Condition, ...] = ()
    for cond in branch.conditions[:lvl]:
        prefix += (cond,)
        node = node.children[cond.range_index]
    return [
        b for b in _leaves_under(node, prefix) if b.conditions != branch.conditions
    ]


def predict_defective(
    tree: TreeNode,
    record: ClassRecord,
    threshold: float = DEFAULT_PREDICT_THRESHOLD,
) -> bool:
    """True when the located leaf's mean defect count exceeds the threshold."""
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    return locate(tree, record).score > threshold


def tree_to_dict(node: TreeNode) -> dict:
    """JSON-ready representation of a tree for CLI inspection."""
    doc: dict = {
        "score": node.score,
        "support": node.support,
        "level": node.level,
    }
    if not node.is_leaf:
        doc["split_metric"] = node.split_metric
        doc["cut_points"] = list(node.split_bins.cut_points)
        doc["children"] = {
            str(key): tree_to_dict(child)
            for key, child in sorted(node.children.items())
        }
    return doc
