"""Plan generators: the contrast-set tree planner and three threshold baselines.

Every planner turns one class record into a `Plan`: a per-metric vector of
increase/decrease/no-change actions, optionally with a concrete target range.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .datasets import (
    ACTIONS,
    DECREASE,
    INCREASE,
    METRICS,
    NO_CHANGE,
    ActionVector,
    ClassRecord,
    VersionedDataset,
)
from .refactorings import table as refactoring_table
from .stats import LogisticFit, fit_univariate_logistic
from .tree import (
    Branch,
    TreeNode,
    build_tree,
    fit_bins,
    locate,
    siblings_at,
)
from .discretize import apply_bins

DEFAULT_GAMMA = 0.5
DEFAULT_SEED = 42
DEFAULT_PERCENTILE = 70.0
DEFAULT_P0 = 0.05
DEFAULT_P1 = 0.05
DEFAULT_MIN_COMPLIANCE = 90.0
DEFAULT_TAIL = 90.0
SIGNIFICANCE_LEVEL = 0.05

PLANNER_NAMES = ("xtree", "belltree", "alves", "shatnawi", "oliveira")


@dataclass(frozen=True)
class Action:
    """One metric's recommendation: direction plus optional target range."""

    direction: str = NO_CHANGE
    target_range: Optional[tuple[float, float]] = None
    suggested: Optional[float] = None

    def __post_init__(self) -> None:
        if self.direction not in ACTIONS:
            raise ValueError(f"unknown action {self.direction!r}")
        if self.target_range is not None and self.target_range[0] > self.target_range[1]:
            raise ValueError("target range low must not exceed high")


@dataclass(frozen=True)
class Plan:
    """Per-class action vector produced by one planner."""

    class_name: str
    actions: dict[str, Action]
    source_planner: str
    expected_score_drop: Optional[float] = None

    def __post_init__(self) -> None:
        if set(self.actions) != set(METRICS):
            raise ValueError("plan must cover all metrics")

    def direction_vector(self) -> ActionVector:
        return {m: self.actions[m].direction for m in METRICS}

    def is_no_change(self) -> bool:
        return all(a.direction == NO_CHANGE for a in self.actions.values())

    def to_dict(self) -> dict:
        actions = {}
        for metric in METRICS:
            action = self.actions[metric]
            entry: dict = {"action": action.direction}
            if action.target_range is not None:
                entry["target_low"] = action.target_range[0]
                entry["target_high"] = action.target_range[1]
            if action.suggested is not None:
                entry["suggested"] = action.suggested
            actions[metric] = entry
        doc = {
            "class_name": self.class_name,
            "planner": self.source_planner,
            "actions": actions,
        }
        if self.expected_score_drop is not None:
            doc["expected_score_drop"] = self.expected_score_drop
        return doc


@dataclass(frozen=True)
class ThresholdRule:
    """Upper bound on one metric, as derived by a threshold baseline."""

    metric: str
    upper: float
    p_fraction: Optional[float] = None

    def __post_init__(self) -> None:
        if not math.isfinite(self.upper):
            raise ValueError("threshold must be finite")
        if self.p_fraction is not None and not 0.0 < self.p_fraction <= 1.0:
            raise ValueError("p_fraction must lie in (0, 1]")


def no_change_plan(class_name: str, source_planner: str) -> Plan:
    return Plan(class_name, {m: Action() for m in METRICS}, source_planner)


def format_plan_row(plan: Plan) -> str:
    """Compact one-line rendering of the action vector, in metric order."""
    return " ".join(plan.actions[m].direction for m in METRICS)


def format_row_header() -> str:
    return " ".join(METRICS)


# ---------------------------------------------------------------------------
# XTREE


def _branch_distance(a: Branch, b: Branch) -> int:
    return len(a.condition_keys() ^ b.condition_keys())


def xtree_plan(
    tree: TreeNode,
    record: ClassRecord,
    gamma: float = DEFAULT_GAMMA,
    seed: int = DEFAULT_SEED,
    source_planner: str = "xtree",
) -> Plan:
    """Plan by contrasting the record's branch with a better sibling branch.

    Starting from the leaf's parent and ascending one level at a time,
    collect sibling leaves and keep those scoring below ``gamma`` times the
    current leaf's score. The closest such sibling (fewest differing branch
    conditions; ties to lower score, then branch order) defines the plan:
    each of its conditions the record does not already satisfy becomes an
    increase or decrease toward that condition's range. If no level offers
    a better sibling, the plan recommends no changes.
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    current = locate(tree, record)
    desired = None
    for lvl in range(len(current.conditions) - 1, -1, -1):
        better = [
            b
            for b in siblings_at(tree, current, lvl)
            if b.score < gamma * current.score
        ]
        if better:
            desired = min(
                better,
                key=lambda b: (_branch_distance(b, current), b.score, b.sort_key()),
            )
            break
    if desired is None:
        return no_change_plan(record.class_name, source_planner)

    rng = random.Random(seed)
    actions = {m: Action() for m in METRICS}
    node = tree
    for cond in desired.conditions:
        bins = node.split_bins
        idx = apply_bins(bins, record.metrics[cond.metric])
        if idx < cond.range_index:
            direction = INCREASE
        elif idx > cond.range_index:
            direction = DECREASE
        else:
            direction = NO_CHANGE
        if direction != NO_CHANGE:
            actions[cond.metric] = Action(
                direction=direction,
                target_range=(cond.low, cond.high),
                suggested=rng.uniform(cond.low, cond.high),
            )
        node = node.children[cond.range_index]
    return Plan(
        record.class_name,
        actions,
        source_planner,
        expected_score_drop=current.score - desired.score,
    )


# ---------------------------------------------------------------------------
# Threshold baselines


def _screened_fit(
    values: list[float], labels: list[int], level: float = SIGNIFICANCE_LEVEL
) -> Optional[LogisticFit]:
    """Logistic screen shared by the supervised baselines.

    Returns the fit when it converged and the slope is significant at
    ``level``; otherwise None (metric rejected).
    """
    try:
        fit = fit_univariate_logistic(values, labels)
    except ValueError:
        return None
    if not fit.converged or fit.p_value > level:
        return None
    return fit


def weighted_percentile(
    values: list[float], weights: list[float], percentile: float
) -> float:
    """Smallest value whose cumulative weight share reaches ``percentile``.

    Weights that sum to zero degrade to equal weighting.
    """
    if not 0.0 < percentile < 100.0:
        raise ValueError("percentile must lie in (0, 100)")
    if len(values) != len(weights) or not values:
        raise ValueError("values and weights must be equal-length and non-empty")
    total = sum(weights)
    if total <= 0:
        weights = [1.0] * len(values)
        total = float(len(values))
    pairs = sorted(zip(values, weights))
    target = percentile / 100.0
    cumulative = 0.0
    i = 0
    while i < len(pairs):
        j = i
        value = pairs[i][0]
        while j < len(pairs) and pairs[j][0] == value:
            cumulative += pairs[j][1]
            j += 1
        if cumulative / total >= target:
            return float(value)
        i = j
    return float(pairs[-1][0])


def alves_thresholds(
    train: VersionedDataset, percentile: float = DEFAULT_PERCENTILE
) -> list[ThresholdRule]:
    """Size-weighted percentile thresholds.

    Each class's metric value is weighted by its lines of code; the
    threshold is the smallest metric value whose cumulative weight reaches
    the percentile. Metrics failing the logistic defect screen are dropped.
    """
    if not 0.0 < percentile < 100.0:
        raise ValueError("percentile must lie in (0, 100)")
    labels = [1 if r.is_defective() else 0 for r in train.records]
    weights = [r.metrics["loc"] for r in train.records]
    rules = []
    for metric in METRICS:
        values = [r.metrics[metric] for r in train.records]
        if _screened_fit(values, labels) is None:
            continue
        threshold = weighted_percentile(values, weights, percentile)
        rules.append(ThresholdRule(metric, upper=threshold))
    return rules


def varl(fit: LogisticFit, p1: float = DEFAULT_P1) -> float:
    """Metric value at which the fitted defect probability reaches ``p1``."""
    return (math.log(p1 / (1.0 - p1)) - fit.alpha) / fit.beta


def shatnawi_thresholds(
    train: VersionedDataset, p0: float = DEFAULT_P0, p1: float = DEFAULT_P1
) -> list[ThresholdRule]:
    """Inverse-logistic risk thresholds.

    For each metric surviving the logistic screen at significance ``p0``,
    the threshold is where the fitted curve crosses probability ``p1``.
    Non-positive, non-finite, or out-of-observed-range thresholds are
    dropped as vacuous.
    """
    if not 0.0 < p0 < 1.0 or not 0.0 < p1 < 1.0:
        raise ValueError("p0 and p1 must lie in (0, 1)")
    labels = [1 if r.is_defective() else 0 for r in train.records]
    rules = []
    for metric in METRICS:
        values = [r.metrics[metric] for r in train.records]
        fit = _screened_fit(values, labels, level=p0)
        if fit is None or fit.beta == 0.0:
            continue
        threshold = varl(fit, p1)
        if not math.isfinite(threshold) or threshold <= 0.0:
            continue
        if threshold < min(values) or threshold > max(values):
            continue
        rules.append(ThresholdRule(metric, upper=float(threshold)))
    return rules


def compliance_rate(values: np.ndarray, p: float, k: float) -> float:
    """Percentage of entities below ``k``, zeroed when the rule itself fails.

    The rule "p% of entities must have M <= k" holds system-wide when at
    least p percent of values are <= k; a system that violates its own rule
    contributes no compliance.
    """
    frac = 100.0 * float(np.count_nonzero(values <= k)) / len(values)
    return frac if frac >= p else 0.0


def oliveira_thresholds(
    train: VersionedDataset,
    min_compliance: float = DEFAULT_MIN_COMPLIANCE,
    tail: float = DEFAULT_TAIL,
) -> list[ThresholdRule]:
    """Relative thresholds ``(p, k)`` chosen by penalty minimization.

    Candidates pair every integer percentage p in 1..99 with every distinct
    observed metric value k. The first penalty charges compliance shortfall
    against ``min_compliance``; the second charges the normalized distance
    between k and the median of the values above the ``tail``-th percentile
    (an idealized upper value). Ties prefer larger p, then smaller k. The
    method is unsupervised, so no logistic screen applies.
    """
    if not 0.0 < min_compliance < 100.0 or not 0.0 < tail < 100.0:
        raise ValueError("min_compliance and tail must lie in (0, 100)")
    rules = []
    ps = np.arange(1, 100, dtype=float)
    for metric in METRICS:
        values = np.array([r.metrics[metric] for r in train.records], dtype=float)
        ks = np.unique(values)
        counts = np.searchsorted(np.sort(values), ks, side="right")
        frac_le = 100.0 * counts / len(values)

        tail_cut = float(np.percentile(values, tail))
        above = values[values > tail_cut]
        tail_median = float(np.median(above)) if above.size else float(values.max())
        denominator = tail_median if tail_median > 0 else 1.0
        penalty2 = np.abs(ks - tail_median) / denominator

        rate = np.where(frac_le[None, :] >= ps[:, None], frac_le[None, :], 0.0)
        penalty1 = np.maximum(0.0, min_compliance - rate)
        total = penalty1 + penalty2[None, :]

        best = total.min()
        rows, cols = np.nonzero(total == best)
        # Ties: larger p first, then smaller k.
        order = max(range(len(rows)), key=lambda i: (rows[i], -cols[i]))
        p = float(ps[rows[order]])
        k = float(ks[cols[order]])
        rules.append(ThresholdRule(metric, upper=k, p_fraction=p / 100.0))
    return rules


def threshold_plan(
    rules: list[ThresholdRule],
    record: ClassRecord,
    source_planner: str = "threshold",
) -> Plan:
    """Decrease every metric whose value exceeds its rule's upper bound."""
    actions = {m: Action() for m in METRICS}
    for rule in rules:
        if record.metrics[rule.metric] > rule.upper:
            actions[rule.metric] = Action(
                direction=DECREASE, target_range=(0.0, rule.upper)
            )
    return Plan(record.class_name, actions, source_planner)


def suggest_refactorings(plan: Plan) -> list[str]:
    """Catalog refactorings whose metric signature matches the plan.

    Rows are ranked by how many of the plan's non-no-change actions they
    match on the shared metrics, with fewer unmatched signature entries and
    catalog order breaking ties. Rows matching nothing are omitted.
    """
    active = {
        m: a.direction
        for m, a in plan.actions.items()
        if a.direction != NO_CHANGE
    }
    ranked = []
    for position, row in enumerate(refactoring_table()):
        shared = row.shared_signature()
        if not row.signature:
            continue
        matches = sum(1 for m, sign in shared.items() if active.get(m) == sign)
        if matches == 0:
            continue
        unmatched = len(shared) - matches
        ranked.append((-matches, unmatched, position, row.name))
    ranked.sort()
    return [name for *_, name in ranked]


# ---------------------------------------------------------------------------
# Planner interface


class PlannerBase:
    """Common surface: ``fit(train)`` then ``plan(record)`` per class."""

    name = "base"

    def fit(self, train: VersionedDataset) -> "PlannerBase":
        raise NotImplementedError

    def plan(self, record: ClassRecord) -> Plan:
        raise NotImplementedError

    def plan_all(self, dataset: VersionedDataset) -> list[Plan]:
        return [self.plan(record) for record in dataset.records]


class XTreePlanner(PlannerBase):
    """Within-project contrast-set planner."""

    name = "xtree"

    def __init__(
        self,
        gamma: float = DEFAULT_GAMMA,
        seed: int = DEFAULT_SEED,
        max_depth: int = 10,
        min_leaf: int | None = None,
        name: str | None = None,
    ):
        self.gamma = gamma
        self.seed = seed
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        if name is not None:
            self.name = name
        self.tree: TreeNode | None = None

    def fit(self, train: VersionedDataset) -> "XTreePlanner":
        bins = fit_bins(train)
        self.tree = build_tree(
            train, bins, max_depth=self.max_depth, min_leaf=self.min_leaf
        )
        return self

    def plan(self, record: ClassRecord) -> Plan:
        if self.tree is None:
            raise RuntimeError("planner not fitted")
        return xtree_plan(
            self.tree, record, self.gamma, self.seed, source_planner=self.name
        )


class _ThresholdPlannerBase(PlannerBase):
    """Shared plumbing for the rule-based baselines."""

    def __init__(self):
        self.rules: list[ThresholdRule] | None = None

    def derive_rules(self, train: VersionedDataset) -> list[ThresholdRule]:
        raise NotImplementedError

    def fit(self, train: VersionedDataset) -> "_ThresholdPlannerBase":
        self.rules = self.derive_rules(train)
        return self

    def plan(self, record: ClassRecord) -> Plan:
        if self.rules is None:
            raise RuntimeError("planner not fitted")
        return threshold_plan(self.rules, record, source_planner=self.name)


class AlvesPlanner(_ThresholdPlannerBase):
    name = "alves"

    def __init__(self, percentile: float = DEFAULT_PERCENTILE):
        super().__init__()
        self.percentile = percentile

    def derive_rules(self, train: VersionedDataset) -> list[ThresholdRule]:
        return alves_thresholds(train, self.percentile)


class ShatnawiPlanner(_ThresholdPlannerBase):
    name = "shatnawi"

    def __init__(self, p0: float = DEFAULT_P0, p1: float = DEFAULT_P1):
        super().__init__()
        self.p0 = p0
        self.p1 = p1

    def derive_rules(self, train: VersionedDataset) -> list[ThresholdRule]:
        return shatnawi_thresholds(train, self.p0, self.p1)


class OliveiraPlanner(_ThresholdPlannerBase):
    name = "oliveira"

    def __init__(
        self,
        min_compliance: float = DEFAULT_MIN_COMPLIANCE,
        tail: float = DEFAULT_TAIL,
    ):
        super().__init__()
        self.min_compliance = min_compliance
        self.tail = tail

    def derive_rules(self, train: VersionedDataset) -> list[ThresholdRule]:
        return oliveira_thresholds(train, self.min_compliance, self.tail)


def make_planner(name: str, **options) -> PlannerBase:
    """Build a planner by name, passing only the options it understands."""
    if name == "xtree" or name == "belltree":
        return XTreePlanner(
            gamma=options.get("gamma", DEFAULT_GAMMA),
            seed=options.get("seed", DEFAULT_SEED),
            max_depth=options.get("max_depth", 10),
            min_leaf=options.get("min_leaf"),
            name=name,
        )
    if name == "alves":
        return AlvesPlanner(percentile=options.get("percentile", DEFAULT_PERCENTILE))
    if name == "shatnawi":
        return ShatnawiPlanner(
            p0=options.get("p0", DEFAULT_P0), p1=options.get("p1", DEFAULT_P1)
        )
    if name == "oliveira":
        return OliveiraPlanner(
            min_compliance=options.get("min_compliance", DEFAULT_MIN_COMPLIANCE),
            tail=options.get("tail", DEFAULT_TAIL),
        )
    raise ValueError(f"unknown planner {name!r}")
