"""Planner scoring: overlap with developer actions, three-version protocol,
effectiveness curves, and their normalized areas.

The protocol trains a planner on one release, plans for the next, and
validates on the release after that: each class present in both later
releases contributes its defect delta at the overlap between the planner's
actions and what developers actually changed.
"""

from __future__ import annotations

import io
import csv
from dataclasses import dataclass
from statistics import mean, median
from typing import Optional

from .datasets import (
    ActionVector,
    NO_CHANGE,
    Project,
    VersionedDataset,
    diff_versions,
)
from .planners import Plan, PlannerBase
from .stats import simpson_integrate

N_BUCKETS = 10
BUCKET_MIDPOINTS = tuple(5.0 + 10.0 * i for i in range(N_BUCKETS))
CURVE_SPAN = BUCKET_MIDPOINTS[-1] - BUCKET_MIDPOINTS[0]


def overlap(d: ActionVector, p: ActionVector) -> float:
    """Percentage of metrics on which two action vectors agree.

    Agreement counts matching no-change entries too; the denominator is the
    full shared metric universe.
    """
    if d.keys() != p.keys():
        raise ValueError("action vectors cover different metric universes")
    if not d:
        raise ValueError("empty action vectors")
    agree = sum(1 for m in d if d[m] == p[m])
    return 100.0 * agree / len(d)


def changes_count(plan: Plan) -> int:
    """Number of metrics a plan actually asks to change."""
    return sum(1 for a in plan.actions.values() if a.direction != NO_CHANGE)


def bucket_index(x: float) -> int:
    """Decile bucket of an overlap percentage; 100 folds into the last."""
    if not 0.0 <= x <= 100.0:
        raise ValueError(f"overlap {x} outside [0, 100]")
    return min(int(x // 10.0), N_BUCKETS - 1)


@dataclass(frozen=True)
class CurvePoint:
    """One decile of the effectiveness curve."""

    overlap_bucket: float
    defects_reduced: int
    defects_increased: int
    classes: int

    def to_dict(self) -> dict:
        return {
            "overlap_bucket": self.overlap_bucket,
            "defects_reduced": self.defects_reduced,
            "defects_increased": self.defects_increased,
            "classes": self.classes,
        }


@dataclass(frozen=True)
class ChangesSummary:
    """Distribution of changes-per-plan across one planning run."""

    plans: int
    minimum: int
    median: float
    mean: float
    maximum: int

    @classmethod
    def from_counts(cls, counts: list[int]) -> "ChangesSummary":
        if not counts:
            return cls(0, 0, 0.0, 0.0, 0)
        return cls(
            plans=len(counts),
            minimum=min(counts),
            median=float(median(counts)),
            mean=float(mean(counts)),
            maximum=max(counts),
        )

    def to_dict(self) -> dict:
        return {
            "plans": self.plans,
            "min": self.minimum,
            "median": self.median,
            "mean": self.mean,
            "max": self.maximum,
        }


@dataclass(frozen=True)
class KTestResult:
    """Outcome of one train/plan/validate window for one planner."""

    project: str
    version_i: str
    version_j: str
    version_k: str
    planner: str
    curve: tuple[CurvePoint, ...]
    aupec_reduced: Optional[float]
    aupec_increased: Optional[float]
    changes_per_plan: ChangesSummary
    matched_classes: int
    matched_defects: int

    def to_dict(self) -> dict:
        return {
            "project": self.project,
            "versions": {
                "train": self.version_i,
                "test": self.version_j,
                "validation": self.version_k,
            },
            "planner": self.planner,
            "curve": [point.to_dict() for point in self.curve],
            "aupec_reduced": self.aupec_reduced,
            "aupec_increased": self.aupec_increased,
            "changes_per_plan": self.changes_per_plan.to_dict(),
            "matched_classes": self.matched_classes,
            "matched_defects": self.matched_defects,
        }

    def curve_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["bucket", "reduced", "increased", "classes"])
        for point in self.curve:
            writer.writerow(
                [
                    point.overlap_bucket,
                    point.defects_reduced,
                    point.defects_increased,
                    point.classes,
                ]
            )
        return buf.getvalue()


def _aupec(curve_heights: list[int], matched_defects: int) -> Optional[float]:
    """Area under one curve as a percentage of the theoretical best.

    The best possible curve sits at the matched releases' full defect count
    across every overlap level, so its area is that count times the span of
    the bucket midpoints.
    """
    if matched_defects <= 0:
        return None
    points = list(zip(BUCKET_MIDPOINTS, (float(h) for h in curve_heights)))
    area = simpson_integrate(points)
    return 100.0 * area / (matched_defects * CURVE_SPAN)


def ktest(
    project: Project,
    i: int,
    j: int,
    k: int,
    planner: PlannerBase,
    epsilon: float = 0.0,
    train: VersionedDataset | None = None,
) -> KTestResult:
    """Train on release ``i``, plan for ``j``, validate against ``k``.

    ``train`` swaps the training release for external data (cross-project
    planning) while the window itself stays on the project's releases.
    Indices address ``project.versions``; they must be strictly increasing.
    """
    if not 0 <= i < j < k < len(project.versions):
        raise ValueError(
            f"need three ordered releases, got indices {(i, j, k)} for "
            f"{len(project.versions)} available"
        )
    version_i, version_j, version_k = (
        project.versions[i],
        project.versions[j],
        project.versions[k],
    )
    planner.fit(train if train is not None else version_i)
    plans = {rec.class_name: planner.plan(rec) for rec in version_j.records}

    developer = diff_versions(version_j, version_k, epsilon)
    k_records = version_k.by_name()
    reduced = [0] * N_BUCKETS
    increased = [0] * N_BUCKETS
    classes = [0] * N_BUCKETS
    matched_classes = 0
    matched_defects = 0
    for rec in version_j.records:
        actions = developer.get(rec.class_name)
        if actions is None:
            continue
        x = overlap(actions, plans[rec.class_name].direction_vector())
        bucket = bucket_index(x)
        delta = rec.defects - k_records[rec.class_name].defects
        reduced[bucket] += max(0, delta)
        increased[bucket] += max(0, -delta)
        classes[bucket] += 1
        matched_classes += 1
        matched_defects += rec.defects

    if matched_classes == 0:
        curve: tuple[CurvePoint, ...] = ()
        aupec_reduced = aupec_increased = None
    else:
        curve = tuple(
            CurvePoint(mid, reduced[b], increased[b], classes[b])
            for b, mid in enumerate(BUCKET_MIDPOINTS)
        )
        aupec_reduced = _aupec(reduced, matched_defects)
        aupec_increased = _aupec(increased, matched_defects)

    counts = [changes_count(plans[rec.class_name]) for rec in version_j.records]
    return KTestResult(
        project=project.name,
        version_i=version_i.version,
        version_j=version_j.version,
        version_k=version_k.version,
        planner=planner.name,
        curve=curve,
        aupec_reduced=aupec_reduced,
        aupec_increased=aupec_increased,
        changes_per_plan=ChangesSummary.from_counts(counts),
        matched_classes=matched_classes,
        matched_defects=matched_defects,
    )


def evaluate_windows(
    project: Project,
    planner: PlannerBase,
    epsilon: float = 0.0,
    train: VersionedDataset | None = None,
) -> list[KTestResult]:
    """Run every consecutive three-release window of a project."""
    if len(project.versions) < 3:
        raise ValueError(
            f"project {project.name!r} has {len(project.versions)} release(s); "
            "the three-version protocol needs at least 3"
        )
    results = []
    for start in range(len(project.versions) - 2):
        results.append(
            ktest(project, start, start + 1, start + 2, planner, epsilon, train)
        )
    return results
