"""Defect-reduction planning from versioned code-metric datasets.

Learn "change these metrics" plans from release history (within-project or
from a community's exemplar project), compare them with threshold-based
baseline planners, and score every planner by how well its plans overlap
with what developers actually changed and what happened to defect counts.
"""

from .datasets import (
    ACTIONS,
    DECREASE,
    INCREASE,
    METRICS,
    NO_CHANGE,
    ClassRecord,
    Community,
    DatasetError,
    Project,
    VersionedDataset,
    diff_versions,
    load_community,
    load_csv,
    load_project,
    pool_versions,
    write_csv,
)
from .stats import LogisticFit, entropy, fit_univariate_logistic, simpson_integrate
from .discretize import BinMap, apply_bins, mdlp_cuts
from .tree import (
    Branch,
    Condition,
    TreeNode,
    build_tree,
    fit_bins,
    locate,
    predict_defective,
    siblings_at,
    tree_to_dict,
)
from .planners import (
    Action,
    AlvesPlanner,
    OliveiraPlanner,
    Plan,
    PlannerBase,
    ShatnawiPlanner,
    ThresholdRule,
    XTreePlanner,
    alves_thresholds,
    compliance_rate,
    make_planner,
    oliveira_thresholds,
    shatnawi_thresholds,
    suggest_refactorings,
    threshold_plan,
    varl,
    weighted_percentile,
    xtree_plan,
)
from .bellwether import (
    BellwetherReport,
    belltree_plan,
    discover,
    g_score,
    make_belltree_planner,
    validate,
)
from .evaluate import (
    ChangesSummary,
    CurvePoint,
    KTestResult,
    changes_count,
    evaluate_windows,
    ktest,
    overlap,
)
from . import refactorings

__version__ = "0.1.0"

__all__ = [
    "ACTIONS", "DECREASE", "INCREASE", "METRICS", "NO_CHANGE",
    "ClassRecord", "Community", "DatasetError", "Project", "VersionedDataset",
    "diff_versions", "load_community", "load_csv", "load_project",
    "pool_versions", "write_csv",
    "LogisticFit", "entropy", "fit_univariate_logistic", "simpson_integrate",
    "BinMap", "apply_bins", "mdlp_cuts",
    "Branch", "Condition", "TreeNode", "build_tree", "fit_bins", "locate",
    "predict_defective", "siblings_at", "tree_to_dict",
    "Action", "AlvesPlanner", "OliveiraPlanner", "Plan", "PlannerBase",
    "ShatnawiPlanner", "ThresholdRule", "XTreePlanner", "alves_thresholds",
    "compliance_rate", "make_planner", "oliveira_thresholds",
    "shatnawi_thresholds", "suggest_refactorings", "threshold_plan", "varl",
    "weighted_percentile", "xtree_plan",
    "BellwetherReport", "belltree_plan", "discover", "g_score",
    "make_belltree_planner", "validate",
    "ChangesSummary", "CurvePoint", "KTestResult", "changes_count",
    "evaluate_windows", "ktest", "overlap",
    "refactorings",
]
