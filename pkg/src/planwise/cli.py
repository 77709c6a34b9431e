"""Command-line surface for planning, exemplar discovery, and evaluation.

Every command is a pure function of its input files and options: re-running
with the same configuration produces byte-identical outputs. All numeric
options can also be set through ``PLANWISE_``-prefixed environment
variables (e.g. ``PLANWISE_GAMMA=0.4``); explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from .bellwether import QUALITY_MEASURES, discover, make_belltree_planner
from .datasets import (
    DatasetError,
    METRICS,
    load_community,
    load_csv,
    load_project,
    pool_versions,
)
from .evaluate import evaluate_windows
from .planners import (
    DEFAULT_GAMMA,
    DEFAULT_MIN_COMPLIANCE,
    DEFAULT_P0,
    DEFAULT_P1,
    DEFAULT_PERCENTILE,
    DEFAULT_SEED,
    DEFAULT_TAIL,
    PLANNER_NAMES,
    make_planner,
    suggest_refactorings,
)
from .tree import DEFAULT_MAX_DEPTH, build_tree, fit_bins, tree_to_dict

SCHEMA_VERSION = "1"
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

BASELINE_NAMES = ("alves", "shatnawi", "oliveira")


def _env(name: str, fallback, cast):
    raw = os.environ.get(f"PLANWISE_{name}")
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError:
        raise SystemExit(
            f"planwise: invalid value {raw!r} for PLANWISE_{name}"
        ) from None


def _write_text(path: Path, text: str) -> None:
    """Atomic write: publish the file only once fully written."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _dump_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _add_planner_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("planner options")
    group.add_argument(
        "--gamma", type=float, default=_env("GAMMA", DEFAULT_GAMMA, float),
        help="better-sibling score factor for the tree planners",
    )
    group.add_argument(
        "--seed", type=int, default=_env("SEED", DEFAULT_SEED, int),
        help="seed for suggested in-range values (fixed for reproducibility)",
    )
    group.add_argument(
        "--max-depth", type=int, default=_env("MAX_DEPTH", DEFAULT_MAX_DEPTH, int),
        help="tree depth limit",
    )
    group.add_argument(
        "--min-leaf", type=int, default=_env("MIN_LEAF", None, int),
        help="minimum records per leaf (default: max(5, N/50))",
    )
    group.add_argument(
        "--percentile", type=float,
        default=_env("PERCENTILE", DEFAULT_PERCENTILE, float),
        help="size-weighted percentile for the alves baseline",
    )
    group.add_argument(
        "--p0", type=float, default=_env("P0", DEFAULT_P0, float),
        help="significance level of the shatnawi logistic screen",
    )
    group.add_argument(
        "--p1", type=float, default=_env("P1", DEFAULT_P1, float),
        help="risk probability defining the shatnawi threshold",
    )
    group.add_argument(
        "--min-compliance", type=float,
        default=_env("MIN_COMPLIANCE", DEFAULT_MIN_COMPLIANCE, float),
        help="compliance target of the oliveira penalty",
    )
    group.add_argument(
        "--tail", type=float, default=_env("TAIL", DEFAULT_TAIL, float),
        help="tail percentile anchoring the oliveira penalty",
    )


def _planner_options(args: argparse.Namespace) -> dict:
    return {
        "gamma": args.gamma,
        "seed": args.seed,
        "max_depth": args.max_depth,
        "min_leaf": args.min_leaf,
        "percentile": args.percentile,
        "p0": args.p0,
        "p1": args.p1,
        "min_compliance": args.min_compliance,
        "tail": args.tail,
    }


def _cmd_plan(args: argparse.Namespace) -> int:
    train = (
        load_csv(args.train[0])
        if len(args.train) == 1
        else pool_versions(load_project(args.train))
    )
    test = load_csv(args.test)
    planner = make_planner(args.planner, **_planner_options(args))
    planner.fit(train)
    plans = planner.plan_all(test)

    if args.format == "csv":
        lines = ["class_name," + ",".join(METRICS) + ",refactorings"]
        for plan in plans:
            row = [plan.class_name]
            row += [plan.actions[m].direction for m in METRICS]
            row.append(";".join(suggest_refactorings(plan)))
            lines.append(",".join(row))
        _write_text(Path(args.out), "\n".join(lines) + "\n")
    else:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "planner": args.planner,
            "train": [str(p) for p in args.train],
            "test": str(args.test),
            "plans": [
                dict(plan.to_dict(), refactorings=suggest_refactorings(plan))
                for plan in plans
            ],
        }
        _write_text(Path(args.out), _dump_json(doc))
    return EXIT_OK


def _cmd_bellwether(args: argparse.Namespace) -> int:
    community = load_community(args.community)
    if len(community.projects) < 2:
        print("planwise: community needs at least two projects", file=sys.stderr)
        return EXIT_FAILURE
    report = discover(community, quality_measure=args.quality_measure)
    doc = dict(report.to_dict(), schema_version=SCHEMA_VERSION)
    _write_text(Path(args.out), _dump_json(doc))
    print(f"bellwether: {report.bellwether}")
    return EXIT_OK


def _result_paths(out_dir: Path, result) -> tuple[Path, Path]:
    stem = f"{result.project}-{result.version_i}-{result.version_j}-{result.version_k}-{result.planner}"
    safe = stem.replace("/", "_")
    return out_dir / f"{safe}.json", out_dir / f"{safe}-curve.csv"


def _cmd_evaluate(args: argparse.Namespace) -> int:
    out_dir = Path(args.out_dir)
    if args.project_dir:
        project = load_project(sorted(Path(args.project_dir).glob("*.csv")))
    elif args.community and args.target:
        community = load_community(args.community)
        try:
            project = community.get(args.target)
        except KeyError:
            print(
                f"planwise: no project {args.target!r} in the community "
                f"(have: {', '.join(community.project_names())})",
                file=sys.stderr,
            )
            return EXIT_FAILURE
    else:
        print(
            "planwise: give --project-dir, or --community with --target",
            file=sys.stderr,
        )
        return EXIT_USAGE
    if len(project.versions) < 3:
        print(
            f"planwise: {project.name} has {len(project.versions)} release(s); "
            "evaluation trains on one, plans for the next, and validates on a "
            "third, so at least 3 are required",
            file=sys.stderr,
        )
        return EXIT_FAILURE

    names = list(PLANNER_NAMES) if args.planner == "all" else [args.planner]
    if "belltree" in names and not args.community:
        if args.planner == "all":
            names.remove("belltree")
        else:
            print(
                "planwise: belltree evaluation needs --community to discover "
                "the exemplar project",
                file=sys.stderr,
            )
            return EXIT_USAGE

    options = _planner_options(args)
    summary_rows = []
    for name in names:
        train = None
        if name == "belltree":
            community = load_community(args.community)
            report = discover(community, quality_measure=args.quality_measure)
            planner = make_planner(name, **options)
            train = pool_versions(community.get(report.bellwether))
        else:
            planner = make_planner(name, **options)
        results = evaluate_windows(project, planner, epsilon=args.epsilon, train=train)
        for window, result in enumerate(results, start=1):
            json_path, curve_path = _result_paths(out_dir, result)
            doc = dict(result.to_dict(), schema_version=SCHEMA_VERSION)
            _write_text(json_path, _dump_json(doc))
            _write_text(curve_path, result.curve_csv())
            summary_rows.append(
                {
                    "dataset": f"{result.project}-{window}",
                    "planner": result.planner,
                    "aupec_reduced": result.aupec_reduced,
                    "aupec_increased": result.aupec_increased,
                    "median_changes": result.changes_per_plan.median,
                }
            )

    header = "dataset,planner,aupec_reduced,aupec_increased,median_changes"
    lines = [header]
    for row in summary_rows:
        lines.append(
            ",".join(
                [
                    row["dataset"],
                    row["planner"],
                    _format_score(row["aupec_reduced"]),
                    _format_score(row["aupec_increased"]),
                    repr(row["median_changes"]),
                ]
            )
        )
    _write_text(out_dir / "summary.csv", "\n".join(lines) + "\n")
    _write_text(
        out_dir / "summary.json",
        _dump_json({"schema_version": SCHEMA_VERSION, "rows": summary_rows}),
    )
    return EXIT_OK


def _format_score(value) -> str:
    return "" if value is None else repr(value)


def _cmd_thresholds(args: argparse.Namespace) -> int:
    train = (
        load_csv(args.train[0])
        if len(args.train) == 1
        else pool_versions(load_project(args.train))
    )
    planner = make_planner(args.planner, **_planner_options(args))
    rules = planner.derive_rules(train)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "planner": args.planner,
        "rules": [
            {
                "metric": rule.metric,
                "upper": rule.upper,
                **(
                    {"p_fraction": rule.p_fraction}
                    if rule.p_fraction is not None
                    else {}
                ),
            }
            for rule in rules
        ],
    }
    _write_text(Path(args.out), _dump_json(doc))
    return EXIT_OK


def _cmd_tree(args: argparse.Namespace) -> int:
    train = (
        load_csv(args.train[0])
        if len(args.train) == 1
        else pool_versions(load_project(args.train))
    )
    bins = fit_bins(train)
    tree = build_tree(train, bins, max_depth=args.max_depth, min_leaf=args.min_leaf)
    doc = {"schema_version": SCHEMA_VERSION, "tree": tree_to_dict(tree)}
    _write_text(Path(args.out), _dump_json(doc))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="planwise",
        description=(
            "Learn metric-change plans from versioned defect datasets and "
            "score them against developer behavior."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = {"formatter_class": argparse.ArgumentDefaultsHelpFormatter}

    plan = sub.add_parser("plan", help="generate plans for every class of a release",
                          **fmt)
    plan.add_argument("--planner", required=True, choices=PLANNER_NAMES)
    plan.add_argument("--train", nargs="+", required=True,
                      help="training CSV(s); several files are pooled")
    plan.add_argument("--test", required=True, help="release CSV to plan for")
    plan.add_argument("--out", required=True)
    plan.add_argument("--format", choices=("json", "csv"),
                      default=_env("FORMAT", "json", str))
    _add_planner_options(plan)
    plan.set_defaults(func=_cmd_plan)

    bell = sub.add_parser("bellwether", help="discover a community's exemplar project",
                          **fmt)
    bell.add_argument("--community", required=True,
                      help="directory of <project>/<version>.csv subdirectories")
    bell.add_argument("--out", required=True)
    bell.add_argument("--quality-measure", choices=sorted(QUALITY_MEASURES),
                      default=_env("QUALITY_MEASURE", "g-score", str))
    bell.set_defaults(func=_cmd_bellwether)

    ev = sub.add_parser("evaluate", help="run the three-version protocol per window",
                        **fmt)
    ev.add_argument("--planner", required=True, choices=PLANNER_NAMES + ("all",))
    ev.add_argument("--project-dir", help="directory of one project's version CSVs")
    ev.add_argument("--community", help="community directory (needed for belltree)")
    ev.add_argument("--target", help="project to evaluate when using --community")
    ev.add_argument("--out-dir", required=True,
                    help="result directory; keep it outside the data directories")
    ev.add_argument("--epsilon", type=float, default=_env("EPSILON", 0.0, float),
                    help="relative tolerance when diffing developer changes")
    ev.add_argument("--quality-measure", choices=sorted(QUALITY_MEASURES),
                    default=_env("QUALITY_MEASURE", "g-score", str))
    _add_planner_options(ev)
    ev.set_defaults(func=_cmd_evaluate)

    thresholds = sub.add_parser("thresholds", help="dump a baseline's threshold rules",
                                **fmt)
    thresholds.add_argument("--planner", required=True, choices=BASELINE_NAMES)
    thresholds.add_argument("--train", nargs="+", required=True)
    thresholds.add_argument("--out", required=True)
    _add_planner_options(thresholds)
    thresholds.set_defaults(func=_cmd_thresholds)

    tree = sub.add_parser("tree", help="dump the fitted defect tree as JSON",
                          **fmt)
    tree.add_argument("--train", nargs="+", required=True)
    tree.add_argument("--out", required=True)
    _add_planner_options(tree)
    tree.set_defaults(func=_cmd_tree)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DatasetError, ValueError, OSError) as exc:
        print(f"planwise: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
