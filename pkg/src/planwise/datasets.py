"""Versioned defect datasets: loading, validation, and release-to-release diffing.

Datasets follow the PROMISE/Jureczko CSV layout: one row per code class,
20 object-oriented metric columns, and a raw defect count.
"""

from __future__ import annotations

import csv
import re
import warnings
from dataclasses import dataclass
from pathlib import Path

# Canonical metric universe. Order is stable and used everywhere plans are
# printed or compared.
METRICS: tuple[str, ...] = (
    "wmc", "dit", "noc", "cbo", "rfc", "lcom", "ca", "ce", "npm", "lcom3",
    "loc", "dam", "moa", "mfa", "cam", "ic", "cbm", "amc", "max_cc", "avg_cc",
)

METRIC_SET = frozenset(METRICS)

# Accepted header aliases for the defect-count column.
DEFECT_ALIASES = ("bug", "bugs", "defects")

# Actions a plan or a developer diff can assign to one metric.
INCREASE = "+"
DECREASE = "-"
NO_CHANGE = "."
ACTIONS = (INCREASE, DECREASE, NO_CHANGE)

ActionVector = dict[str, str]


class DatasetError(ValueError):
    """Raised when a dataset file violates the expected schema."""


@dataclass(frozen=True)
class ClassRecord:
    """One code class: identifier, 20 metric values, raw defect count."""

    class_name: str
    metrics: dict[str, float]
    defects: int

    def __post_init__(self) -> None:
        missing = METRIC_SET - self.metrics.keys()
        if missing:
            raise DatasetError(
                f"record {self.class_name!r} missing metrics: {sorted(missing)}"
            )
        if self.defects < 0:
            raise DatasetError(f"record {self.class_name!r} has negative defects")

    def is_defective(self) -> bool:
        return self.defects > 0


@dataclass(frozen=True)
class VersionedDataset:
    """All class records of one release of one project."""

    project: str
    version: str
    released_order: int
    records: tuple[ClassRecord, ...]

    def __post_init__(self) -> None:
        if not self.records:
            raise DatasetError(f"{self.project} {self.version}: empty dataset")
        seen: set[str] = set()
        for rec in self.records:
            if rec.class_name in seen:
                raise DatasetError(
                    f"{self.project} {self.version}: duplicate class name "
                    f"{rec.class_name!r}"
                )
            seen.add(rec.class_name)

    def __len__(self) -> int:
        return len(self.records)

    def by_name(self) -> dict[str, ClassRecord]:
        return {r.class_name: r for r in self.records}

    def total_defects(self) -> int:
        return sum(r.defects for r in self.records)


@dataclass(frozen=True)
class Project:
    """Chronologically ordered releases of one software project."""

    name: str
    versions: tuple[VersionedDataset, ...]

    def __post_init__(self) -> None:
        if not self.versions:
            raise DatasetError(f"project {self.name!r} has no versions")
        orders = [v.released_order for v in self.versions]
        if any(b <= a for a, b in zip(orders, orders[1:])):
            raise DatasetError(
                f"project {self.name!r}: versions not strictly ordered by release"
            )


@dataclass(frozen=True)
class Community:
    """A set of projects maintained by one community of developers."""

    projects: tuple[Project, ...]

    def __post_init__(self) -> None:
        if not self.projects:
            raise DatasetError("community has no projects")

    def project_names(self) -> list[str]:
        return [p.name for p in self.projects]

    def get(self, name: str) -> Project:
        for p in self.projects:
            if p.name == name:
                return p
        raise KeyError(name)


def _normalize_header(name: str) -> str:
    return name.strip().lower().replace(" ", "_")


def _parse_number(cell: str, row: int, column: str) -> float:
    try:
        return float(cell)
    except ValueError:
        raise DatasetError(
            f"row {row}: non-numeric value {cell!r} in column {column!r}"
        ) from None


def load_csv(path: str | Path, released_order: int = 0) -> VersionedDataset:
    """Load one release CSV into a validated dataset.

    The header must name the 20 metric columns, a class identifier column
    (``name``; in the Jureczko layout the first ``name`` column is the
    project and the last is the class), and a defect column (``bug``,
    ``bugs``, or ``defects``). Extra columns are ignored with a warning.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            raw_header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: empty dataset") from None
        header = [_normalize_header(h) for h in raw_header]

        name_cols = [i for i, h in enumerate(header) if h in ("name", "name.1")]
        if not name_cols:
            raise DatasetError(f"{path}: missing column 'name'")
        class_col = name_cols[-1]
        project_col = name_cols[0] if len(name_cols) > 1 else None

        version_col = header.index("version") if "version" in header else None
        defect_col = None
        for alias in DEFECT_ALIASES:
            if alias in header:
                defect_col = header.index(alias)
                break
        if defect_col is None:
            raise DatasetError(
                f"{path}: missing defect column (one of {', '.join(DEFECT_ALIASES)})"
            )

        metric_cols: dict[str, int] = {}
        for metric in METRICS:
            if metric not in header:
                raise DatasetError(f"{path}: missing column {metric!r}")
            metric_cols[metric] = header.index(metric)

        known = set(metric_cols.values()) | set(name_cols) | {defect_col}
        if version_col is not None:
            known.add(version_col)
        extra = [raw_header[i] for i in range(len(header)) if i not in known]
        if extra:
            warnings.warn(f"{path}: ignoring extra columns {extra}", stacklevel=2)

        project = None
        version = None
        records: list[ClassRecord] = []
        seen: set[str] = set()
        for row_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) < len(header):
                raise DatasetError(f"{path}: row {row_no} has too few cells")
            class_name = row[class_col].strip()
            if not class_name:
                raise DatasetError(f"{path}: row {row_no} has empty class name")
            if class_name in seen:
                raise DatasetError(
                    f"{path}: row {row_no}: duplicate class name {class_name!r}"
                )
            seen.add(class_name)
            if project_col is not None and project is None:
                project = row[project_col].strip()
            if version_col is not None and version is None:
                version = row[version_col].strip()

            metrics = {
                m: _parse_number(row[i], row_no, m) for m, i in metric_cols.items()
            }
            raw_defects = _parse_number(row[defect_col], row_no, raw_header[defect_col])
            if raw_defects < 0 or raw_defects != int(raw_defects):
                raise DatasetError(
                    f"{path}: row {row_no}: defect count must be a non-negative "
                    f"integer, got {raw_defects}"
                )
            records.append(ClassRecord(class_name, metrics, int(raw_defects)))

    if not records:
        raise DatasetError(f"{path}: empty dataset")
    if project is None or version is None:
        stem_project, stem_version = _split_stem(path.stem)
        project = project or stem_project
        version = version or stem_version
    return VersionedDataset(project, version, released_order, tuple(records))


def _split_stem(stem: str) -> tuple[str, str]:
    """Split a file stem like ``ant-1.7`` into project and version parts."""
    m = re.match(r"^(.*?)[-_]v?(\d[\w.]*)$", stem)
    if m:
        return m.group(1), m.group(2)
    return stem, "0"


def write_csv(dataset: VersionedDataset, path: str | Path) -> None:
    """Serialize a dataset back to the canonical CSV layout."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["name", "version", "name"] + list(METRICS) + ["bug"])
        for rec in dataset.records:
            row = [dataset.project, dataset.version, rec.class_name]
            row += [repr(rec.metrics[m]) for m in METRICS]
            row.append(str(rec.defects))
            writer.writerow(row)


def version_sort_key(label: str) -> tuple:
    """Order version labels numerically where possible (1.9 < 1.10)."""
    parts = re.split(r"(\d+)", label)
    return tuple(int(p) if p.isdigit() else p for p in parts if p != "")


def load_project(paths: list[str | Path], name: str | None = None) -> Project:
    """Load several release CSVs of one project, ordered by version label."""
    if not paths:
        raise DatasetError("no version CSVs given")
    loaded = [load_csv(p) for p in paths]
    loaded.sort(key=lambda d: version_sort_key(d.version))
    versions = tuple(
        VersionedDataset(d.project, d.version, order, d.records)
        for order, d in enumerate(loaded)
    )
    return Project(name or versions[0].project, versions)


def load_community(root: str | Path) -> Community:
    """Load a community from ``root/<project>/<version>.csv`` subdirectories."""
    root = Path(root)
    projects = []
    for sub in sorted(p for p in root.iterdir() if p.is_dir()):
        csvs = sorted(sub.glob("*.csv"))
        if not csvs:
            continue
        projects.append(load_project(list(csvs), name=sub.name))
    if not projects:
        raise DatasetError(f"{root}: no project subdirectories with CSV files")
    return Community(tuple(projects))


def pool_versions(project: Project) -> VersionedDataset:
    """Pool all releases of a project into one training dataset.

    Class names colliding across releases are disambiguated with a version
    prefix so the pooled dataset keeps the unique-name invariant.
    """
    records: list[ClassRecord] = []
    seen: set[str] = set()
    for version in project.versions:
        for rec in version.records:
            name = rec.class_name
            if name in seen:
                name = f"{version.version}:{rec.class_name}"
            seen.add(name)
            records.append(ClassRecord(name, rec.metrics, rec.defects))
    return VersionedDataset(project.name, "pooled", 0, tuple(records))


def diff_versions(
    old: VersionedDataset, new: VersionedDataset, epsilon: float = 0.0
) -> dict[str, ActionVector]:
    """Per-metric developer actions between two releases.

    For every class present in both releases, each metric gets ``+`` if the
    new value exceeds ``old * (1 + epsilon)``, ``-`` if it falls below
    ``old * (1 - epsilon)``, and ``.`` otherwise. Classes present in only
    one release are excluded.
    """
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    new_by_name = new.by_name()
    out: dict[str, ActionVector] = {}
    for old_rec in old.records:
        name = old_rec.class_name
        new_rec = new_by_name.get(name)
        if new_rec is None:
            continue
        vector: ActionVector = {}
        for metric in METRICS:
            before = old_rec.metrics[metric]
            after = new_rec.metrics[metric]
            if after > before * (1.0 + epsilon):
                vector[metric] = INCREASE
            elif after < before * (1.0 - epsilon):
                vector[metric] = DECREASE
            else:
                vector[metric] = NO_CHANGE
        out[name] = vector
    return out
