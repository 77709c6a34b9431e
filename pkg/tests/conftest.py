"""Shared builders for synthetic datasets and optional real-corpus access."""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import pytest

from planwise.datasets import (
    METRICS,
    ClassRecord,
    Community,
    Project,
    VersionedDataset,
)

# Version CSVs of the public Jureczko corpus, as ``<project>/<project>-<v>.csv``
# subdirectories. Populate with scripts/fetch_jureczko.py (needs network).
DATA_DIR_ENV = "PLANWISE_DATA_DIR"
DEFAULT_DATA_DIR = Path(__file__).parent / "data" / "jureczko"


def make_record(
    name: str, defects: int = 0, base: float = 1.0, **overrides: float
) -> ClassRecord:
    """A record with every metric at ``base`` except the given overrides."""
    metrics = {m: base for m in METRICS}
    for key, value in overrides.items():
        if key not in metrics:
            raise KeyError(f"unknown metric {key!r}")
        metrics[key] = float(value)
    return ClassRecord(name, metrics, defects)


def make_dataset(
    records: list[ClassRecord],
    project: str = "proj",
    version: str = "1",
    order: int = 0,
) -> VersionedDataset:
    return VersionedDataset(project, version, order, tuple(records))


def make_project(versions: list[VersionedDataset], name: str = "proj") -> Project:
    return Project(name, tuple(versions))


def planted_community(seed: int, n: int = 200) -> Community:
    """Three projects where "exemplar" is drawn from the union distribution.

    "alpha" classes get defective when wmc grows, "beta" classes when cbo
    grows; "exemplar" mixes both regimes, so only its data trains a
    predictor that works on both neighbors.
    """
    rng = np.random.default_rng(seed)

    def wmc_driven(name: str) -> ClassRecord:
        wmc = float(rng.uniform(0, 60))
        return make_record(
            name,
            defects=3 if wmc > 30 else 0,
            wmc=wmc,
            cbo=float(rng.uniform(0, 5)),
            loc=float(rng.uniform(10, 500)),
        )

    def cbo_driven(name: str) -> ClassRecord:
        cbo = float(rng.uniform(0, 40))
        return make_record(
            name,
            defects=2 if cbo > 20 else 0,
            cbo=cbo,
            wmc=float(rng.uniform(0, 5)),
            loc=float(rng.uniform(10, 500)),
        )

    alpha = make_dataset(
        [wmc_driven(f"a{i}") for i in range(n)], project="alpha"
    )
    beta = make_dataset(
        [cbo_driven(f"b{i}") for i in range(n)], project="beta"
    )
    half = n // 2
    mixed = [wmc_driven(f"e{i}") for i in range(half)]
    mixed += [cbo_driven(f"e{half + i}") for i in range(n - half)]
    exemplar = make_dataset(mixed, project="exemplar")
    return Community(
        (
            Project("alpha", (alpha,)),
            Project("beta", (beta,)),
            Project("exemplar", (exemplar,)),
        )
    )


@pytest.fixture
def jureczko_root() -> Path:
    root = Path(os.environ.get(DATA_DIR_ENV, DEFAULT_DATA_DIR))
    if not root.is_dir() or not any(root.glob("*/*.csv")):
        pytest.skip(
            f"public Jureczko CSVs not available under {root} "
            f"(set {DATA_DIR_ENV} or run scripts/fetch_jureczko.py with network "
            "access); published-results checks skipped"
        )
    return root
