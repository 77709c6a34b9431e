#!/usr/bin/env python3
"""Download the public Jureczko defect CSVs used by the corpus-level tests.

Needs outbound network access. Files land in tests/data/jureczko/<project>/
by default (override with --dest or PLANWISE_DATA_DIR). Any mirror of the
PROMISE/Jureczko class-level CSVs works; if the known mirrors move, drop the
files into that layout by hand.
"""

from __future__ import annotations

import argparse
import os
import sys
import urllib.error
import urllib.request
from pathlib import Path

PROJECT_VERSIONS = {
    "ant": ["1.3", "1.4", "1.5", "1.6", "1.7"],
    "camel": ["1.0", "1.2", "1.4", "1.6"],
    "ivy": ["1.1", "1.4", "2.0"],
    "jedit": ["3.2", "4.0", "4.1", "4.2", "4.3"],
    "log4j": ["1.0", "1.1", "1.2"],
    "lucene": ["2.0", "2.2", "2.4"],
    "poi": ["1.5", "2.0", "2.5", "3.0"],
    "velocity": ["1.4", "1.5", "1.6"],
    "xalan": ["2.4", "2.5", "2.6", "2.7"],
    "xerces": ["1.0", "1.2", "1.3", "1.4"],
}

# Candidate URL templates, tried in order. Some mirrors name xerces-1.0
# "xerces-init"; the alias below covers that.
URL_TEMPLATES = [
    "https://raw.githubusercontent.com/feiwww/PROMISE-backup/master/bug-data/{project}/{project}-{version}.csv",
    "https://raw.githubusercontent.com/klainfo/DefectData/master/inst/extdata/terapromise/ck/{project}/{project}-{version}.csv",
]

ALIASES = {("xerces", "1.0"): [("xerces", "init")]}


def fetch(url: str, timeout: float = 30.0) -> bytes | None:
    try:
        with urllib.request.urlopen(url, timeout=timeout) as response:
            if response.status != 200:
                return None
            return response.read()
    except (urllib.error.URLError, OSError):
        return None


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    default_dest = os.environ.get(
        "PLANWISE_DATA_DIR",
        Path(__file__).resolve().parent.parent / "tests" / "data" / "jureczko",
    )
    parser.add_argument("--dest", type=Path, default=Path(default_dest))
    args = parser.parse_args()

    missing = []
    for project, versions in PROJECT_VERSIONS.items():
        for version in versions:
            target = args.dest / project / f"{project}-{version}.csv"
            if target.exists():
                print(f"have    {target}")
                continue
            names = [(project, version)] + ALIASES.get((project, version), [])
            payload = None
            for proj_name, ver_name in names:
                for template in URL_TEMPLATES:
                    url = template.format(project=proj_name, version=ver_name)
                    payload = fetch(url)
                    if payload:
                        break
                if payload:
                    break
            if payload is None:
                print(f"MISSING {project}-{version} (no mirror answered)")
                missing.append(f"{project}-{version}")
                continue
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(payload)
            print(f"fetched {target}")

    if missing:
        print(f"\n{len(missing)} file(s) could not be fetched: {', '.join(missing)}")
        return 1
    print("\ncorpus complete")
    return 0


if __name__ == "__main__":
    sys.exit(main())
