"""Regenerate data/golden_summary.json from the bundled dataset.

Runs the simulate command on data/synthetic_market.csv with
data/scenario.json over the final bundled week and commits the resulting
summary as the golden file the test suite compares against. Run whenever
the bundled dataset or the simulation pipeline intentionally changes.

Run from the repo root:  python3 scripts/refresh_golden.py
"""

from __future__ import annotations

import shutil
import tempfile
from pathlib import Path

from drspot.cli import main

ROOT = Path(__file__).resolve().parents[1]
GOLDEN = ROOT / "data" / "golden_summary.json"

WINDOW_START = "2021-08-09"
DAYS = "7"


def refresh() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        rc = main(
            [
                "simulate",
                "--data", str(ROOT / "data" / "synthetic_market.csv"),
                "--config", str(ROOT / "data" / "scenario.json"),
                "--window-start", WINDOW_START,
                "--days", DAYS,
                "--out", tmp,
            ]
        )
        if rc != 0:
            raise SystemExit(f"simulate failed with exit code {rc}")
        shutil.copyfile(Path(tmp) / "summary.json", GOLDEN)
    print(f"wrote {GOLDEN}")


if __name__ == "__main__":
    refresh()
