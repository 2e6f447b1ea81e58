"""Bundled reference timing fixtures for the analysis pipeline.

These CSVs carry one mean runtime per (strategy, qubit count) cell in the
standard results format.  The absolute values are synthetic anchors, not
measurements: they are constructed so that the derived step ratios, cliff
flags, and CPU/GPU speedup columns match the reference characterization
this tool reproduces.  Use them to exercise `analyze`/`plot` without
running a multi-hour sweep.
"""
from __future__ import annotations

from pathlib import Path

GHZ_MEANS = "ghz_reference_means.csv"
QFT_MEANS = "qft_reference_means.csv"

_DIR = Path(__file__).resolve().parent


def fixture_path(name: str) -> Path:
    """Absolute path of a bundled fixture file."""
    path = _DIR / name
    if not path.is_file():
        raise FileNotFoundError(f"no bundled fixture named {name!r}")
    return path


def list_fixtures() -> list[str]:
    return sorted(p.name for p in _DIR.glob("*.csv"))
