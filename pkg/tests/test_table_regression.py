"""Table regression against the published reference values.

Only karate ships with the repository. Point NULLMODEL_DATASETS at a manifest
to check the other datasets as well (see docs/datasets.md).
"""

from __future__ import annotations

import os
from pathlib import Path

import pytest

from cli_report import run_table, table_rows
from data_store import KARATE_FILE, load_manifest
from model import FitOptions

# name -> link -> (valid %, scaled_l2, scaled_sup)
REFERENCE = {
    "karate": {"cloglog": (0, 0.004, 0.01), "log": (0, 0.006, 0.02), "logit": (0, 0.009, 0.03)},
    "football": {"cloglog": (0, 0.02, 0.02), "log": (0, 0.005, 0.01), "logit": (0, 0.02, 0.03)},
    "centrality": {"cloglog": (10, 0.003, 0.01), "log": (19, 0.002, 0.01), "logit": (10, 0.004, 0.02)},
    "jazz": {"cloglog": (6, 0.004, 0.02), "log": (7, 0.002, 0.02), "logit": (4, 0.005, 0.02)},
    "celegans": {"cloglog": (5, 5e-4, 0.004), "log": (36, 6e-4, 0.009), "logit": (5, 6e-4, 0.005)},
    "polblogs": {"cloglog": (42, 9e-4, 0.006), "log": (50, 0.001, 0.02), "logit": (38, 0.002, 0.01)},
    "netscience": {"cloglog": (63, 0.002, 0.01), "log": (75, 0.003, 0.02), "logit": (46, 0.001, 0.01)},
    "power": {"cloglog": (93, 0.001, 0.01), "log": (97, 0.002, 0.02), "logit": (80, 0.001, 0.01)},
    "hep-th": {"cloglog": (87, 9e-4, 0.01), "log": (94, 0.001, 0.02), "logit": (78, 8e-4, 0.009)},
}

DATASETS_MANIFEST = os.environ.get("NULLMODEL_DATASETS")


def _check_row(row) -> None:
    valid, l2, sup = REFERENCE[row.dataset][row.link]
    assert row.converged, f"{row.dataset}/{row.link} did not converge"
    # reference valid % is rounded to whole percent
    assert abs(row.valid_pct - valid) <= 1.0
    assert 0.5 * l2 <= row.scaled_l2 <= 1.5 * l2
    assert 0.5 * sup <= row.scaled_sup <= 1.5 * sup


def test_karate_rows_match_reference():
    rows = table_rows("karate", KARATE_FILE, FitOptions())
    assert [r.link for r in rows] == ["cloglog", "log", "logit"]
    for row in rows:
        assert row.n == 34 and row.x_plus_plus == 156 and row.max_degree == 17
        assert row.valid_pct == 0.0
        _check_row(row)


@pytest.mark.skipif(DATASETS_MANIFEST is None, reason="NULLMODEL_DATASETS not set")
def test_supplied_datasets_match_reference():
    manifest = Path(DATASETS_MANIFEST)
    known = [name for name, _ in load_manifest(manifest) if name in REFERENCE]
    rows = [r for r in run_table(manifest, FitOptions(), jobs=4) if r.dataset in known]
    assert rows
    for row in rows:
        _check_row(row)
