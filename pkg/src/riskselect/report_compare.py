"""Comparison of experiment reports against shipped reference tables.

The package ships the published 100-run benchmark tables for all twelve
scenarios as CSV assets (``data/reference_*.csv``), one row per
(scenario, criterion, n) cell, with per-cell tolerance columns.  The
acceptance suite reproduces selected cells and checks them here.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .cli import CSV_HEADER
from .sim import ExperimentReport

REFERENCE_HEADER = CSV_HEADER + ",tol_avg,tol_prop"

_FAMILY_FILES = {
    "mixture": "reference_mixture.csv",
    "regression": "reference_regression.csv",
    "pca": "reference_pca.csv",
}


@dataclass(frozen=True)
class ReferenceRow:
    scenario: str
    criterion: str
    n: int
    avg_ref: float
    prop_ref: float
    tol_avg: float
    tol_prop: float

    def __post_init__(self) -> None:
        if self.tol_avg <= 0 or self.tol_prop <= 0:
            raise ValueError("tolerances must be positive")

    @property
    def key(self) -> tuple[str, str, int]:
        return (self.scenario, self.criterion, self.n)


def parse_reference_csv(text: str) -> list[ReferenceRow]:
    """Parse reference rows; ``#`` comment lines are allowed anywhere."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or lines[0] != REFERENCE_HEADER:
        raise ValueError(f"expected header {REFERENCE_HEADER!r}")
    rows = []
    for ln in lines[1:]:
        scenario, criterion, n, _runs, avg, prop, _failures, tol_avg, tol_prop = ln.split(",")
        rows.append(
            ReferenceRow(
                scenario=scenario,
                criterion=criterion,
                n=int(n),
                avg_ref=float(avg),
                prop_ref=float(prop),
                tol_avg=float(tol_avg),
                tol_prop=float(tol_prop),
            )
        )
    return rows


def load_reference_csv(path: str | Path) -> list[ReferenceRow]:
    return parse_reference_csv(Path(path).read_text(encoding="utf-8"))


def builtin_reference(family: str) -> list[ReferenceRow]:
    """Reference rows shipped with the package: mixture, regression, or pca."""
    try:
        name = _FAMILY_FILES[family]
    except KeyError:
        raise KeyError(f"family must be one of {sorted(_FAMILY_FILES)}, got {family!r}") from None
    text = resources.files("riskselect").joinpath(f"data/{name}").read_text(encoding="utf-8")
    return parse_reference_csv(text)


@dataclass(frozen=True)
class CellComparison:
    ref: ReferenceRow
    avg: float
    prop: float
    delta_avg: float
    delta_prop: float
    passed: bool

    def describe(self) -> str:
        mark = "pass" if self.passed else "FAIL"
        r = self.ref
        return (
            f"{mark} {r.scenario} {r.criterion} n={r.n}: "
            f"avg {self.avg:.2f} vs {r.avg_ref:.2f} (|d|={abs(self.delta_avg):.2f}<={r.tol_avg}), "
            f"prop {self.prop:.2f} vs {r.prop_ref:.2f} (|d|={abs(self.delta_prop):.2f}<={r.tol_prop})"
        )


def compare(report: ExperimentReport, refs: list[ReferenceRow]) -> list[CellComparison]:
    """Match report rows to reference rows and apply the tolerance bands.

    Every reference key must be present in the report; a missing key
    raises ``KeyError`` naming the cell.
    """
    table = {(report.scenario, r.criterion, r.n): r for r in report.rows}
    out = []
    for ref in refs:
        row = table.get(ref.key)
        if row is None:
            raise KeyError(f"report has no row for {ref.key}")
        delta_avg = row.avg - ref.avg_ref
        delta_prop = row.prop - ref.prop_ref
        passed = abs(delta_avg) <= ref.tol_avg and abs(delta_prop) <= ref.tol_prop
        out.append(
            CellComparison(
                ref=ref, avg=row.avg, prop=row.prop,
                delta_avg=delta_avg, delta_prop=delta_prop, passed=passed,
            )
        )
    return out
