"""
Structured results of identity checks and their CSV/JSON persistence
"""

import csv
import io
import json
import logging
import math
import os
import sys
import time
from dataclasses import dataclass, field
from datetime import datetime
from typing import Dict, Iterable, List, Optional, Sequence

logger = logging.getLogger(__name__)

REPORT_FIELDS = ("check_name", "max_residual", "witness", "pass", "elapsed_ms")
GRAM_FIELDS = ("n1", "k1", "n2", "k2", "value", "expected", "abs_err")


@dataclass
class OpReport:
    check_name: str
    max_residual: float
    witness: str
    passed: bool
    elapsed_ms: int
    tolerance: float = 0.0
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict:
        residual = self.max_residual if math.isfinite(self.max_residual) else None
        return {
            "check_name": self.check_name,
            "max_residual": residual,
            "witness": self.witness,
            "pass": self.passed,
            "elapsed_ms": self.elapsed_ms,
        }


class ResidualTracker:
    """Keeps the largest residual seen and where it occurred"""

    def __init__(self, check_name: str, tolerance: float):
        self.check_name = check_name
        self.tolerance = tolerance
        self.max_residual = 0.0
        self.witness = "none"
        self.notes: List[str] = []
        self._started = time.perf_counter()

    def record(self, residual, witness) -> None:
        residual = float(abs(residual))
        if math.isnan(residual):
            residual = math.inf
        if residual > self.max_residual or self.witness == "none":
            self.max_residual = residual
            self.witness = str(witness)

    def note(self, message: str) -> None:
        self.notes.append(message)

    def fail(self, witness) -> None:
        self.max_residual = math.inf
        self.witness = str(witness)

    def report(self) -> OpReport:
        elapsed = int(round((time.perf_counter() - self._started) * 1000))
        passed = self.max_residual <= self.tolerance
        report = OpReport(
            self.check_name, self.max_residual, self.witness, passed, elapsed,
            self.tolerance, list(self.notes),
        )
        level = logging.INFO if passed else logging.WARNING
        logger.log(level, f"{self.check_name}: max residual {self.max_residual:.3e} at {self.witness}")
        return report


def failed_report(check_name: str, error: BaseException, started: float) -> OpReport:
    elapsed = int(round((time.perf_counter() - started) * 1000))
    return OpReport(check_name, math.inf, f"{type(error).__name__}: {error}", False, elapsed)


def _open_target(path: Optional[str]):
    if path is None:
        return sys.stdout, False
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    return open(path, "w", encoding="utf-8", newline=""), True


def _clean(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def write_rows(rows: Sequence[Dict], columns: Sequence[str], fmt: str, path: Optional[str] = None) -> str:
    """Write rows as CSV or JSON to path (stdout when None); returns the text"""
    buffer = io.StringIO()
    if fmt == "csv":
        writer = csv.DictWriter(buffer, fieldnames=list(columns), extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    elif fmt == "json":
        json.dump(
            [{k: _clean(row.get(k)) for k in columns} for row in rows],
            buffer, indent=2, ensure_ascii=False,
        )
        buffer.write("\n")
    else:
        raise ValueError(f"unknown output format '{fmt}'")
    text = buffer.getvalue()
    target, owned = _open_target(path)
    try:
        target.write(text)
    finally:
        if owned:
            target.close()
    return text


def write_reports(reports: Iterable[OpReport], fmt: str, path: Optional[str] = None) -> str:
    rows = [r.to_dict() for r in sorted(reports, key=lambda r: r.check_name)]
    return write_rows(rows, REPORT_FIELDS, fmt, path)


def load_deviations(path: str) -> List[Dict]:
    if os.path.exists(path):
        try:
            with open(path, "r", encoding="utf-8") as f:
                return json.load(f).get("deviations", [])
        except (OSError, ValueError):
            logger.warning(f"could not read deviations file {path}; starting fresh")
    return []


DEVIATION_KEY = ("coefficient", "n", "k", "multiplier", "params")


def merge_deviations(existing: Sequence[Dict], new: Sequence[Dict]) -> List[Dict]:
    """Union keyed on DEVIATION_KEY; a newer row replaces an older one"""
    merged = {}
    for row in list(existing) + list(new):
        merged[tuple(row.get(k) for k in DEVIATION_KEY)] = row
    return list(merged.values())


def save_deviations(deviations: List[Dict], path: str) -> None:
    """Write the machine-readable deviations report"""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    payload = {
        "generated": datetime.now().isoformat(timespec="seconds"),
        "count": len(deviations),
        "deviations": deviations,
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, ensure_ascii=False)
    logger.info(f"wrote {len(deviations)} deviations to {path}")


def summarize(reports: Sequence[OpReport]) -> Dict:
    passed = sum(1 for r in reports if r.passed)
    return {"total": len(reports), "passed": passed, "failed": len(reports) - passed}
