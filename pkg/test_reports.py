"""Tests for OpReport bookkeeping and the CSV/JSON writers"""

import csv
import io
import json
import logging
import math
import os
import tempfile
import time
import unittest

from reports import (
    GRAM_FIELDS,
    REPORT_FIELDS,
    OpReport,
    ResidualTracker,
    failed_report,
    load_deviations,
    merge_deviations,
    save_deviations,
    summarize,
    write_reports,
    write_rows,
)

logging.basicConfig(level=logging.WARNING)


class TrackerTests(unittest.TestCase):
    def test_keeps_largest_residual(self):
        tracker = ResidualTracker("demo", 1e-3)
        tracker.record(1e-5, "a")
        tracker.record(-2e-4, "b")
        tracker.record(1e-6, "c")
        report = tracker.report()
        self.assertEqual(report.max_residual, 2e-4)
        self.assertEqual(report.witness, "b")
        self.assertTrue(report.passed)

    def test_exact_tolerance_and_nan(self):
        tracker = ResidualTracker("exact", 0.0)
        tracker.record(0, "zero")
        self.assertTrue(tracker.report().passed)
        tracker.record(float("nan"), "nan")
        report = tracker.report()
        self.assertFalse(report.passed)
        self.assertEqual(report.max_residual, math.inf)

    def test_fail_and_notes(self):
        tracker = ResidualTracker("explicit", 1.0)
        tracker.note("hello")
        tracker.fail("broken")
        report = tracker.report()
        self.assertFalse(report.passed)
        self.assertEqual(report.notes, ["hello"])

    def test_failed_report(self):
        report = failed_report("boom", ValueError("bad"), time.perf_counter())
        self.assertFalse(report.passed)
        self.assertEqual(report.witness, "ValueError: bad")

    def test_summary(self):
        reports = [OpReport("a", 0.0, "x", True, 1), OpReport("b", 1.0, "y", False, 1)]
        self.assertEqual(summarize(reports), {"total": 2, "passed": 1, "failed": 1})


class WriterTests(unittest.TestCase):
    def test_report_schema(self):
        report = OpReport("a", math.inf, "w", False, 3)
        row = report.to_dict()
        self.assertEqual(tuple(row), REPORT_FIELDS)
        self.assertIsNone(row["max_residual"])

    def test_json_reports_sorted(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "nested", "reports.json")
            write_reports([OpReport("b", 0.5, "y", True, 2), OpReport("a", 0.25, "x", True, 1)], "json", path)
            with open(path, encoding="utf-8") as f:
                rows = json.load(f)
        self.assertEqual([r["check_name"] for r in rows], ["a", "b"])
        self.assertEqual(rows[0]["max_residual"], 0.25)

    def test_csv_keeps_full_precision(self):
        value = 1 / 3
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "gram.csv")
            row = {"n1": 0, "k1": 0, "n2": 0, "k2": 0, "value": value, "expected": value, "abs_err": 0.0}
            write_rows([row], GRAM_FIELDS, "csv", path)
            with open(path, encoding="utf-8", newline="") as f:
                rows = list(csv.DictReader(f))
        self.assertEqual(list(rows[0]), list(GRAM_FIELDS))
        self.assertEqual(float(rows[0]["value"]), value)

    def test_returns_text_and_rejects_unknown_format(self):
        text = write_rows([{"a": 1}], ("a",), "csv", os.devnull)
        self.assertEqual(list(csv.reader(io.StringIO(text))), [["a"], ["1"]])
        with self.assertRaises(ValueError):
            write_rows([], ("a",), "xml", os.devnull)


class DeviationFileTests(unittest.TestCase):
    def test_save_and_load(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "output", "deviations.json")
            self.assertEqual(load_deviations(path), [])
            save_deviations([{"coefficient": "g_nk", "n": 1}], path)
            self.assertEqual(load_deviations(path), [{"coefficient": "g_nk", "n": 1}])
            with open(path, encoding="utf-8") as f:
                self.assertEqual(json.load(f)["count"], 1)

    def test_repeated_runs_do_not_duplicate(self):
        row = {"coefficient": "s_nk", "n": 2, "k": 1, "multiplier": "x", "params": "(1/2, 1/2, 1/2, 1/5)", "formula": "1"}
        newer = dict(row, formula="2")
        other = dict(row, k=0)
        merged = merge_deviations([row, other], [newer])
        self.assertEqual(len(merged), 2)
        self.assertIn(newer, merged)
        self.assertNotIn(row, merged)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "deviations.json")
            for _ in range(3):
                save_deviations(merge_deviations(load_deviations(path), [row, other]), path)
            self.assertEqual(len(load_deviations(path)), 2)

    def test_corrupt_file_starts_fresh(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "deviations.json")
            with open(path, "w", encoding="utf-8") as f:
                f.write("{not json")
            self.assertEqual(load_deviations(path), [])


if __name__ == "__main__":
    unittest.main(verbosity=2)
