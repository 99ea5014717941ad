import numpy as np
import pytest

from corrtwo import DataError, run_bench
from corrtwo.bench import BenchReport, _relative_max_diff


class TestRunBench:
    def test_single_cell_positive_time(self):
        report = run_bench([(16, 40)], [1], repeats=3)
        assert len(report.rows) == 1
        row = report.rows[0]
        assert row.m == 16 and row.n == 40 and row.workers == 1
        assert row.mean_seconds > 0
        assert row.std_seconds >= 0
        assert row.repeats == 3
        assert report.ratios == {}

    def test_ratio_reported_for_multiple_worker_counts(self):
        report = run_bench([(12, 30)], [1, 2], repeats=3)
        assert (12, 30) in report.ratios
        assert report.ratios[(12, 30)] > 0

    def test_gate_runs_before_timing(self):
        # identical-seed runs across worker counts must agree; a successful
        # bench implies the gate passed
        report = run_bench([(10, 25)], [1, 2, 4], repeats=3)
        assert len(report.rows) == 3

    def test_repeats_validated(self):
        with pytest.raises(DataError, match="repeats"):
            run_bench([(8, 16)], [1], repeats=2)

    def test_sizes_validated(self):
        with pytest.raises(DataError, match="size"):
            run_bench([], [1], repeats=3)

    def test_workers_validated(self):
        with pytest.raises(DataError, match="workers_list"):
            run_bench([(8, 16)], [0], repeats=3)

    def test_hilbert_engine(self):
        report = run_bench([(10, 20)], [1], repeats=3, engine="hilbert")
        assert report.rows[0].engine == "hilbert"

    def test_table_format(self):
        report = run_bench([(8, 16)], [1], repeats=3)
        table = report.to_table()
        assert "mean_s" in table and "speedup ratios" in table


class TestHelpers:
    def test_relative_max_diff(self):
        a = np.array([[1.0, 2.0]])
        assert _relative_max_diff(a, a) == 0.0
        assert _relative_max_diff(a, a * (1 + 1e-13)) < 1e-12

    def test_empty_report_table(self):
        assert "speedup" in BenchReport().to_table()
