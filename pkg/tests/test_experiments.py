import logging

import pandas as pd
import pytest

from core.exceptions import ParameterError
from core.experiments import (CSV_COLUMNS, ExperimentRunner, ScanRecord, discrepancy_scan, fit_power_law,
                              scaling_scan, write_csv)
from utils.progress_tracker import ScanProgressTracker
from utils.scan_statistics import ScanStatistics

HEADER = ','.join(CSV_COLUMNS)


class TestDiscrepancyScan:
    def test_records(self, toric_code):
        code = toric_code(4)
        records = discrepancy_scan(code, [0, 4, 8, 16, 32], samples_per_point=6, seed=3)
        assert [r.n_a for r in records] == [0, 4, 8, 16, 32]
        assert all(r.samples == 6 for r in records)
        assert records[0].mean_s == 0 and records[-1].mean_s == 0
        assert records[-1].i_a == 32
        for record in records:
            assert 0 <= record.mean_s <= min(record.n_a, code.n - record.n_a)
            assert record.i_a == record.n_a - record.mean_s
            assert record.di_dn is not None

    def test_grid_is_sorted_and_deduplicated(self, hamming_code):
        records = discrepancy_scan(hamming_code, [3, 1, 3], samples_per_point=2, seed=0)
        assert [r.n_a for r in records] == [1, 3]

    @pytest.mark.parametrize('grid,samples', [([0, 8], 0), ([9], 1), ([-1], 1)])
    def test_bad_arguments(self, hamming_code, grid, samples):
        with pytest.raises(ParameterError):
            discrepancy_scan(hamming_code, grid, samples, seed=0)

    def test_parallel_matches_serial(self, toric_code, tmp_path):
        code = toric_code(4)
        serial = ExperimentRunner(code, workers=1).discrepancy_scan([2, 10, 20], 5, seed=12)
        parallel = ExperimentRunner(code, workers=8).discrepancy_scan([2, 10, 20], 5, seed=12)
        write_csv(serial, tmp_path / 'serial.csv', code.name, code.n)
        write_csv(parallel, tmp_path / 'parallel.csv', code.name, code.n)
        assert (tmp_path / 'serial.csv').read_bytes() == (tmp_path / 'parallel.csv').read_bytes()

    def test_parallel_scan_reports_progress(self, toric_code, caplog):
        caplog.set_level(logging.INFO, logger='utils.progress_tracker')
        ExperimentRunner(toric_code(3), workers=2).discrepancy_scan([3, 6], 5, seed=1)
        assert any('(5/10)' in message for message in caplog.messages)


class TestScalingScan:
    def test_records_and_fit(self, toric_code):
        code = toric_code(8)
        records, fit = scaling_scan(code, repeats=4, seed=1)
        assert records[0].n_a == 4
        assert all(2 * r.n_a <= code.n for r in records)
        assert all(1 <= r.samples <= 4 for r in records)
        for record in records:
            assert 0 <= record.mean_s <= min(record.n_a, code.n - record.n_a)
        assert 0 < fit.gamma < 1.5
        assert fit.points >= 2

    def test_seed_reproducible(self, toric_code):
        code = toric_code(6)
        first, _ = scaling_scan(code, repeats=3, seed=5)
        second, _ = scaling_scan(code, repeats=3, seed=5, workers=2)
        assert first == second

    def test_too_few_points_gives_no_fit(self, toric_code, tmp_path):
        code = toric_code(2)
        records, fit = scaling_scan(code, repeats=3, seed=0)
        assert fit is None
        assert [r.n_a for r in records] == [4]
        write_csv(records, tmp_path / 'small.csv', code.name, code.n, fit)
        assert len((tmp_path / 'small.csv').read_text().splitlines()) == 2
        assert not (tmp_path / 'small.fit.csv').exists()

    def test_bad_repeats(self, toric_code):
        with pytest.raises(ParameterError):
            scaling_scan(toric_code(4), repeats=0, seed=0)


class TestStatistics:
    def test_power_law_recovers_exponent(self):
        n_a = [4, 8, 16, 32, 64]
        fit = fit_power_law(n_a, [2.0 * x ** 0.5 for x in n_a])
        assert fit.gamma == pytest.approx(0.5)
        assert fit.prefactor == pytest.approx(2.0)
        assert fit.r_squared == pytest.approx(1.0)

    def test_zero_entropies_are_skipped(self):
        fit = fit_power_law([1, 2, 4, 8], [0.0, 2.0, 4.0, 8.0])
        assert fit.points == 3
        assert fit.gamma == pytest.approx(1.0)

    def test_too_few_points(self):
        with pytest.raises(ParameterError):
            fit_power_law([1, 2], [0.0, 1.0])

    def test_finite_difference_uses_grid_spacing(self):
        slopes = ScanStatistics().finite_difference([0, 2, 6], [0.0, 4.0, 8.0])
        assert slopes == pytest.approx([2.0, 8.0 / 6.0, 1.0])
        assert ScanStatistics().finite_difference([3], [1.0]) == [None]

    def test_steepness(self):
        steepness = ScanStatistics().transition_steepness([0, 10, 20, 30], [0.0, 0.0, 2.0, 2.0], 40)
        assert steepness == pytest.approx(4.0)


class TestWriteCsv:
    def test_empty(self, tmp_path):
        path = tmp_path / 'empty.csv'
        write_csv([], path, 'toric-d2', 8)
        assert path.read_text() == HEADER + '\n'

    def test_single_record(self, tmp_path):
        path = tmp_path / 'one.csv'
        write_csv([ScanRecord(4, 10, 3.0, 0.5, 1.0)], path, 'toric-d2', 8)
        lines = path.read_text().splitlines()
        assert lines == [HEADER, 'toric-d2,8,4,10,3.000000,0.500000,1.000000,']

    def test_fit_sidecar(self, tmp_path, toric_code):
        code = toric_code(6)
        records, fit = scaling_scan(code, repeats=2, seed=0)
        path = tmp_path / 'scaling.csv'
        write_csv(records, path, code.name, code.n, fit)
        table = pd.read_csv(tmp_path / 'scaling.fit.csv')
        assert list(table.columns) == ['code', 'gamma', 'prefactor', 'r_squared']
        assert table['gamma'][0] == pytest.approx(fit.gamma, abs=1e-6)
        assert len(pd.read_csv(path)) == len(records)

    def test_missing_directory(self, tmp_path):
        with pytest.raises(OSError):
            write_csv([], tmp_path / 'missing' / 'out.csv', 'x', 1)


class TestProgressTracker:
    def test_progress_info(self):
        tracker = ScanProgressTracker('scan', 8)
        tracker.update_step(2)
        info = tracker.get_progress_info()
        assert info['progress_percentage'] == pytest.approx(25.0)
        assert not info['is_complete']
        tracker.update_step(8)
        assert tracker.get_progress_info()['is_complete']

    @pytest.mark.parametrize('seconds,text', [(12.34, '12.3s'), (125, '2m 05s'), (7260, '2h 1m')])
    def test_format_time(self, seconds, text):
        assert ScanProgressTracker('scan', 1)._format_time(seconds) == text
