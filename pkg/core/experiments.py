import logging
import multiprocessing
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

import pandas as pd

from core.css_codes import CssCode
from core.entropy import EntropyCalculator, LogicalConstraint
from core.exceptions import ParameterError
from core.sampling import derive_seed, grow_subsystem, random_subsystem
from utils.progress_tracker import ScanProgressTracker
from utils.scan_statistics import PowerFit, ScanStatistics

logger = logging.getLogger(__name__)

CSV_COLUMNS = ['code', 'n', 'n_a', 'samples', 'mean_s', 'std_s', 'i_a', 'di_dn']

# per-process state for pool workers, set by _init_worker
_worker_code: Optional[CssCode] = None
_worker_calculator: Optional[EntropyCalculator] = None


@dataclass
class ScanRecord:
    n_a: int
    samples: int
    mean_s: float
    std_s: float
    i_a: float
    di_dn: Optional[float] = None


def _init_worker(code: CssCode, constraints: Optional[LogicalConstraint]):
    global _worker_code, _worker_calculator
    _worker_code = code
    _worker_calculator = EntropyCalculator(code.hz, constraints)


def _random_entropy(task: Tuple[int, int]) -> int:
    n_a, seed = task
    part = random_subsystem(_worker_code.n, n_a, seed)
    return _worker_calculator.entropy(part)


def _grown_history(seed: int) -> List[Tuple[int, int]]:
    state = grow_subsystem(_worker_code, seed, _worker_calculator)
    return state.history


class ExperimentRunner:
    """Runs sampling scans of one code, serially or on a process pool."""

    def __init__(self, code: CssCode, constraints: Optional[LogicalConstraint] = None, workers: int = 1):
        self.logger = logging.getLogger(__name__)
        if workers < 1:
            raise ParameterError(f"worker count must be positive, got {workers}")
        self.code = code
        self.constraints = constraints
        self.workers = workers
        self.statistics = ScanStatistics()

    def _map(self, func: Callable, tasks: Sequence, label: str) -> List:
        """Ordered map; results do not depend on the worker count."""
        tracker = ScanProgressTracker(label, len(tasks))
        try:
            if self.workers == 1 or len(tasks) < 2:
                _init_worker(self.code, self.constraints)
                results = []
                for step, task in enumerate(tasks, start=1):
                    results.append(func(task))
                    tracker.update_step(step)
            else:
                chunk = max(1, len(tasks) // (self.workers * 8))
                with multiprocessing.Pool(self.workers, initializer=_init_worker,
                                          initargs=(self.code, self.constraints)) as pool:
                    results = []
                    for step, result in enumerate(pool.imap(func, tasks, chunksize=chunk), start=1):
                        results.append(result)
                        tracker.update_step(step)
            tracker.complete()
            return results
        except Exception as e:
            self.logger.error(f"Error during {label}: {str(e)}")
            raise

    def _records(self, grid: List[int], groups: List[List[int]]) -> List[ScanRecord]:
        records = []
        for n_a, values in zip(grid, groups):
            summary = self.statistics.summarize(values)
            if summary.samples == 0:
                self.logger.warning(f"No samples landed on n_a={n_a}")
            records.append(ScanRecord(
                n_a=n_a,
                samples=summary.samples,
                mean_s=summary.mean,
                std_s=summary.std,
                i_a=n_a - summary.mean,
            ))
        slopes = self.statistics.finite_difference([r.n_a for r in records], [r.i_a for r in records])
        for record, slope in zip(records, slopes):
            record.di_dn = slope
        return records

    def discrepancy_scan(self, n_a_grid: Sequence[int], samples_per_point: int, seed: int) -> List[ScanRecord]:
        """Average entropy over uniformly random subsystems at each grid size."""
        grid = sorted(set(int(g) for g in n_a_grid))
        if grid and (grid[0] < 0 or grid[-1] > self.code.n):
            raise ParameterError(f"grid values must lie in 0..{self.code.n}")
        if samples_per_point < 1:
            raise ParameterError(f"samples per point must be positive, got {samples_per_point}")
        tasks = [(n_a, derive_seed(seed, n_a, sample))
                 for n_a in grid for sample in range(samples_per_point)]
        entropies = self._map(_random_entropy, tasks, f"discrepancy scan of {self.code.name}")
        groups = [entropies[i * samples_per_point:(i + 1) * samples_per_point] for i in range(len(grid))]
        return self._records(grid, groups)

    def scaling_scan(self, repeats: int, seed: int) -> Tuple[List[ScanRecord], Optional[PowerFit]]:
        """Average grown-subsystem entropies on a common size grid and fit a power law.

        Each repeat contributes, at grid size g, its largest checkpoint not exceeding g.
        The grid holds every checkpoint size up to n/2; the fit uses sizes below n/2 and is
        None when fewer than two such sizes carry a positive mean entropy.
        """
        if repeats < 1:
            raise ParameterError(f"repeats must be positive, got {repeats}")
        seeds = [derive_seed(seed, repeat) for repeat in range(repeats)]
        histories = self._map(_grown_history, seeds, f"scaling scan of {self.code.name}")
        n = self.code.n
        grid = sorted({n_a for history in histories for n_a, _ in history if 2 * n_a <= n})
        groups = []
        for g in grid:
            matched = []
            for history in histories:
                below = [entropy for n_a, entropy in history if n_a <= g]
                if below:
                    matched.append(below[-1])
            groups.append(matched)
        records = self._records(grid, groups)
        fit_points = [r for r in records if 2 * r.n_a < n]
        if sum(1 for r in fit_points if r.mean_s > 0) < 2:
            self.logger.warning(f"Too few checkpoints below n/2 to fit {self.code.name}; no exponent reported")
            return records, None
        fit = self.statistics.fit_power_law([r.n_a for r in fit_points], [r.mean_s for r in fit_points])
        return records, fit


def discrepancy_scan(code: CssCode, n_a_grid: Sequence[int], samples_per_point: int, seed: int,
                     workers: int = 1, constraints: Optional[LogicalConstraint] = None) -> List[ScanRecord]:
    return ExperimentRunner(code, constraints, workers).discrepancy_scan(n_a_grid, samples_per_point, seed)


def scaling_scan(code: CssCode, repeats: int, seed: int, workers: int = 1,
                 constraints: Optional[LogicalConstraint] = None) -> Tuple[List[ScanRecord], Optional[PowerFit]]:
    return ExperimentRunner(code, constraints, workers).scaling_scan(repeats, seed)


def fit_power_law(n_a: Sequence[float], mean_s: Sequence[float]) -> PowerFit:
    return ScanStatistics().fit_power_law(n_a, mean_s)


def write_csv(records: Sequence[ScanRecord], path, code_name: str, n: int,
              fit: Optional[PowerFit] = None, decimals: int = 6):
    """One row per record; a fit, when given, goes to the sibling `<stem>.fit.csv`."""
    path = Path(path)
    frame = pd.DataFrame(
        [{'code': code_name, 'n': n, 'n_a': r.n_a, 'samples': r.samples, 'mean_s': r.mean_s,
          'std_s': r.std_s, 'i_a': r.i_a, 'di_dn': r.di_dn} for r in records],
        columns=CSV_COLUMNS,
    )
    float_format = f"%.{decimals}f"
    try:
        frame.to_csv(path, index=False, float_format=float_format, lineterminator='\n', na_rep='')
        if fit is not None:
            fit_frame = pd.DataFrame([{'code': code_name, 'gamma': fit.gamma, 'prefactor': fit.prefactor,
                                       'r_squared': fit.r_squared}])
            fit_frame.to_csv(path.with_suffix('.fit.csv'), index=False, float_format=float_format,
                             lineterminator='\n')
    except OSError as e:
        logger.error(f"Error writing {path}: {str(e)}")
        raise
    logger.info(f"Wrote {len(records)} records to {path}")
