"""Worker-scaling benchmark of the correlation engines.

For each (m, n) cell a dataset is simulated with a fixed seed and
preprocessed once (mean reference, no resampling); only the correlation call
is timed, with a monotonic clock, one discarded warm-up run and `repeats`
measured runs.  Before any timing, each cell verifies that all requested
worker counts produce the same matrices (1e-12 relative); a failed gate aborts
the benchmark.  Ratios compare the largest worker count against workers=1.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from .engine_core import NormalizationSpec
from .errors import DataError, NumericError
from .fourier import correlate_ft
from .hilbert import correlate_ht
from .preprocess import dynamic_spectra
from .simulate import simulate_default

GATE_RTOL = 1e-12


@dataclass(frozen=True)
class BenchRow:
    m: int
    n: int
    workers: int
    engine: str
    mean_seconds: float
    std_seconds: float
    repeats: int


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)
    ratios: dict[tuple[int, int], float] = field(default_factory=dict)

    def to_table(self) -> str:
        lines = ["m      n      workers engine   mean_s    std_s     repeats"]
        for r in self.rows:
            lines.append(
                f"{r.m:<6d} {r.n:<6d} {r.workers:<7d} {r.engine:<8s} "
                f"{r.mean_seconds:<9.4f} {r.std_seconds:<9.4f} {r.repeats}"
            )
        lines.append("")
        lines.append("speedup ratios (max workers / 1 worker):")
        for (m, n), ratio in sorted(self.ratios.items()):
            lines.append(f"  m={m} n={n}: {ratio:.3f}")
        return "\n".join(lines) + "\n"


def _engine_fn(engine: str):
    if engine == "fourier":
        return correlate_ft
    if engine == "hilbert":
        return correlate_ht
    raise DataError(f"unknown engine {engine!r}")


def _relative_max_diff(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(np.abs(a).max(), np.abs(b).max(), 1e-300)
    return float(np.abs(a - b).max() / scale)


def run_bench(
    sizes: list[tuple[int, int]],
    workers_list: list[int],
    repeats: int = 10,
    engine: str = "fourier",
    seed: int = 17,
    norm: NormalizationSpec | None = None,
) -> BenchReport:
    """Time homo correlations over a grid of dataset sizes and worker counts."""
    if repeats < 3:
        raise DataError(f"repeats must be >= 3, got {repeats}")
    if not sizes:
        raise DataError("need at least one (m, n) size")
    if not workers_list or any(w < 1 for w in workers_list):
        raise DataError("workers_list must contain positive integers")
    fn = _engine_fn(engine)
    report = BenchReport()
    for m, n in sizes:
        try:
            ds = simulate_default(n, m=m, noise_sd=0.0, seed=seed)
            dyn = dynamic_spectra(ds)
        except MemoryError:
            raise NumericError(
                f"out of memory simulating a {m} x {n} dataset"
            ) from None

        # correctness gate: worker invariance before any timing
        try:
            results = {w: fn(dyn, norm=norm, workers=w) for w in set(workers_list)}
        except MemoryError:
            raise NumericError(
                f"out of memory at m={m}, n={n}: the complex result needs "
                f"16*{n}*{n} bytes = {16 * n * n / 1e9:.2f} GB"
            ) from None
        baseline = results[min(workers_list)]
        for w, res in results.items():
            if (
                _relative_max_diff(baseline.sync, res.sync) > GATE_RTOL
                or _relative_max_diff(baseline.asyn, res.asyn) > GATE_RTOL
            ):
                raise NumericError(
                    f"worker-invariance gate failed at m={m}, n={n}, workers={w}"
                )
        del results

        means: dict[int, float] = {}
        for w in workers_list:
            fn(dyn, norm=norm, workers=w)  # warm-up, excluded
            times = []
            for _ in range(repeats):
                start = time.perf_counter()
                fn(dyn, norm=norm, workers=w)
                times.append(time.perf_counter() - start)
            mean = statistics.fmean(times)
            std = statistics.stdev(times)
            means[w] = mean
            report.rows.append(BenchRow(m, n, w, engine, mean, std, repeats))
        if 1 in means and max(workers_list) != 1:
            report.ratios[(m, n)] = means[max(workers_list)] / means[1]
    return report
