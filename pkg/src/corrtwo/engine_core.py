"""Shared machinery for the two correlation engines.

Both engines compute n1 x n2 output matrices from m x n dynamic spectra.  The
output is partitioned into disjoint row blocks, one per worker; each block is
a plain matrix product evaluated with BLAS pinned to a single thread, so the
`workers` argument is the only source of parallelism and workers=1 is a
genuinely serial path.  Identical inputs and worker count give identical bits.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from threadpoolctl import threadpool_limits

from .dataset import CorrelationSpectra
from .errors import DataError, NumericError
from .preprocess import DynamicSpectra


@dataclass(frozen=True)
class NormalizationSpec:
    """Correlation normalization constant.

    ``noda`` is 1/(pi*(m-1)) (the Fourier-route default), ``unit`` is 1/(m-1)
    (the Hilbert-route default), ``custom`` is a fixed positive constant.
    """

    kind: str
    value: float | None = None

    @classmethod
    def noda(cls) -> "NormalizationSpec":
        return cls("noda")

    @classmethod
    def unit(cls) -> "NormalizationSpec":
        return cls("unit")

    @classmethod
    def custom(cls, value: float) -> "NormalizationSpec":
        if not value > 0:
            raise DataError(f"custom normalization must be positive, got {value}")
        return cls("custom", float(value))

    @classmethod
    def parse(cls, text: str) -> "NormalizationSpec":
        if text == "noda":
            return cls.noda()
        if text == "unit":
            return cls.unit()
        if text.startswith("custom:"):
            try:
                return cls.custom(float(text.split(":", 1)[1]))
            except ValueError:
                raise DataError(f"malformed normalization {text!r}") from None
        raise DataError(f"unknown normalization {text!r}")

    def constant(self, m: int) -> float:
        if m < 2:
            raise DataError(f"normalization needs m >= 2, got {m}")
        if self.kind == "noda":
            return 1.0 / (math.pi * (m - 1))
        if self.kind == "unit":
            return 1.0 / (m - 1)
        if self.kind == "custom":
            assert self.value is not None
            return self.value
        raise DataError(f"unknown normalization kind {self.kind!r}")


def check_pair(dyn1: DynamicSpectra, dyn2: DynamicSpectra) -> None:
    """Engines require bitwise-identical perturbation axes and one scaling regime."""
    if not np.array_equal(dyn1.perturbation_axis, dyn2.perturbation_axis):
        raise DataError(
            "perturbation axes differ between the two inputs; resample both "
            "onto a common axis before correlating"
        )
    if dyn1.scaling_exponent != dyn2.scaling_exponent:
        raise DataError(
            f"scaling regimes differ (alpha {dyn1.scaling_exponent} vs "
            f"{dyn2.scaling_exponent})"
        )
    if dyn1.m < 2:
        raise DataError(f"correlation needs m >= 2, got {dyn1.m}")
    for name, dyn in (("first", dyn1), ("second", dyn2)):
        if not np.all(np.isfinite(dyn.values)):
            raise NumericError(f"{name} dynamic-spectra matrix contains non-finite values")


def is_same_dynamic(dyn1: DynamicSpectra, dyn2: DynamicSpectra) -> bool:
    if dyn1 is dyn2:
        return True
    return (
        np.array_equal(dyn1.spectral_axis, dyn2.spectral_axis)
        and np.array_equal(dyn1.perturbation_axis, dyn2.perturbation_axis)
        and np.array_equal(dyn1.values, dyn2.values)
        and np.array_equal(dyn1.reference_used, dyn2.reference_used)
        and dyn1.scaling_exponent == dyn2.scaling_exponent
    )


def row_blocks(n_rows: int, workers: int) -> list[slice]:
    """Split n_rows into at most `workers` contiguous, disjoint slices."""
    if workers < 1:
        raise DataError(f"workers must be >= 1, got {workers}")
    count = min(workers, n_rows)
    bounds = np.linspace(0, n_rows, count + 1).astype(int)
    return [slice(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]

def map_row_blocks(fn, n_rows: int, workers: int) -> np.ndarray:
    """Evaluate ``fn(slice)`` over row blocks and stitch results in order.

    BLAS pools are limited to one thread inside this region; workers=1 runs
    the blocks in the calling thread with no executor.
    """
    blocks = row_blocks(n_rows, workers)
    with threadpool_limits(limits=1):
        if workers == 1 or len(blocks) == 1:
            parts = [fn(b) for b in blocks]
        else:
            with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
                parts = list(pool.map(fn, blocks))
    return np.concatenate(parts, axis=0)


def assemble_result(
    dyn1: DynamicSpectra,
    dyn2: DynamicSpectra,
    sync: np.ndarray,
    asyn: np.ndarray,
    constant: float,
    engine: str,
    homo: bool,
) -> CorrelationSpectra:
    if not (np.all(np.isfinite(sync)) and np.all(np.isfinite(asyn))):
        raise NumericError("correlation produced non-finite values")
    return CorrelationSpectra(
        axis1=dyn1.spectral_axis,
        axis2=dyn2.spectral_axis,
        sync=sync,
        asyn=asyn,
        ref1=dyn1.reference_used,
        ref2=dyn2.reference_used,
        normalization=constant,
        engine=engine,
        is_homo=homo,
        scaling_exponent=dyn1.scaling_exponent,
    )
