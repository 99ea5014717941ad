"""Fourier-route correlation engine.

Each spectral channel is transformed with a real FFT along the perturbation
axis; Hermitian symmetry of the transform of real data lets the engine keep
only frequencies 0..floor(m/2).  To preserve the full-spectrum amplitudes the
retained bins are weighted: weight 1 at frequency 0 (and at the Nyquist bin
for even m, which has no mirror), weight 2 everywhere else.  Under this
weighting the real part of the weighted half-spectrum cross sum equals the
full-spectrum sum exactly (Parseval), while the imaginary part carries the
asynchronous signal.

The complex correlation matrix is

    C(nu1, nu2) = Norm * sum_w  weight(w) * Y1(nu1, w) * conj(Y2(nu2, w))

with sync = Re(C) and async = Im(C).  The default Norm is 1/(pi*(m-1)).  The
underlying FFT handles arbitrary m, not only powers of two; a complex result
needs 16*n1*n2 bytes of memory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft

from .dataset import CorrelationSpectra
from .engine_core import (
    NormalizationSpec,
    assemble_result,
    check_pair,
    is_same_dynamic,
    map_row_blocks,
)
from .errors import DataError, NumericError
from .preprocess import DynamicSpectra


@dataclass(eq=False)
class FourierWorkspace:
    """Retained half-spectra of both inputs plus the per-frequency weights."""

    half_spectrum1: np.ndarray
    half_spectrum2: np.ndarray
    weights: np.ndarray
    m: int


def half_spectrum_weights(m: int) -> np.ndarray:
    """Doubling weights for the retained frequencies 0..floor(m/2)."""
    if m < 2:
        raise DataError(f"need m >= 2, got {m}")
    w = np.full(m // 2 + 1, 2.0)
    w[0] = 1.0
    if m % 2 == 0:
        w[-1] = 1.0
    return w


def dft_channels(
    dyn: DynamicSpectra,
    dyn2: DynamicSpectra | None = None,
    workers: int = 1,
) -> FourierWorkspace:
    """FFT every spectral channel, keeping frequencies 0..floor(m/2).

    Column transforms are independent tasks; `workers` bounds the threads used
    by the FFT batch.  The result is identical for any worker count.
    """
    if not np.all(np.isfinite(dyn.values)):
        raise NumericError("dynamic-spectra matrix contains non-finite values")
    half1 = scipy.fft.rfft(dyn.values, axis=0, workers=workers)
    if dyn2 is None or dyn2 is dyn:
        half2 = half1
    else:
        if not np.all(np.isfinite(dyn2.values)):
            raise NumericError("dynamic-spectra matrix contains non-finite values")
        if dyn2.m != dyn.m:
            raise DataError(f"perturbation counts differ ({dyn.m} vs {dyn2.m})")
        half2 = scipy.fft.rfft(dyn2.values, axis=0, workers=workers)
    return FourierWorkspace(half1, half2, half_spectrum_weights(dyn.m), dyn.m)


def correlate_ft(
    dyn1: DynamicSpectra,
    dyn2: DynamicSpectra | None = None,
    norm: NormalizationSpec | None = None,
    workers: int = 1,
) -> CorrelationSpectra:
    """Synchronous and asynchronous correlation via the Fourier route.

    A single input (or two equal inputs) gives the homo correlation.  Hetero
    inputs must share the perturbation axis bitwise; the engine never
    re-interpolates.  Output row blocks are computed by `workers` independent
    threads; results agree across worker counts and are bit-identical between
    runs for a fixed worker count.
    """
    homo = dyn2 is None or is_same_dynamic(dyn1, dyn2)
    if dyn2 is None:
        dyn2 = dyn1
    check_pair(dyn1, dyn2)
    norm = norm or NormalizationSpec.noda()
    constant = norm.constant(dyn1.m)

    ws = dft_channels(dyn1, dyn2, workers=workers)
    weighted1 = ws.half_spectrum1.T * ws.weights  # n1 x (m//2+1)
    conj2 = np.conj(ws.half_spectrum2)            # (m//2+1) x n2

    def block(rows: slice) -> np.ndarray:
        return weighted1[rows] @ conj2

    try:
        complex_corr = map_row_blocks(block, dyn1.n, workers)
    except MemoryError:
        raise NumericError(
            f"out of memory assembling the complex correlation matrix; "
            f"it needs 16*{dyn1.n}*{dyn2.n} bytes = "
            f"{16 * dyn1.n * dyn2.n / 1e9:.2f} GB"
        ) from None
    complex_corr *= constant
    return assemble_result(
        dyn1, dyn2, complex_corr.real.copy(), complex_corr.imag.copy(),
        constant, "fourier", homo,
    )
