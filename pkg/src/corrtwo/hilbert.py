"""Hilbert-route correlation engine: direct summation plus the Hilbert-Noda matrix.

The synchronous matrix is computed directly from the dynamic spectra,

    sync(nu1, nu2) = Norm * sum_j y1(nu1, t_j) * y2(nu2, t_j),

and the asynchronous matrix applies the discrete Hilbert transform to the
*second* operand first,

    async(nu1, nu2) = Norm * sum_j y1(nu1, t_j) * z2(nu2, t_j),
    z2 = N @ y2,   N[j, k] = 0 if j == k else 1/(pi*(k - j)).

Swapping the operands flips the sign of async; the orientation above is fixed.
The default Norm here is 1/(m-1).  This engine doubles as the independent
check on the Fourier route: the two synchronous matrices agree exactly up to
the constant factor m/pi, the asynchronous ones agree up to discretization
differences of the two Hilbert realizations.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import matmul_toeplitz

from .dataset import CorrelationSpectra
from .engine_core import (
    NormalizationSpec,
    assemble_result,
    check_pair,
    is_same_dynamic,
    map_row_blocks,
)
from .errors import DataError
from .preprocess import DynamicSpectra

# beyond this the m x m matrix is not materialized; the transform is applied
# through its constant-diagonal (Toeplitz) structure instead
DENSE_LIMIT = 4096


def hilbert_noda_matrix(m: int) -> np.ndarray:
    """The m x m skew-symmetric matrix realizing the discrete Hilbert transform."""
    if m < 2:
        raise DataError(f"need m >= 2, got {m}")
    idx = np.arange(m)
    with np.errstate(divide="ignore"):
        matrix = 1.0 / (np.pi * (idx[None, :] - idx[:, None]))
    np.fill_diagonal(matrix, 0.0)
    return matrix


def _apply_noda(values: np.ndarray) -> np.ndarray:
    m = values.shape[0]
    if m <= DENSE_LIMIT:
        return hilbert_noda_matrix(m) @ values
    j = np.arange(m, dtype=float)
    with np.errstate(divide="ignore"):
        first_col = -1.0 / (np.pi * j)   # N[j, 0]
        first_row = 1.0 / (np.pi * j)    # N[0, k]
    first_col[0] = first_row[0] = 0.0
    return matmul_toeplitz((first_col, first_row), values)


def hilbert_transform(dyn: DynamicSpectra) -> np.ndarray:
    """Apply the Hilbert-Noda matrix to every spectral channel."""
    if dyn.m < 2:
        raise DataError(f"need m >= 2, got {dyn.m}")
    return _apply_noda(dyn.values)


def sync_direct(
    dyn1: DynamicSpectra,
    dyn2: DynamicSpectra | None = None,
    norm: NormalizationSpec | None = None,
    workers: int = 1,
) -> np.ndarray:
    """Synchronous correlation matrix by direct summation over the perturbation."""
    if dyn2 is None:
        dyn2 = dyn1
    check_pair(dyn1, dyn2)
    norm = norm or NormalizationSpec.unit()
    constant = norm.constant(dyn1.m)
    left = dyn1.values.T

    def block(rows: slice) -> np.ndarray:
        return left[rows] @ dyn2.values

    return constant * map_row_blocks(block, dyn1.n, workers)


def correlate_ht(
    dyn1: DynamicSpectra,
    dyn2: DynamicSpectra | None = None,
    norm: NormalizationSpec | None = None,
    workers: int = 1,
) -> CorrelationSpectra:
    """Synchronous and asynchronous correlation via the Hilbert route."""
    homo = dyn2 is None or is_same_dynamic(dyn1, dyn2)
    if dyn2 is None:
        dyn2 = dyn1
    check_pair(dyn1, dyn2)
    norm = norm or NormalizationSpec.unit()
    constant = norm.constant(dyn1.m)
    left = dyn1.values.T
    transformed = _apply_noda(dyn2.values)

    def sync_block(rows: slice) -> np.ndarray:
        return left[rows] @ dyn2.values

    def asyn_block(rows: slice) -> np.ndarray:
        return left[rows] @ transformed

    sync = constant * map_row_blocks(sync_block, dyn1.n, workers)
    asyn = constant * map_row_blocks(asyn_block, dyn1.n, workers)
    return assemble_result(dyn1, dyn2, sync, asyn, constant, "hilbert", homo)
