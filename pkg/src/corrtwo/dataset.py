"""Parsing, validation and serialization of spectral datasets and correlation results.

File conventions
----------------
Datasets are delimited text (comma by default): the header row holds the
spectral axis, the first column holds the perturbation axis, the body is the
m x n intensity matrix.  The corner cell may carry the two axis labels as
``<perturbation label> \\ <spectral label>`` and is otherwise ignored.

Correlation results are written either as a matrix pair (``<stem>.sync.csv`` /
``<stem>.async.csv``, axis1 as row labels, axis2 as column labels) or as a
single long-form table (``<stem>.corr.csv`` with header ``nu1,nu2,sync,async``).
Result files start with ``#`` metadata lines so they round-trip without a
sidecar.  All numbers are emitted in shortest round-trip decimal form (17
significant digits available), so read(write(x)) reproduces x bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import DataError, ParseError

LABEL_SEP = " \\ "

MATRIX_PAIR = "matrix-pair"
LONG_FORM = "long-form"


def format_number(x: float) -> str:
    """Shortest decimal string that round-trips to the same float64."""
    return repr(float(x))


def _monotonic_direction(values: np.ndarray, name: str) -> None:
    diffs = np.diff(values)
    if np.all(diffs > 0) or np.all(diffs < 0):
        return
    if np.any(diffs == 0):
        pos = int(np.argmin(np.abs(diffs))) + 2
        raise DataError(f"{name} contains duplicate values (position {pos})")
    pos = int(np.argmax(np.sign(diffs) != np.sign(diffs[0]))) + 2
    raise DataError(f"{name} is not strictly monotonic (position {pos})")


@dataclass(eq=False)
class SpectralDataset:
    """A perturbation-ordered series of 1D spectra.

    Rows of `intensities` are spectra; row j belongs to `perturbation_axis[j]`,
    column i to `spectral_axis[i]`.
    """

    spectral_axis: np.ndarray
    perturbation_axis: np.ndarray
    intensities: np.ndarray
    axis_labels: tuple[str, str] = ("nu", "t")

    def __post_init__(self):
        self.spectral_axis = np.asarray(self.spectral_axis, dtype=float)
        self.perturbation_axis = np.asarray(self.perturbation_axis, dtype=float)
        self.intensities = np.asarray(self.intensities, dtype=float)
        self.validate()

    @property
    def m(self) -> int:
        return self.perturbation_axis.size

    @property
    def n(self) -> int:
        return self.spectral_axis.size

    def validate(self) -> None:
        if self.m < 2:
            raise DataError(f"m < 2: need at least two spectra, got {self.m}")
        if self.n < 2:
            raise DataError(f"n < 2: need at least two spectral values, got {self.n}")
        if self.intensities.shape != (self.m, self.n):
            raise DataError(
                f"intensity matrix shape {self.intensities.shape} does not match "
                f"axes ({self.m}, {self.n})"
            )
        if not np.all(np.isfinite(self.spectral_axis)):
            raise DataError("spectral axis contains non-finite values")
        if not np.all(np.isfinite(self.perturbation_axis)):
            raise DataError("perturbation axis contains non-finite values")
        if not np.all(np.isfinite(self.intensities)):
            j, i = np.argwhere(~np.isfinite(self.intensities))[0]
            raise DataError(f"non-finite intensity at row {j + 1}, column {i + 1}")
        _monotonic_direction(self.spectral_axis, "spectral axis")
        diffs = np.diff(self.perturbation_axis)
        if not np.all(diffs > 0):
            pos = int(np.argmax(diffs <= 0)) + 2
            raise DataError(
                f"perturbation axis must be strictly increasing (position {pos})"
            )

    def equals(self, other: "SpectralDataset") -> bool:
        return (
            np.array_equal(self.spectral_axis, other.spectral_axis)
            and np.array_equal(self.perturbation_axis, other.perturbation_axis)
            and np.array_equal(self.intensities, other.intensities)
            and self.axis_labels == other.axis_labels
        )


@dataclass(eq=False)
class CorrelationSpectra:
    """Synchronous and asynchronous 2D correlation matrices with provenance."""

    axis1: np.ndarray
    axis2: np.ndarray
    sync: np.ndarray
    asyn: np.ndarray
    ref1: np.ndarray
    ref2: np.ndarray
    normalization: float
    engine: str
    is_homo: bool
    scaling_exponent: float = 0.0

    SYMMETRY_TOL = 1e-12

    def __post_init__(self):
        for name in ("axis1", "axis2", "sync", "asyn", "ref1", "ref2"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        self.validate()

    @property
    def n1(self) -> int:
        return self.axis1.size

    @property
    def n2(self) -> int:
        return self.axis2.size

    def validate(self) -> None:
        if self.engine not in ("fourier", "hilbert"):
            raise DataError(f"unknown engine tag {self.engine!r}")
        if self.sync.shape != (self.n1, self.n2):
            raise DataError(
                f"sync shape {self.sync.shape} does not match axes ({self.n1}, {self.n2})"
            )
        if self.asyn.shape != self.sync.shape:
            raise DataError(
                f"dimension mismatch: sync {self.sync.shape} vs async {self.asyn.shape}"
            )
        if self.ref1.shape != (self.n1,) or self.ref2.shape != (self.n2,):
            raise DataError("reference spectra lengths do not match the axes")
        for name in ("sync", "asyn"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise DataError(f"{name} matrix contains non-finite values")
        if not self.normalization > 0:
            raise DataError("normalization constant must be positive")
        if self.is_homo:
            if not np.array_equal(self.axis1, self.axis2):
                raise DataError("homo result requires identical axes")
            # tolerance is relative to the overall result scale: a pure
            # synchronous result has async at roundoff level, far below
            # any fraction of its own maximum
            scale = max(np.abs(self.sync).max(), np.abs(self.asyn).max())
            tol = self.SYMMETRY_TOL * scale
            if np.abs(self.sync - self.sync.T).max() > tol:
                raise DataError("homo sync matrix is not symmetric")
            if np.abs(self.asyn + self.asyn.T).max() > tol:
                raise DataError("homo async matrix is not skew-symmetric")


def _split_lines_with_offsets(text: str) -> list[tuple[int, str]]:
    """(byte offset, line) pairs; offsets refer to the UTF-8 encoding."""
    out = []
    offset = 0
    for line in text.splitlines(keepends=True):
        stripped = line.rstrip("\r\n")
        out.append((offset, stripped))
        offset += len(line.encode("utf-8"))
    return out


def _parse_float(cell: str, row: int, column: int, offset: int) -> float:
    try:
        return float(cell)
    except ValueError:
        raise ParseError(
            f"non-numeric cell {cell.strip()!r}", row=row, column=column,
            byte_offset=offset,
        ) from None


def parse_dataset(
    text: str | bytes,
    delimiter: str = ",",
    orientation: str = "perturbation-rows",
) -> SpectralDataset:
    """Parse a delimited table into a validated SpectralDataset.

    `orientation` is ``perturbation-rows`` for the native layout (header row =
    spectral axis, first column = perturbation axis) or ``spectral-rows`` for
    the transposed layout.
    """
    if orientation not in ("perturbation-rows", "spectral-rows"):
        raise DataError(f"unknown orientation {orientation!r}")
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError("input is not valid UTF-8", byte_offset=exc.start) from None

    rows = [
        (off, line) for off, line in _split_lines_with_offsets(text)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if len(rows) < 2:
        raise DataError("table needs a header row and at least one data row")

    header_off, header = rows[0]
    header_cells = header.split(delimiter)
    # R-style exports omit the corner cell: header is one cell shorter than
    # the data rows, and every header cell is an axis value
    first_row_cells = len(rows[1][1].split(delimiter))
    if len(header_cells) + 1 == first_row_cells:
        header_cells = [""] + header_cells
    if len(header_cells) < 3:
        raise DataError("header row needs at least two spectral values")
    corner = header_cells[0].strip()
    col_axis = np.array([
        _parse_float(c, 1, i + 2, header_off) for i, c in enumerate(header_cells[1:])
    ])

    row_axis = np.empty(len(rows) - 1)
    body = np.empty((len(rows) - 1, col_axis.size))
    for r, (off, line) in enumerate(rows[1:], start=2):
        cells = line.split(delimiter)
        if len(cells) != len(header_cells):
            raise ParseError(
                f"ragged row: expected {len(header_cells)} cells, got {len(cells)}",
                row=r, byte_offset=off,
            )
        row_axis[r - 2] = _parse_float(cells[0], r, 1, off)
        for c, cell in enumerate(cells[1:]):
            body[r - 2, c] = _parse_float(cell, r, c + 2, off)

    if LABEL_SEP in corner:
        row_label, col_label = corner.split(LABEL_SEP, 1)
    else:
        row_label, col_label = "", ""

    if orientation == "spectral-rows":
        spectral, perturbation, intensities = row_axis, col_axis, body.T
        labels = (row_label or "nu", col_label or "t")
    else:
        spectral, perturbation, intensities = col_axis, row_axis, body
        labels = (col_label or "nu", row_label or "t")
    return SpectralDataset(spectral, perturbation, intensities, labels)


def serialize_dataset(ds: SpectralDataset, delimiter: str = ",") -> str:
    """Inverse of parse_dataset for the native orientation."""
    nu_label, t_label = ds.axis_labels
    corner = f"{t_label}{LABEL_SEP}{nu_label}".replace(delimiter, " ")
    lines = [delimiter.join([corner] + [format_number(v) for v in ds.spectral_axis])]
    for j in range(ds.m):
        cells = [format_number(ds.perturbation_axis[j])]
        cells += [format_number(v) for v in ds.intensities[j]]
        lines.append(delimiter.join(cells))
    return "\n".join(lines) + "\n"


def save_dataset(ds: SpectralDataset, path: str | Path, delimiter: str = ",") -> Path:
    path = Path(path)
    path.write_bytes(serialize_dataset(ds, delimiter).encode("utf-8"))
    return path


def load_dataset(path: str | Path, delimiter: str = ",",
                 orientation: str = "perturbation-rows") -> SpectralDataset:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    return parse_dataset(raw, delimiter, orientation)


# ---------------------------------------------------------------------------
# correlation result IO
# ---------------------------------------------------------------------------

def _meta_lines(result: CorrelationSpectra, fmt: str, section: str) -> list[str]:
    return [
        f"# corrtwo-correlation format={fmt} section={section}",
        f"# engine={result.engine} normalization={format_number(result.normalization)} "
        f"scaling_exponent={format_number(result.scaling_exponent)} "
        f"is_homo={'true' if result.is_homo else 'false'}",
        "# ref1=" + ",".join(format_number(v) for v in result.ref1),
        "# ref2=" + ",".join(format_number(v) for v in result.ref2),
    ]


def _matrix_table(axis1, axis2, matrix, delimiter: str) -> list[str]:
    lines = [delimiter.join([""] + [format_number(v) for v in axis2])]
    for i in range(axis1.size):
        cells = [format_number(axis1[i])]
        cells += [format_number(v) for v in matrix[i]]
        lines.append(delimiter.join(cells))
    return lines


def write_correlation(
    result: CorrelationSpectra,
    fmt: str = MATRIX_PAIR,
    delimiter: str = ",",
) -> dict[str, bytes]:
    """Serialize a correlation result.

    Returns a mapping of file suffix to payload: ``{"sync.csv": ...,
    "async.csv": ...}`` for matrix-pair, ``{"corr.csv": ...}`` for long-form.
    """
    if fmt == MATRIX_PAIR:
        out = {}
        for section, matrix in (("sync", result.sync), ("async", result.asyn)):
            lines = _meta_lines(result, fmt, section)
            lines += _matrix_table(result.axis1, result.axis2, matrix, delimiter)
            out[f"{section}.csv"] = ("\n".join(lines) + "\n").encode("utf-8")
        return out
    if fmt == LONG_FORM:
        lines = _meta_lines(result, fmt, "long")
        lines.append("nu1,nu2,sync,async")
        for i in range(result.n1):
            nu1 = format_number(result.axis1[i])
            for k in range(result.n2):
                lines.append(
                    f"{nu1},{format_number(result.axis2[k])},"
                    f"{format_number(result.sync[i, k])},"
                    f"{format_number(result.asyn[i, k])}"
                )
        return {"corr.csv": ("\n".join(lines) + "\n").encode("utf-8")}
    raise DataError(f"unknown correlation format {fmt!r}")


def _read_meta(rows: list[tuple[int, str]]) -> tuple[dict, list[tuple[int, str]]]:
    meta: dict = {}
    body = []
    for off, line in rows:
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            s = s[1:].strip()
            if s.startswith("ref1=") or s.startswith("ref2="):
                key, _, payload = s.partition("=")
                try:
                    meta[key] = np.array([float(v) for v in payload.split(",")])
                except ValueError:
                    raise ParseError(f"malformed {key} metadata", byte_offset=off) from None
            else:
                for token in s.split():
                    key, _, value = token.partition("=")
                    if _:
                        meta[key] = value
        else:
            body.append((off, line))
    return meta, body


def _parse_matrix_table(body: list[tuple[int, str]], delimiter: str):
    if len(body) < 2:
        off = body[-1][0] if body else 0
        raise ParseError("truncated correlation table", byte_offset=off)
    header_off, header = body[0]
    cells = header.split(delimiter)
    axis2 = np.array([
        _parse_float(c, 1, i + 2, header_off) for i, c in enumerate(cells[1:])
    ])
    axis1 = np.empty(len(body) - 1)
    matrix = np.empty((len(body) - 1, axis2.size))
    for r, (off, line) in enumerate(body[1:], start=2):
        row_cells = line.split(delimiter)
        if len(row_cells) != len(cells):
            raise ParseError(
                f"ragged row: expected {len(cells)} cells, got {len(row_cells)}",
                row=r, byte_offset=off,
            )
        axis1[r - 2] = _parse_float(row_cells[0], r, 1, off)
        for c, cell in enumerate(row_cells[1:]):
            matrix[r - 2, c] = _parse_float(cell, r, c + 2, off)
    return axis1, axis2, matrix


def _result_from_meta(meta, axis1, axis2, sync, asyn) -> CorrelationSpectra:
    n1, n2 = axis1.size, axis2.size
    ref1 = meta.get("ref1", np.zeros(n1))
    ref2 = meta.get("ref2", np.zeros(n2))
    try:
        return CorrelationSpectra(
            axis1=axis1, axis2=axis2, sync=sync, asyn=asyn,
            ref1=ref1, ref2=ref2,
            normalization=float(meta.get("normalization", 1.0)),
            engine=meta.get("engine", "fourier"),
            is_homo=meta.get("is_homo", "false") == "true",
            scaling_exponent=float(meta.get("scaling_exponent", 0.0)),
        )
    except ValueError:
        raise ParseError("malformed correlation metadata") from None


def read_correlation(
    payload: Mapping[str, bytes] | bytes,
    fmt: str | None = None,
    delimiter: str = ",",
) -> CorrelationSpectra:
    """Inverse of write_correlation.

    Accepts the mapping produced by write_correlation, or raw long-form bytes.
    """
    if isinstance(payload, (bytes, bytearray)):
        payload = {"corr.csv": bytes(payload)}
    if fmt is None:
        fmt = LONG_FORM if "corr.csv" in payload else MATRIX_PAIR

    def rows_of(key):
        if key not in payload:
            raise DataError(f"missing {key!r} payload for format {fmt}")
        try:
            text = payload[key].decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError("input is not valid UTF-8", byte_offset=exc.start) from None
        return _split_lines_with_offsets(text)

    if fmt == MATRIX_PAIR:
        meta_s, body_s = _read_meta(rows_of("sync.csv"))
        meta_a, body_a = _read_meta(rows_of("async.csv"))
        axis1, axis2, sync = _parse_matrix_table(body_s, delimiter)
        axis1_a, axis2_a, asyn = _parse_matrix_table(body_a, delimiter)
        if sync.shape != asyn.shape:
            raise DataError(
                f"dimension mismatch: sync {sync.shape} vs async {asyn.shape}"
            )
        if not (np.array_equal(axis1, axis1_a) and np.array_equal(axis2, axis2_a)):
            raise DataError("sync and async tables carry different axes")
        return _result_from_meta(meta_s or meta_a, axis1, axis2, sync, asyn)

    if fmt == LONG_FORM:
        meta, body = _read_meta(rows_of("corr.csv"))
        if not body:
            raise ParseError("truncated correlation table", byte_offset=0)
        header_off, header = body[0]
        if header.split(",") != ["nu1", "nu2", "sync", "async"]:
            raise ParseError("expected header 'nu1,nu2,sync,async'",
                             byte_offset=header_off)
        values = np.empty((len(body) - 1, 4))
        for r, (off, line) in enumerate(body[1:], start=2):
            cells = line.split(",")
            if len(cells) != 4:
                raise ParseError(
                    f"ragged row: expected 4 cells, got {len(cells)}",
                    row=r, byte_offset=off,
                )
            for c, cell in enumerate(cells):
                values[r - 2, c] = _parse_float(cell, r, c + 1, off)
        axis1, idx1 = np.unique(values[:, 0], return_index=True)
        axis1 = values[np.sort(idx1), 0]
        axis2, idx2 = np.unique(values[:, 1], return_index=True)
        axis2 = values[np.sort(idx2), 1]
        n1, n2 = axis1.size, axis2.size
        if n1 * n2 != values.shape[0]:
            raise DataError(
                f"long-form table has {values.shape[0]} rows, expected "
                f"{n1} x {n2} = {n1 * n2}"
            )
        sync = values[:, 2].reshape(n1, n2)
        asyn = values[:, 3].reshape(n1, n2)
        return _result_from_meta(meta, axis1, axis2, sync, asyn)

    raise DataError(f"unknown correlation format {fmt!r}")


def correlation_paths(stem: str | Path, fmt: str = MATRIX_PAIR) -> dict[str, Path]:
    stem = Path(stem)
    if fmt == MATRIX_PAIR:
        return {
            "sync.csv": stem.with_name(stem.name + ".sync.csv"),
            "async.csv": stem.with_name(stem.name + ".async.csv"),
        }
    if fmt == LONG_FORM:
        return {"corr.csv": stem.with_name(stem.name + ".corr.csv")}
    raise DataError(f"unknown correlation format {fmt!r}")


def save_correlation(result: CorrelationSpectra, stem: str | Path,
                     fmt: str = MATRIX_PAIR, delimiter: str = ",") -> list[Path]:
    payload = write_correlation(result, fmt, delimiter)
    paths = correlation_paths(stem, fmt)
    written = []
    for key, data in payload.items():
        try:
            paths[key].write_bytes(data)
        except OSError as exc:
            raise DataError(f"cannot write {paths[key]}: {exc}") from None
        written.append(paths[key])
    return written


def load_correlation(stem: str | Path, fmt: str | None = None,
                     delimiter: str = ",") -> CorrelationSpectra:
    stem = Path(stem)
    if fmt is None:
        fmt = LONG_FORM if correlation_paths(stem, LONG_FORM)["corr.csv"].exists() \
            else MATRIX_PAIR
    paths = correlation_paths(stem, fmt)
    payload = {}
    for key, path in paths.items():
        try:
            payload[key] = path.read_bytes()
        except OSError as exc:
            raise DataError(f"cannot read {path}: {exc}") from None
    return read_correlation(payload, fmt, delimiter)
