"""Peak extraction and Noda-rule classification of 2D correlation spectra.

The five sign rules map (sign sync, sign async) at a cross peak to a direction
statement and a sequential-order statement:

    sync > 0   the intensities at nu1 and nu2 change in the same direction
    sync < 0   they change in opposite directions
    async > 0  nu1 varies before nu2
    async < 0  nu1 varies after nu2
    sync < 0 additionally reverses the before/after reading

A dead band `eps` declares values indistinguishable from zero; both readings
below eps give an indeterminate verdict.  Verdicts depend only on signs, so
any global positive rescaling of the matrices (with eps rescaled identically)
leaves them unchanged.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .dataset import CorrelationSpectra, format_number
from .errors import DataError


class Verdict(enum.Enum):
    SAME_DIRECTION = "same-direction"
    OPPOSITE_DIRECTION = "opposite-direction"
    NU1_BEFORE = "nu1-before"
    NU1_AFTER = "nu1-after"
    INDETERMINATE = "indeterminate"


_FLIP = {Verdict.NU1_BEFORE: Verdict.NU1_AFTER, Verdict.NU1_AFTER: Verdict.NU1_BEFORE}


@dataclass(frozen=True)
class CrossPeakVerdict:
    """Combined direction + order reading of one cross peak."""

    direction: Verdict
    order: Verdict

    def __str__(self):
        return f"{self.direction.value}, {self.order.value}"


def classify_cross_peak(phi: float, psi: float, eps: float) -> CrossPeakVerdict:
    """Apply the five sign rules to one (sync, async) value pair."""
    if not eps > 0:
        raise DataError(f"eps must be positive, got {eps}")
    if phi > eps:
        direction = Verdict.SAME_DIRECTION
    elif phi < -eps:
        direction = Verdict.OPPOSITE_DIRECTION
    else:
        direction = Verdict.INDETERMINATE
    if abs(psi) > eps:
        order = Verdict.NU1_BEFORE if psi > 0 else Verdict.NU1_AFTER
        if phi < -eps:
            order = _FLIP[order]
    else:
        order = Verdict.INDETERMINATE
    return CrossPeakVerdict(direction, order)


@dataclass(frozen=True)
class AutoPeak:
    nu: float
    phi: float


@dataclass(frozen=True)
class CrossPeak:
    nu1: float
    nu2: float
    phi: float
    psi: float
    verdict: CrossPeakVerdict


@dataclass
class PeakReport:
    """Detected auto and cross peaks of one correlation result."""

    auto_peaks: list[AutoPeak] = field(default_factory=list)
    cross_peaks: list[CrossPeak] = field(default_factory=list)
    threshold_fraction: float = 0.1
    eps: float = 0.0
    is_homo: bool = True

    def to_table(self) -> str:
        lines = []
        if self.is_homo:
            lines.append("auto peaks (nu, sync):")
            if not self.auto_peaks:
                lines.append("  none")
            for p in self.auto_peaks:
                lines.append(f"  {p.nu:g}  {p.phi:.6g}")
        lines.append("cross peaks (nu1, nu2, sync, async, verdict):")
        if not self.cross_peaks:
            lines.append("  none")
        for p in self.cross_peaks:
            lines.append(
                f"  {p.nu1:g}  {p.nu2:g}  {p.phi:.6g}  {p.psi:.6g}  {p.verdict}"
            )
        return "\n".join(lines) + "\n"

    def to_long_form(self) -> bytes:
        lines = ["kind,nu1,nu2,sync,async,direction,order"]
        for p in self.auto_peaks:
            lines.append(
                f"auto,{format_number(p.nu)},{format_number(p.nu)},"
                f"{format_number(p.phi)},0.0,,"
            )
        for p in self.cross_peaks:
            lines.append(
                f"cross,{format_number(p.nu1)},{format_number(p.nu2)},"
                f"{format_number(p.phi)},{format_number(p.psi)},"
                f"{p.verdict.direction.value},{p.verdict.order.value}"
            )
        return ("\n".join(lines) + "\n").encode("utf-8")


def _local_maxima_2d(magnitude: np.ndarray) -> np.ndarray:
    """Boolean mask of strict 8-neighborhood local maxima."""
    padded = np.pad(magnitude, 1, mode="constant", constant_values=-np.inf)
    center = padded[1:-1, 1:-1]
    mask = np.ones_like(magnitude, dtype=bool)
    for di in (-1, 0, 1):
        for dk in (-1, 0, 1):
            if di == 0 and dk == 0:
                continue
            neighbor = padded[1 + di: 1 + di + magnitude.shape[0],
                              1 + dk: 1 + dk + magnitude.shape[1]]
            mask &= center > neighbor
    return mask


def _local_maxima_1d(values: np.ndarray) -> np.ndarray:
    padded = np.pad(values, 1, mode="constant", constant_values=-np.inf)
    return (padded[1:-1] > padded[:-2]) & (padded[1:-1] > padded[2:])


def find_peaks(
    corr: CorrelationSpectra,
    threshold_fraction: float = 0.1,
    eps: float | None = None,
) -> PeakReport:
    """Detect auto peaks (homo diagonal) and cross peaks above a threshold.

    Cross-peak candidates are strict 8-neighborhood local maxima of |sync| or
    |async| exceeding `threshold_fraction` of the respective maximum; each is
    classified by the sign rules with dead band `eps` (default: 1e-3 of the
    larger matrix maximum).  For homo results only the upper triangle
    (nu2 > nu1 by index) is reported, mirror peaks being redundant.
    """
    if not 0.0 < threshold_fraction < 1.0:
        raise DataError(
            f"threshold_fraction must lie in (0, 1), got {threshold_fraction}"
        )
    abs_sync = np.abs(corr.sync)
    abs_asyn = np.abs(corr.asyn)
    scale = max(abs_sync.max(), abs_asyn.max())
    if eps is None:
        eps = 1e-3 * scale
    report = PeakReport(
        threshold_fraction=threshold_fraction, eps=eps, is_homo=corr.is_homo,
    )
    if scale == 0.0:
        return report

    if corr.is_homo:
        diag = np.diag(corr.sync)
        for i in np.nonzero(
            _local_maxima_1d(diag) & (diag > threshold_fraction * diag.max())
        )[0]:
            report.auto_peaks.append(AutoPeak(corr.axis1[i], diag[i]))

    candidates = np.zeros(corr.sync.shape, dtype=bool)
    if abs_sync.max() > 0:
        candidates |= _local_maxima_2d(abs_sync) & (
            abs_sync > threshold_fraction * abs_sync.max()
        )
    if abs_asyn.max() > 0:
        candidates |= _local_maxima_2d(abs_asyn) & (
            abs_asyn > threshold_fraction * abs_asyn.max()
        )
    for i, k in np.argwhere(candidates):
        if corr.is_homo and k <= i:
            continue
        phi = corr.sync[i, k]
        psi = corr.asyn[i, k]
        report.cross_peaks.append(CrossPeak(
            corr.axis1[i], corr.axis2[k], phi, psi,
            classify_cross_peak(phi, psi, eps),
        ))
    return report
