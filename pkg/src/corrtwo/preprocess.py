"""Build equidistant, reference-subtracted, optionally variance-scaled dynamic spectra.

The pipeline order is fixed: resample (optional) -> subtract reference ->
divide each spectral channel by sigma**alpha (optional).  Scaling is applied
to the dynamic spectra *before* correlation; by bilinearity this equals
dividing the correlation matrices by (sigma_1 * sigma_2)**alpha afterwards.
When resampling is active, sigma is computed from the resampled dataset so it
matches the matrix actually correlated.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .dataset import SpectralDataset
from .errors import DataError, NumericError


class InterpolantKind(enum.Enum):
    LINEAR = "linear"
    CUBIC_SPLINE = "spline"

    @classmethod
    def from_name(cls, name: str) -> "InterpolantKind":
        for kind in cls:
            if kind.value == name:
                return kind
        raise DataError(f"unknown interpolant {name!r} (use 'linear' or 'spline')")


@dataclass(frozen=True)
class ReferenceSpec:
    """Reference spectrum choice: the perturbation mean, or a provided vector."""

    kind: str
    spectrum: np.ndarray | None = None

    @classmethod
    def mean(cls) -> "ReferenceSpec":
        return cls("mean")

    @classmethod
    def provided(cls, spectrum) -> "ReferenceSpec":
        spectrum = np.asarray(spectrum, dtype=float)
        if spectrum.ndim != 1:
            raise DataError("provided reference must be a 1D vector")
        if not np.all(np.isfinite(spectrum)):
            raise DataError("provided reference contains non-finite values")
        return cls("provided", spectrum)

    def resolve(self, ds: SpectralDataset) -> np.ndarray:
        if self.kind == "mean":
            return mean_reference(ds)
        assert self.spectrum is not None
        if self.spectrum.size != ds.n:
            raise DataError(
                f"reference length {self.spectrum.size} does not match n = {ds.n}"
            )
        return self.spectrum


@dataclass(frozen=True)
class ResampleSpec:
    target_count: int
    interpolant: InterpolantKind = InterpolantKind.CUBIC_SPLINE

    def __post_init__(self):
        if self.target_count < 4:
            raise DataError(f"resample target_count must be >= 4, got {self.target_count}")


@dataclass(frozen=True)
class PreprocessSpec:
    reference: ReferenceSpec = ReferenceSpec.mean()
    resample: ResampleSpec | None = None
    scaling_exponent: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.scaling_exponent <= 1.0:
            raise DataError(
                f"scaling exponent must lie in [0, 1], got {self.scaling_exponent}"
            )


@dataclass(eq=False)
class DynamicSpectra:
    """Reference-subtracted (optionally scaled) m x n matrix with provenance."""

    spectral_axis: np.ndarray
    perturbation_axis: np.ndarray
    values: np.ndarray
    reference_used: np.ndarray
    scaling_exponent: float = 0.0
    sigma: np.ndarray | None = None

    def __post_init__(self):
        self.spectral_axis = np.asarray(self.spectral_axis, dtype=float)
        self.perturbation_axis = np.asarray(self.perturbation_axis, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        self.reference_used = np.asarray(self.reference_used, dtype=float)
        m, n = self.perturbation_axis.size, self.spectral_axis.size
        if self.values.shape != (m, n):
            raise DataError(
                f"dynamic matrix shape {self.values.shape} does not match axes ({m}, {n})"
            )
        if self.reference_used.shape != (n,):
            raise DataError("reference_used length does not match the spectral axis")

    @property
    def m(self) -> int:
        return self.perturbation_axis.size

    @property
    def n(self) -> int:
        return self.spectral_axis.size


def mean_reference(ds: SpectralDataset) -> np.ndarray:
    """Perturbation-mean spectrum: columnwise arithmetic mean."""
    return ds.intensities.mean(axis=0)


def dynamic_spectra(ds: SpectralDataset, ref: ReferenceSpec | None = None) -> DynamicSpectra:
    """Subtract the chosen reference spectrum from every spectrum in the series."""
    ref = ref or ReferenceSpec.mean()
    reference = ref.resolve(ds)
    return DynamicSpectra(
        spectral_axis=ds.spectral_axis,
        perturbation_axis=ds.perturbation_axis,
        values=ds.intensities - reference[None, :],
        reference_used=reference,
    )


def default_target_count(m: int) -> int:
    """Smallest power of two >= max(m, 4)."""
    if m < 2:
        raise DataError(f"m must be >= 2, got {m}")
    return 1 << (max(m, 4) - 1).bit_length()


def _interp_linear(t_old: np.ndarray, values: np.ndarray, t_new: np.ndarray) -> np.ndarray:
    # vectorized columnwise linear interpolation at interior query points
    idx = np.clip(np.searchsorted(t_old, t_new, side="right") - 1, 0, t_old.size - 2)
    t0, t1 = t_old[idx], t_old[idx + 1]
    frac = (t_new - t0) / (t1 - t0)
    return values[idx] + frac[:, None] * (values[idx + 1] - values[idx])


def resample_to_axis(
    ds: SpectralDataset,
    new_axis: np.ndarray,
    kind: InterpolantKind = InterpolantKind.CUBIC_SPLINE,
) -> SpectralDataset:
    """Interpolate every spectral channel onto a given perturbation axis.

    The new axis must lie within [min(t), max(t)]; no extrapolation.
    """
    new_axis = np.asarray(new_axis, dtype=float)
    t_old = ds.perturbation_axis
    if new_axis[0] < t_old[0] or new_axis[-1] > t_old[-1]:
        raise DataError(
            f"target axis [{new_axis[0]:g}, {new_axis[-1]:g}] extends beyond "
            f"the data range [{t_old[0]:g}, {t_old[-1]:g}]"
        )
    if kind is InterpolantKind.LINEAR or ds.m < 3:
        # a natural spline through two points is the straight line anyway
        values = _interp_linear(t_old, ds.intensities, new_axis)
    elif kind is InterpolantKind.CUBIC_SPLINE:
        values = CubicSpline(t_old, ds.intensities, axis=0, bc_type="natural")(new_axis)
    else:
        raise DataError(f"unknown interpolant {kind!r}")
    return SpectralDataset(ds.spectral_axis, new_axis, values, ds.axis_labels)


def resample_equidistant(
    ds: SpectralDataset,
    target_count: int,
    kind: InterpolantKind = InterpolantKind.CUBIC_SPLINE,
) -> SpectralDataset:
    """Interpolate every spectral channel onto an equidistant perturbation axis.

    The new axis spans [min(t), max(t)] inclusive with `target_count` points.
    Cubic interpolation uses a natural cubic spline (zero second derivative at
    the ends); linear uses piecewise-linear interpolation.
    """
    if target_count < 4:
        raise DataError(f"target_count must be >= 4, got {target_count}")
    t_old = ds.perturbation_axis
    return resample_to_axis(ds, np.linspace(t_old[0], t_old[-1], target_count), kind)


def stddev_spectrum(ds: SpectralDataset, ref: ReferenceSpec | None = None) -> np.ndarray:
    """Per-channel standard deviation about the chosen reference.

    With the mean reference this is the textbook sample standard deviation
    (denominator m - 1).  Other references keep the same formula with the
    reference substituted for the mean; interpret scaled results with care in
    that case.
    """
    if ds.m < 2:
        raise DataError(f"standard deviation needs m >= 2, got {ds.m}")
    ref = ref or ReferenceSpec.mean()
    reference = ref.resolve(ds)
    centered = ds.intensities - reference[None, :]
    return np.sqrt((centered ** 2).sum(axis=0) / (ds.m - 1))


def apply_scaling(
    dyn: DynamicSpectra,
    sigma: np.ndarray,
    alpha: float,
    on_zero_variance: str = "error",
) -> DynamicSpectra:
    """Divide each spectral channel by sigma**alpha.

    alpha = 0 is the identity.  Channels with sigma == 0 are an error under
    alpha > 0 unless ``on_zero_variance="substitute"``, which replaces their
    sigma by 1 and warns.
    """
    if not 0.0 <= alpha <= 1.0:
        raise DataError(f"scaling exponent must lie in [0, 1], got {alpha}")
    if dyn.scaling_exponent != 0.0:
        raise DataError("dynamic spectra are already scaled")
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (dyn.n,):
        raise DataError(f"sigma length {sigma.size} does not match n = {dyn.n}")
    if alpha == 0.0:
        return DynamicSpectra(
            dyn.spectral_axis, dyn.perturbation_axis, dyn.values,
            dyn.reference_used, 0.0, sigma,
        )
    dead = sigma == 0.0
    if np.any(dead):
        positions = dyn.spectral_axis[dead]
        shown = ", ".join(f"{p:g}" for p in positions[:5])
        if on_zero_variance == "error":
            raise NumericError(
                f"zero-variance spectral channel(s) at {shown}"
                f"{' ...' if positions.size > 5 else ''}; cannot scale with "
                f"alpha = {alpha:g}"
            )
        if on_zero_variance != "substitute":
            raise DataError(f"unknown zero-variance policy {on_zero_variance!r}")
        warnings.warn(
            f"substituting sigma = 1 for zero-variance channel(s) at {shown}",
            RuntimeWarning, stacklevel=2,
        )
        sigma = np.where(dead, 1.0, sigma)
    return DynamicSpectra(
        dyn.spectral_axis, dyn.perturbation_axis,
        dyn.values / sigma[None, :] ** alpha,
        dyn.reference_used, alpha, sigma,
    )


def preprocess_dataset(
    ds: SpectralDataset,
    spec: PreprocessSpec | None = None,
    on_zero_variance: str = "error",
) -> DynamicSpectra:
    """Full preprocessing pipeline: resample, subtract reference, scale."""
    spec = spec or PreprocessSpec()
    if spec.resample is not None:
        ds = resample_equidistant(ds, spec.resample.target_count, spec.resample.interpolant)
    dyn = dynamic_spectra(ds, spec.reference)
    if spec.scaling_exponent > 0.0:
        sigma = stddev_spectrum(ds, spec.reference)
        return apply_scaling(dyn, sigma, spec.scaling_exponent, on_zero_variance)
    return dyn
