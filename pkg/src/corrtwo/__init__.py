"""corrtwo: generalized two-dimensional correlation spectroscopy.

Converts a perturbation-ordered series of 1D spectra into synchronous and
asynchronous 2D correlation matrices through two independent routes (a
weighted half-spectrum FFT and the Hilbert-Noda matrix), with preprocessing
(equidistant resampling, reference subtraction, variance scaling), a reaction
-kinetics data simulator, contour-plot SVG emission, Noda-rule peak
classification and a worker-scaling benchmark harness.
"""

__version__ = "0.1.0"

from .analysis import (
    CrossPeakVerdict,
    PeakReport,
    Verdict,
    classify_cross_peak,
    find_peaks,
)
from .bench import BenchReport, BenchRow, run_bench
from .dataset import (
    LONG_FORM,
    MATRIX_PAIR,
    CorrelationSpectra,
    SpectralDataset,
    load_correlation,
    load_dataset,
    parse_dataset,
    read_correlation,
    save_correlation,
    save_dataset,
    serialize_dataset,
    write_correlation,
)
from .engine_core import NormalizationSpec
from .errors import CorrtwoError, DataError, NumericError, ParseError
from .fourier import FourierWorkspace, correlate_ft, dft_channels, half_spectrum_weights
from .hilbert import correlate_ht, hilbert_noda_matrix, hilbert_transform, sync_direct
from .preprocess import (
    DynamicSpectra,
    InterpolantKind,
    PreprocessSpec,
    ReferenceSpec,
    ResampleSpec,
    apply_scaling,
    default_target_count,
    dynamic_spectra,
    mean_reference,
    preprocess_dataset,
    resample_equidistant,
    resample_to_axis,
    stddev_spectrum,
)
from .render import LevelScale, PlotSpec, compute_levels, render_plot, window_axes
from .simulate import (
    BandSpec,
    KineticsSpec,
    consecutive_first_order,
    default_bands,
    default_kinetics,
    default_spectral_axis,
    sim2ddata,
    simulate_default,
)

__all__ = [
    "BandSpec", "BenchReport", "BenchRow", "CorrelationSpectra", "CorrtwoError",
    "CrossPeakVerdict", "DataError", "DynamicSpectra", "FourierWorkspace",
    "InterpolantKind", "KineticsSpec", "LevelScale", "LONG_FORM", "MATRIX_PAIR",
    "NormalizationSpec", "NumericError", "ParseError", "PeakReport", "PlotSpec",
    "PreprocessSpec", "ReferenceSpec", "ResampleSpec", "SpectralDataset",
    "Verdict", "apply_scaling", "classify_cross_peak", "compute_levels",
    "consecutive_first_order", "correlate_ft", "correlate_ht",
    "default_bands", "default_kinetics", "default_spectral_axis",
    "default_target_count", "dft_channels", "dynamic_spectra", "find_peaks",
    "half_spectrum_weights", "hilbert_noda_matrix", "hilbert_transform",
    "load_correlation", "load_dataset", "mean_reference", "parse_dataset",
    "preprocess_dataset", "read_correlation", "render_plot",
    "resample_equidistant", "resample_to_axis", "run_bench", "save_correlation",
    "save_dataset", "serialize_dataset", "sim2ddata", "simulate_default",
    "stddev_spectrum", "sync_direct", "window_axes", "write_correlation",
]
