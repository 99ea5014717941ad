"""Synthetic perturbation-dependent spectra from a consecutive first-order reaction.

The model is A -> B -> C with rate constants k1 and k2 and unit initial
concentration of A:

    cA(t) = exp(-k1 t)
    cB(t) = k1/(k2 - k1) * (exp(-k1 t) - exp(-k2 t))
    cC(t) = 1 - cA - cB

Each species contributes bands (Lorentzian or Gaussian) whose intensity tracks
its concentration; optional i.i.d. Gaussian noise comes from numpy's seeded
PCG64 generator, so a given seed reproduces the dataset bit for bit.

The default scenario used by tests and the benchmark harness: k1 = 0.2,
k2 = 0.8 (per unit time), 100 equidistant sample times on [0, 10], three
Lorentzian bands (A: 1600, B: 1650, C: 1700; half-width 10; amplitude 1) on an
equidistant spectral axis spanning [1500, 1800].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import SpectralDataset
from .errors import DataError

DEFAULT_K1 = 0.2
DEFAULT_K2 = 0.8
DEFAULT_TIME_SPAN = (0.0, 10.0)
DEFAULT_TIME_COUNT = 100
DEFAULT_SPECTRAL_SPAN = (1500.0, 1800.0)
DEFAULT_BAND_CENTERS = {"A": 1600.0, "B": 1650.0, "C": 1700.0}
DEFAULT_BAND_WIDTH = 10.0


@dataclass(frozen=True)
class KineticsSpec:
    """Rate constants and sample times of the consecutive reaction."""

    k1: float
    k2: float
    times: np.ndarray
    allow_equal_rates: bool = False

    def __post_init__(self):
        object.__setattr__(self, "times", np.asarray(self.times, dtype=float))
        if not (self.k1 > 0 and self.k2 > 0):
            raise DataError(f"rate constants must be positive, got {self.k1}, {self.k2}")
        if self.k1 == self.k2 and not self.allow_equal_rates:
            raise DataError(
                "k1 == k2 is rejected by default (catastrophic cancellation); "
                "set allow_equal_rates=True to use the analytic limit"
            )
        if self.times.size < 2:
            raise DataError("need at least two sample times")
        if np.any(self.times < 0):
            raise DataError("sample times must be >= 0")
        if not np.all(np.diff(self.times) > 0):
            raise DataError("sample times must be strictly increasing")


@dataclass(frozen=True)
class BandSpec:
    """One spectral band tied to one species."""

    center: float
    width: float
    shape: str = "lorentzian"
    species: str = "A"
    amplitude: float = 1.0

    def __post_init__(self):
        if self.width <= 0:
            raise DataError(f"band width must be positive, got {self.width}")
        if self.amplitude <= 0:
            raise DataError(f"band amplitude must be positive, got {self.amplitude}")
        if self.shape not in ("lorentzian", "gaussian"):
            raise DataError(f"unknown band shape {self.shape!r}")
        if self.species not in ("A", "B", "C"):
            raise DataError(f"unknown species {self.species!r}")

    def profile(self, spectral_axis: np.ndarray) -> np.ndarray:
        d = np.asarray(spectral_axis, dtype=float) - self.center
        if self.shape == "lorentzian":
            return self.width ** 2 / (d ** 2 + self.width ** 2)
        return np.exp(-d ** 2 / (2.0 * self.width ** 2))


def consecutive_first_order(
    k1: float,
    k2: float,
    t,
    allow_equal_rates: bool = False,
):
    """Concentrations (cA, cB, cC) of the A -> B -> C reaction at time(s) t.

    cA + cB + cC = 1 holds exactly by construction.  k1 == k2 is an error
    unless `allow_equal_rates`, which switches cB to the limit k1*t*exp(-k1*t).
    """
    if not (k1 > 0 and k2 > 0):
        raise DataError(f"rate constants must be positive, got {k1}, {k2}")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DataError("time must be >= 0")
    c_a = np.exp(-k1 * t)
    if k1 == k2:
        if not allow_equal_rates:
            raise DataError(
                "k1 == k2 is rejected by default; set allow_equal_rates=True "
                "to use the analytic limit"
            )
        c_b = k1 * t * np.exp(-k1 * t)
    else:
        c_b = k1 / (k2 - k1) * (np.exp(-k1 * t) - np.exp(-k2 * t))
    c_c = 1.0 - c_a - c_b
    return c_a, c_b, c_c


def default_kinetics(
    m: int = DEFAULT_TIME_COUNT,
    t_max: float = DEFAULT_TIME_SPAN[1],
    k1: float = DEFAULT_K1,
    k2: float = DEFAULT_K2,
) -> KineticsSpec:
    return KineticsSpec(k1, k2, np.linspace(DEFAULT_TIME_SPAN[0], t_max, m))


def default_bands(width: float = DEFAULT_BAND_WIDTH, amplitude: float = 1.0) -> list[BandSpec]:
    return [
        BandSpec(center, width, "lorentzian", species, amplitude)
        for species, center in DEFAULT_BAND_CENTERS.items()
    ]


def default_spectral_axis(n: int) -> np.ndarray:
    if n < 2:
        raise DataError(f"need n >= 2 spectral points, got {n}")
    return np.linspace(*DEFAULT_SPECTRAL_SPAN, n)


def sim2ddata(
    kinetics: KineticsSpec,
    bands: list[BandSpec],
    spectral_axis,
    noise_sd: float = 0.0,
    seed: int = 0,
) -> SpectralDataset:
    """Simulate an m x n dataset from the reaction model and band list.

    intensity[j, i] = sum over bands of
        amplitude * c_species(t_j) * profile(nu_i) + noise

    Noise is normal(0, noise_sd), drawn row-major from numpy's
    ``default_rng(seed)`` (PCG64).  Identical inputs and seed give a
    bit-identical dataset.
    """
    if not bands:
        raise DataError("band list must not be empty")
    if noise_sd < 0:
        raise DataError(f"noise_sd must be >= 0, got {noise_sd}")
    spectral_axis = np.asarray(spectral_axis, dtype=float)
    if spectral_axis.size < 2:
        raise DataError("need at least two spectral points")
    c_a, c_b, c_c = consecutive_first_order(
        kinetics.k1, kinetics.k2, kinetics.times, kinetics.allow_equal_rates
    )
    concentration = {"A": c_a, "B": c_b, "C": c_c}
    intensities = np.zeros((kinetics.times.size, spectral_axis.size))
    for band in bands:
        intensities += (
            band.amplitude
            * concentration[band.species][:, None]
            * band.profile(spectral_axis)[None, :]
        )
    if noise_sd > 0:
        rng = np.random.default_rng(seed)
        intensities = intensities + rng.normal(0.0, noise_sd, intensities.shape)
    return SpectralDataset(
        spectral_axis, kinetics.times, intensities,
        axis_labels=("nu", "t"),
    )


def simulate_default(
    n_spectral: int,
    m: int = DEFAULT_TIME_COUNT,
    noise_sd: float = 0.0,
    seed: int = 0,
) -> SpectralDataset:
    """The default scenario with an n-point spectral axis (see module docstring)."""
    return sim2ddata(
        default_kinetics(m), default_bands(), default_spectral_axis(n_spectral),
        noise_sd=noise_sd, seed=seed,
    )
