import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from corrtwo import SpectralDataset, dynamic_spectra

FURANMALE_FRAGMENT = Path(__file__).parent / "data" / "furanmale_fragment.csv"


@pytest.fixture
def furanmale_path():
    return FURANMALE_FRAGMENT


def random_dataset(rng, m, n, decreasing=False):
    spectral = np.linspace(1000.0, 2000.0, n)
    if decreasing:
        spectral = spectral[::-1].copy()
    return SpectralDataset(
        spectral_axis=spectral,
        perturbation_axis=np.linspace(0.0, 10.0, m),
        intensities=rng.normal(size=(m, n)),
    )


def random_dynamic(rng, m, n):
    return dynamic_spectra(random_dataset(rng, m, n))


def smooth_dynamic(rng, m, n, basis="relax"):
    """Mean-centered dynamic spectra with smooth, low-rank perturbation profiles."""
    t = np.linspace(0.0, 1.0, m)
    if basis == "relax":
        columns = np.stack([np.exp(-k * t) for k in (0.8, 2.0, 4.5)], axis=1)
    elif basis == "poly":
        columns = np.stack([t, t ** 2, t ** 3], axis=1)
    else:
        raise ValueError(basis)
    values = columns @ rng.normal(size=(columns.shape[1], n))
    ds = SpectralDataset(np.linspace(1500.0, 1800.0, n), np.linspace(0.0, 10.0, m), values)
    return dynamic_spectra(ds)
