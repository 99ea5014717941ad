import numpy as np
import pytest

from corrtwo import (
    BandSpec,
    DataError,
    KineticsSpec,
    consecutive_first_order,
    default_bands,
    default_kinetics,
    default_spectral_axis,
    serialize_dataset,
    sim2ddata,
    simulate_default,
)
from oracles import kinetics_ivp


class TestConsecutiveFirstOrder:
    def test_initial_condition(self):
        assert consecutive_first_order(0.2, 0.8, 0.0) == (1.0, 0.0, 0.0)

    def test_long_time_asymptote(self):
        c_a, c_b, c_c = consecutive_first_order(1.0, 2.0, 100.0)
        assert abs(c_a) <= 1e-12
        assert abs(c_b) <= 1e-12
        assert abs(c_c - 1.0) <= 1e-12

    def test_closed_form_at_ln2(self):
        c_a, c_b, c_c = consecutive_first_order(1.0, 2.0, np.log(2.0))
        assert c_a == pytest.approx(0.5, rel=1e-14)
        assert c_b == pytest.approx(0.25, rel=1e-13)
        assert c_c == pytest.approx(0.25, rel=1e-13)

    def test_against_ode_integrator(self):
        times = np.linspace(0.0, 10.0, 25)
        c_a, c_b, c_c = consecutive_first_order(0.2, 0.8, times)
        o_a, o_b, o_c = kinetics_ivp(0.2, 0.8, times)
        assert np.abs(c_a - o_a).max() <= 1e-8
        assert np.abs(c_b - o_b).max() <= 1e-8
        assert np.abs(c_c - o_c).max() <= 1e-8

    def test_mass_balance_exact_by_construction(self):
        times = np.linspace(0.0, 20.0, 101)
        c_a, c_b, c_c = consecutive_first_order(0.3, 1.7, times)
        # cC is defined as the complement; the reassociated float sum can
        # differ from 1 by at most a couple of ulps
        assert np.array_equal(c_c, 1.0 - c_a - c_b)
        assert np.abs(c_a + c_b + c_c - 1.0).max() <= 4 * np.finfo(float).eps

    def test_monotonicity(self):
        times = np.linspace(0.0, 15.0, 200)
        c_a, _, c_c = consecutive_first_order(0.4, 1.1, times)
        assert np.all(np.diff(c_a) < 0)
        assert np.all(np.diff(c_c) > 0)

    def test_equal_rates_rejected_by_default(self):
        with pytest.raises(DataError, match="k1 == k2"):
            consecutive_first_order(1.0, 1.0, 1.0)

    def test_equal_rates_limit_form(self):
        t = np.linspace(0.0, 5.0, 11)
        _, c_b, _ = consecutive_first_order(1.0, 1.0, t, allow_equal_rates=True)
        expected = t * np.exp(-t)
        assert np.allclose(c_b, expected, rtol=1e-14)
        # the limit matches nearby distinct rates
        _, near, _ = consecutive_first_order(1.0, 1.0 + 1e-9, t)
        assert np.abs(c_b - near).max() <= 1e-6

    def test_negative_time_rejected(self):
        with pytest.raises(DataError, match=">= 0"):
            consecutive_first_order(1.0, 2.0, -1.0)


class TestSpecs:
    def test_kinetics_validation(self):
        with pytest.raises(DataError, match="strictly increasing"):
            KineticsSpec(0.2, 0.8, [0.0, 2.0, 1.0])
        with pytest.raises(DataError, match="positive"):
            KineticsSpec(-0.2, 0.8, [0.0, 1.0])
        with pytest.raises(DataError, match="k1 == k2"):
            KineticsSpec(0.5, 0.5, [0.0, 1.0])

    def test_band_validation(self):
        with pytest.raises(DataError, match="width"):
            BandSpec(1600.0, 0.0)
        with pytest.raises(DataError, match="shape"):
            BandSpec(1600.0, 10.0, shape="voigt")
        with pytest.raises(DataError, match="species"):
            BandSpec(1600.0, 10.0, species="D")

    def test_profiles(self):
        axis = np.array([1590.0, 1600.0, 1610.0])
        lorentz = BandSpec(1600.0, 10.0, "lorentzian").profile(axis)
        assert lorentz[1] == 1.0
        assert lorentz[0] == pytest.approx(0.5, rel=1e-15)
        gauss = BandSpec(1600.0, 10.0, "gaussian").profile(axis)
        assert gauss[1] == 1.0
        assert gauss[0] == pytest.approx(np.exp(-0.5), rel=1e-15)


class TestSim2ddata:
    def test_kinetics_endpoints_single_band(self):
        kinetics = KineticsSpec(1.0, 2.0, [0.0, 50.0])
        bands = [BandSpec(1600.0, 10.0, "lorentzian", "A", amplitude=2.0)]
        ds = sim2ddata(kinetics, bands, np.linspace(1500, 1800, 31))
        peak = np.argmin(np.abs(ds.spectral_axis - 1600.0))
        assert ds.intensities[0, peak] == pytest.approx(2.0, rel=1e-12)
        assert np.abs(ds.intensities[1]).max() <= 1e-12

    def test_benchmark_scenario_shape(self):
        ds = simulate_default(400, m=100)
        assert ds.intensities.shape == (100, 400)
        assert ds.perturbation_axis[0] == 0.0
        assert ds.perturbation_axis[-1] == 10.0

    def test_rank_at_most_three(self):
        ds = simulate_default(61, m=50)
        singular_values = np.linalg.svd(ds.intensities, compute_uv=False)
        assert singular_values[3] <= 1e-10 * singular_values[0]

    def test_seed_determinism_bitwise(self):
        a = simulate_default(31, m=20, noise_sd=0.01, seed=123)
        b = simulate_default(31, m=20, noise_sd=0.01, seed=123)
        assert np.array_equal(a.intensities, b.intensities)
        assert serialize_dataset(a) == serialize_dataset(b)

    def test_different_seeds_differ(self):
        a = simulate_default(31, m=20, noise_sd=0.01, seed=1)
        b = simulate_default(31, m=20, noise_sd=0.01, seed=2)
        assert not np.array_equal(a.intensities, b.intensities)

    def test_empty_band_list_rejected(self):
        with pytest.raises(DataError, match="band list"):
            sim2ddata(default_kinetics(10), [], default_spectral_axis(10))

    def test_default_scenario_constants(self):
        kinetics = default_kinetics()
        assert kinetics.k1 == 0.2 and kinetics.k2 == 0.8
        assert kinetics.times.size == 100
        bands = default_bands()
        assert [b.center for b in bands] == [1600.0, 1650.0, 1700.0]
        assert all(b.shape == "lorentzian" and b.width == 10.0 for b in bands)
        axis = default_spectral_axis(301)
        assert axis[0] == 1500.0 and axis[-1] == 1800.0
