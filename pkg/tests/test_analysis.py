import numpy as np
import pytest

from corrtwo import (
    DataError,
    Verdict,
    classify_cross_peak,
    correlate_ft,
    correlate_ht,
    dynamic_spectra,
    find_peaks,
    simulate_default,
)
from test_dataset_io import make_result


class TestClassify:
    def test_rule_one_and_three(self):
        v = classify_cross_peak(1.0, 0.5, 1e-3)
        assert v.direction is Verdict.SAME_DIRECTION
        assert v.order is Verdict.NU1_BEFORE

    def test_rule_two_and_five(self):
        v = classify_cross_peak(-1.0, 0.5, 1e-3)
        assert v.direction is Verdict.OPPOSITE_DIRECTION
        assert v.order is Verdict.NU1_AFTER

    def test_rule_four(self):
        v = classify_cross_peak(1.0, -0.5, 1e-3)
        assert v.order is Verdict.NU1_AFTER

    def test_rule_four_and_five(self):
        v = classify_cross_peak(-1.0, -0.5, 1e-3)
        assert v.order is Verdict.NU1_BEFORE

    def test_dead_band(self):
        v = classify_cross_peak(0.0, 0.0, 1e-3)
        assert v.direction is Verdict.INDETERMINATE
        assert v.order is Verdict.INDETERMINATE

    def test_direction_only_when_async_small(self):
        v = classify_cross_peak(1.0, 1e-6, 1e-3)
        assert v.direction is Verdict.SAME_DIRECTION
        assert v.order is Verdict.INDETERMINATE

    def test_eps_must_be_positive(self):
        with pytest.raises(DataError):
            classify_cross_peak(1.0, 1.0, 0.0)

    def test_antisymmetry_in_psi(self):
        rng = np.random.default_rng(0)
        flip = {Verdict.NU1_BEFORE: Verdict.NU1_AFTER,
                Verdict.NU1_AFTER: Verdict.NU1_BEFORE}
        for _ in range(200):
            phi = float(rng.normal())
            psi = float(rng.normal())
            eps = 1e-3
            if abs(psi) <= eps:
                continue
            forward = classify_cross_peak(phi, psi, eps)
            backward = classify_cross_peak(phi, -psi, eps)
            assert backward.order is flip[forward.order]
            assert backward.direction is forward.direction

    def test_positive_rescaling_invariance(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            phi, psi = rng.normal(size=2)
            eps = float(rng.uniform(1e-6, 1e-1))
            scale = float(rng.uniform(1e-8, 1e8))
            a = classify_cross_peak(phi, psi, eps)
            b = classify_cross_peak(scale * phi, scale * psi, scale * eps)
            assert a == b


class TestFindPeaks:
    def test_zero_matrices_empty_report(self):
        rng = np.random.default_rng(2)
        result = make_result(rng)
        result.sync[:] = 0.0
        result.asyn[:] = 0.0
        report = find_peaks(result)
        assert report.auto_peaks == [] and report.cross_peaks == []

    def test_single_dominant_auto_peak(self):
        axis = np.linspace(0.0, 4.0, 5)
        sync = np.zeros((5, 5))
        sync[2, 2] = 5.0
        result_kwargs = dict(
            axis1=axis, axis2=axis, sync=sync, asyn=np.zeros((5, 5)),
            ref1=np.zeros(5), ref2=np.zeros(5), normalization=1.0,
            engine="fourier", is_homo=True,
        )
        from corrtwo import CorrelationSpectra
        report = find_peaks(CorrelationSpectra(**result_kwargs))
        assert len(report.auto_peaks) == 1
        assert report.auto_peaks[0].nu == 2.0
        assert report.auto_peaks[0].phi == 5.0

    def test_simulated_dataset_auto_peaks_at_band_centers(self):
        # the intermediate species B only reaches ~0.3 concentration, so its
        # auto peak is ~2% of the strongest; the threshold must sit below that
        ds = simulate_default(61)   # 5 cm^-1 grid, centers on grid
        report = find_peaks(correlate_ft(dynamic_spectra(ds)), 0.01)
        found = sorted(p.nu for p in report.auto_peaks)
        for center in (1600.0, 1650.0, 1700.0):
            assert any(abs(nu - center) <= 5.0 for nu in found), (center, found)

    def test_threshold_validated(self):
        rng = np.random.default_rng(3)
        with pytest.raises(DataError, match="threshold_fraction"):
            find_peaks(make_result(rng), 1.5)

    def test_homo_reports_upper_triangle_only(self):
        ds = simulate_default(61)
        report = find_peaks(correlate_ft(dynamic_spectra(ds)), 0.05)
        assert all(p.nu2 > p.nu1 for p in report.cross_peaks)

    def test_report_formats(self):
        ds = simulate_default(61)
        report = find_peaks(correlate_ht(dynamic_spectra(ds)), 0.05)
        table = report.to_table()
        assert "auto peaks" in table and "cross peaks" in table
        long_form = report.to_long_form().decode()
        header, *rows = long_form.strip().split("\n")
        assert header == "kind,nu1,nu2,sync,async,direction,order"
        assert len(rows) == len(report.auto_peaks) + len(report.cross_peaks)


class TestEngineInvariance:
    def test_verdicts_identical_between_engines(self):
        ds = simulate_default(61)
        dyn = dynamic_spectra(ds)
        ft = correlate_ft(dyn)
        ht = correlate_ht(dyn)
        eps_ft = 1e-3 * max(np.abs(ft.sync).max(), np.abs(ft.asyn).max())
        eps_ht = 1e-3 * max(np.abs(ht.sync).max(), np.abs(ht.asyn).max())
        threshold = 0.1 * np.abs(ht.asyn).max()
        for i in range(0, 61, 5):
            for k in range(0, 61, 5):
                if abs(ht.asyn[i, k]) <= threshold:
                    continue
                a = classify_cross_peak(ft.sync[i, k], ft.asyn[i, k], eps_ft)
                b = classify_cross_peak(ht.sync[i, k], ht.asyn[i, k], eps_ht)
                assert a == b
