import numpy as np
import pytest

from corrtwo import (
    CorrelationSpectra,
    DataError,
    ParseError,
    load_dataset,
    parse_dataset,
    read_correlation,
    serialize_dataset,
    write_correlation,
)
from conftest import random_dataset


def make_result(rng, n1=4, n2=4, homo=True, engine="fourier"):
    axis1 = np.linspace(1500.0, 1600.0, n1)
    axis2 = axis1 if homo else np.linspace(100.0, 200.0, n2)
    raw = rng.normal(size=(n1, n2))
    if homo:
        sync = raw + raw.T
        asyn = raw - raw.T
    else:
        sync = raw
        asyn = rng.normal(size=(n1, n2))
    return CorrelationSpectra(
        axis1=axis1, axis2=axis2, sync=sync, asyn=asyn,
        ref1=rng.normal(size=n1), ref2=rng.normal(size=n2),
        normalization=0.25, engine=engine, is_homo=homo,
        scaling_exponent=0.5,
    )


class TestParseDataset:
    def test_furanmale_fragment(self, furanmale_path):
        ds = load_dataset(furanmale_path)
        assert ds.m == 6 and ds.n == 5
        assert ds.perturbation_axis[0] == 110.0
        assert ds.spectral_axis[0] == 1550.26392
        assert ds.intensities[0, 0] == 0.0058962811
        assert ds.intensities[1, 1] == 4.860985e-03
        assert ds.intensities[5, 4] == 0.007883910

    def test_minimal_2x2(self):
        ds = parse_dataset(",100,200\n0,1,2\n1,3,4\n")
        assert ds.m == 2 and ds.n == 2
        assert np.array_equal(ds.intensities, [[1.0, 2.0], [3.0, 4.0]])
        assert np.array_equal(ds.perturbation_axis, [0.0, 1.0])

    def test_single_spectrum_rejected(self):
        with pytest.raises(DataError, match="m < 2"):
            parse_dataset(",100,200\n0,1,2\n")

    def test_single_column_rejected(self):
        with pytest.raises(DataError, match="header row needs at least two"):
            parse_dataset(",100\n0,1\n1,2\n")

    def test_non_numeric_cell_reports_location(self):
        with pytest.raises(ParseError, match=r"row 3, column 2"):
            parse_dataset(",100,200\n0,1,2\n1,oops,4\n")

    def test_ragged_row_reports_row(self):
        with pytest.raises(ParseError, match=r"ragged row.*row 3"):
            parse_dataset(",100,200\n0,1,2\n1,3\n")

    def test_duplicate_spectral_axis(self):
        with pytest.raises(DataError, match="duplicate"):
            parse_dataset(",100,100\n0,1,2\n1,3,4\n")

    def test_non_monotonic_spectral_axis(self):
        with pytest.raises(DataError, match="monotonic"):
            parse_dataset(",100,300,200\n0,1,2,3\n1,4,5,6\n")

    def test_perturbation_must_increase(self):
        with pytest.raises(DataError, match="strictly increasing"):
            parse_dataset(",100,200\n1,1,2\n0,3,4\n")

    def test_decreasing_spectral_axis_preserved(self):
        ds = parse_dataset(",200,100\n0,1,2\n1,3,4\n")
        assert np.array_equal(ds.spectral_axis, [200.0, 100.0])

    def test_scientific_notation_and_tabs(self):
        ds = parse_dataset("\t1e2\t2e2\n0\t1.5e-3\t2.5e-3\n1\t-1e0\t+4e0\n", delimiter="\t")
        assert ds.intensities[0, 0] == 1.5e-3

    def test_spectral_rows_orientation(self):
        text = ",0,1\n100,1,3\n200,2,4\n"
        ds = parse_dataset(text, orientation="spectral-rows")
        assert np.array_equal(ds.spectral_axis, [100.0, 200.0])
        assert np.array_equal(ds.perturbation_axis, [0.0, 1.0])
        assert np.array_equal(ds.intensities, [[1.0, 2.0], [3.0, 4.0]])

    def test_non_finite_intensity_rejected(self):
        with pytest.raises(DataError, match="non-finite"):
            parse_dataset(",100,200\n0,1,inf\n1,3,4\n")

    def test_header_without_corner_cell(self):
        # R's write.csv omits the corner cell above the row-name column
        ds = parse_dataset("100,200\n0,1,2\n1,3,4\n")
        assert np.array_equal(ds.spectral_axis, [100.0, 200.0])
        assert np.array_equal(ds.perturbation_axis, [0.0, 1.0])
        assert np.array_equal(ds.intensities, [[1.0, 2.0], [3.0, 4.0]])


class TestDatasetRoundTrip:
    @pytest.mark.parametrize("seed", range(5))
    def test_parse_serialize_identity(self, seed):
        rng = np.random.default_rng(seed)
        ds = random_dataset(rng, m=int(rng.integers(2, 9)), n=int(rng.integers(2, 13)),
                            decreasing=bool(seed % 2))
        again = parse_dataset(serialize_dataset(ds))
        assert ds.equals(again)

    def test_order_preserved_exactly(self):
        rng = np.random.default_rng(42)
        ds = random_dataset(rng, 4, 6, decreasing=True)
        text = serialize_dataset(ds)
        lines = text.strip().split("\n")
        assert len(lines) == 5
        header = lines[0].split(",")[1:]
        assert [float(h) for h in header] == list(ds.spectral_axis)

    def test_labels_round_trip(self):
        ds = random_dataset(np.random.default_rng(0), 3, 4)
        ds.axis_labels = ("wavenumber / cm-1", "temperature / K")
        again = parse_dataset(serialize_dataset(ds))
        assert again.axis_labels == ds.axis_labels


class TestCorrelationIO:
    def test_matrix_pair_round_trip_bit_exact(self):
        rng = np.random.default_rng(1)
        result = make_result(rng)
        payload = write_correlation(result)
        assert set(payload) == {"sync.csv", "async.csv"}
        again = read_correlation(payload)
        assert np.array_equal(again.sync, result.sync)
        assert np.array_equal(again.asyn, result.asyn)
        assert np.array_equal(again.axis1, result.axis1)
        assert np.array_equal(again.ref1, result.ref1)
        assert again.engine == result.engine
        assert again.normalization == result.normalization
        assert again.scaling_exponent == result.scaling_exponent
        assert again.is_homo == result.is_homo

    def test_long_form_round_trip_bit_exact(self):
        rng = np.random.default_rng(2)
        result = make_result(rng, n1=3, n2=5, homo=False, engine="hilbert")
        payload = write_correlation(result, "long-form")
        again = read_correlation(payload["corr.csv"])
        assert np.array_equal(again.sync, result.sync)
        assert np.array_equal(again.asyn, result.asyn)
        assert again.engine == "hilbert"
        assert not again.is_homo

    def test_long_form_header(self):
        rng = np.random.default_rng(3)
        payload = write_correlation(make_result(rng), "long-form")
        lines = payload["corr.csv"].decode().split("\n")
        data_lines = [l for l in lines if l and not l.startswith("#")]
        assert data_lines[0] == "nu1,nu2,sync,async"
        assert len(data_lines) == 1 + 4 * 4

    def test_zero_result_body_cells(self):
        zero = CorrelationSpectra(
            axis1=[1.0, 2.0], axis2=[1.0, 2.0],
            sync=np.zeros((2, 2)), asyn=np.zeros((2, 2)),
            ref1=np.zeros(2), ref2=np.zeros(2),
            normalization=1.0, engine="fourier", is_homo=True,
        )
        payload = write_correlation(zero)
        for key in ("sync.csv", "async.csv"):
            rows = [l for l in payload[key].decode().split("\n")
                    if l and not l.startswith("#")][1:]
            body = [cell for row in rows for cell in row.split(",")[1:]]
            assert len(body) == 4
            assert all(float(cell) == 0.0 for cell in body)

    def test_homo_sync_transpose_preserved(self):
        rng = np.random.default_rng(4)
        result = make_result(rng, n1=6, n2=6, homo=True)
        again = read_correlation(write_correlation(result))
        assert np.array_equal(again.sync, again.sync.T)

    def test_round_trip_within_1e12(self):
        rng = np.random.default_rng(5)
        result = make_result(rng, n1=7, n2=7)
        again = read_correlation(write_correlation(result, "long-form"))
        assert np.allclose(again.sync, result.sync, rtol=1e-12, atol=0)

    def test_truncated_file_byte_offset(self):
        rng = np.random.default_rng(6)
        payload = write_correlation(make_result(rng), "long-form")
        truncated = payload["corr.csv"][:-20]
        with pytest.raises(ParseError, match="byte offset") as info:
            read_correlation(truncated)
        assert info.value.byte_offset is not None

    def test_dimension_mismatch(self):
        rng = np.random.default_rng(7)
        two = write_correlation(make_result(rng, n1=2, n2=2))
        three = write_correlation(make_result(rng, n1=3, n2=3))
        with pytest.raises(DataError, match="dimension mismatch"):
            read_correlation({"sync.csv": two["sync.csv"],
                              "async.csv": three["async.csv"]})

    def test_malformed_table(self):
        with pytest.raises(ParseError):
            read_correlation({"corr.csv": b"nu1,nu2,sync,async\n1,2,3\n"})

    def test_large_shape_labels(self):
        # FuranMale-sized result: 145 labeled rows and columns per table
        axis = np.linspace(1550.0, 1620.0, 145)
        zeros = np.zeros((145, 145))
        result = CorrelationSpectra(axis, axis, zeros, zeros, np.zeros(145),
                                    np.zeros(145), 1.0, "fourier", True)
        payload = write_correlation(result)
        rows = [l for l in payload["sync.csv"].decode().split("\n")
                if l and not l.startswith("#")]
        assert len(rows) == 146                      # header + 145 labeled rows
        assert len(rows[0].split(",")) == 146        # corner + 145 labeled columns
        assert read_correlation(payload).sync.shape == (145, 145)
