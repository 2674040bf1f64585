"""CSV format round-trips and malformed-input diagnostics."""

import numpy as np
import pytest

from fdtm import CsvFormatError, sample_circle
from fdtm import csvio


class TestFloatFormat:
    def test_round_trip_17_digits(self):
        values = [1 / 3, np.pi, 1e-300, 123456.789, -0.1]
        for v in values:
            assert float(csvio.fmt(v)) == v


class TestCloudRoundTrip:
    def test_round_trip(self, tmp_path):
        pts = sample_circle(37, seed=3).points
        path = tmp_path / "cloud.csv"
        csvio.write_cloud(path, pts)
        back = csvio.read_cloud(path)
        assert np.array_equal(back, pts)

    def test_no_header_plain_rows(self, tmp_path):
        path = tmp_path / "cloud.csv"
        csvio.write_cloud(path, np.array([[1.0, 2.0]]))
        text = path.read_text().strip().splitlines()
        assert len(text) == 1 and not text[0].startswith("#")

    def test_wrong_arity_reports_row(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1.0,2.0\n3.0\n")
        with pytest.raises(CsvFormatError) as err:
            csvio.read_cloud(path)
        assert err.value.row == 2

    def test_non_numeric_reports_row(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1.0,2.0\n3.0,x\n")
        with pytest.raises(CsvFormatError) as err:
            csvio.read_cloud(path)
        assert err.value.row == 2


class TestMeasureRoundTrip:
    def test_round_trip(self, tmp_path):
        pts = np.array([[0.0, 1.0], [2.0, 3.0]])
        w = np.array([0.25, 0.75])
        path = tmp_path / "measure.csv"
        csvio.write_measure(path, pts, w)
        rp, rw = csvio.read_measure(path)
        assert np.array_equal(rp, pts)
        assert np.array_equal(rw, w)


class TestGeodesicFormat:
    def test_distance_comment(self, tmp_path):
        path = tmp_path / "geo.csv"
        csvio.write_geodesic(path, 0.125, np.array([[0.0, 0.0], [1.0, 1.0]]))
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "# distance=0.125"
        assert len(lines) == 3


class TestTableFormat:
    def test_metadata_then_rows(self, tmp_path):
        path = tmp_path / "table.csv"
        csvio.write_table(path, {"seed": 7}, ["n", "v"], [(128, 0.5), (256, 0.25)])
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "# seed=7"
        assert lines[1] == "# columns=n,v"
        assert lines[2] == "128,0.5"
