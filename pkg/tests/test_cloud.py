import numpy as np
import pytest

from levelset import InputError, PointCloud, PointCloudFormatError, load_csv, save_csv


class TestPointCloud:
    def test_columns_are_points(self):
        c = PointCloud(np.array([[0.1, 0.2], [0.3, 0.4]]))
        assert c.dims == 2
        assert c.count == 2
        assert np.array_equal(c.rows, [[0.1, 0.3], [0.2, 0.4]])

    def test_from_rows_round_trip(self, rng):
        rows = rng.uniform(-0.5, 0.5, (17, 3))
        c = PointCloud.from_rows(rows)
        assert np.array_equal(c.rows, rows)

    def test_out_of_box_rejected(self):
        with pytest.raises(InputError):
            PointCloud(np.array([[0.51], [0.0]]))

    def test_nan_rejected(self):
        with pytest.raises(InputError):
            PointCloud(np.array([[np.nan], [0.0]]))

    def test_needs_points(self):
        with pytest.raises(InputError):
            PointCloud(np.empty((2, 0)))

    def test_coordinates_read_only(self):
        c = PointCloud(np.zeros((2, 3)))
        with pytest.raises(ValueError):
            c.coordinates[0, 0] = 1.0


class TestCsvRoundTrip:
    def test_exact_round_trip(self, tmp_path, rng):
        coords = rng.uniform(-0.5, 0.5, (2, 50))
        coords[0, 0] = np.nextafter(0.5, 0)
        coords[1, 1] = -0.5
        coords[0, 2] = 1.0 / 3.0 - 0.25
        cloud = PointCloud(coords)
        path = tmp_path / "pts.csv"
        save_csv(cloud, path)
        loaded = load_csv(path)
        assert np.array_equal(loaded.coordinates, cloud.coordinates)

    def test_header_layout(self, tmp_path):
        path = tmp_path / "pts.csv"
        save_csv(PointCloud(np.zeros((3, 1))), path)
        assert path.read_text().splitlines()[0] == "x0,x1,x2"

    def test_save_load_is_stable_twice(self, tmp_path, rng):
        cloud = PointCloud(rng.uniform(-0.5, 0.5, (2, 9)))
        p1 = tmp_path / "a.csv"
        p2 = tmp_path / "b.csv"
        save_csv(cloud, p1)
        save_csv(load_csv(p1), p2)
        assert p1.read_text() == p2.read_text()


class TestCsvValidation:
    def _write(self, tmp_path, lines):
        path = tmp_path / "bad.csv"
        path.write_text("\n".join(lines) + "\n")
        return path

    def test_bad_header(self, tmp_path):
        path = self._write(tmp_path, ["a,b", "0,0"])
        with pytest.raises(PointCloudFormatError):
            load_csv(path)

    def test_out_of_range_reports_row(self, tmp_path):
        path = self._write(tmp_path, ["x0,x1", "0,0", "0.7,0"])
        with pytest.raises(PointCloudFormatError) as info:
            load_csv(path)
        assert info.value.row == 1

    def test_nan_reports_row(self, tmp_path):
        path = self._write(tmp_path, ["x0,x1", "nan,0"])
        with pytest.raises(PointCloudFormatError) as info:
            load_csv(path)
        assert info.value.row == 0

    def test_non_numeric_reports_row(self, tmp_path):
        path = self._write(tmp_path, ["x0,x1", "0,0", "0,oops"])
        with pytest.raises(PointCloudFormatError) as info:
            load_csv(path)
        assert info.value.row == 1

    def test_ragged_row_rejected(self, tmp_path):
        path = self._write(tmp_path, ["x0,x1", "0,0,0"])
        with pytest.raises(PointCloudFormatError):
            load_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(PointCloudFormatError):
            load_csv(tmp_path / "nope.csv")

    def test_empty_body_rejected(self, tmp_path):
        path = self._write(tmp_path, ["x0,x1"])
        with pytest.raises(PointCloudFormatError):
            load_csv(path)
