import numpy as np
import pytest

from panelbreak import (
    BreakSpec,
    PanelDimensionError,
    PanelFormatError,
    PanelMatrix,
    column_means,
    load_panel,
    save_panel,
)


class TestPanelMatrix:
    def test_shape_properties(self, small_panel):
        assert small_panel.n_panels == 2
        assert small_panel.n_time == 4

    def test_values_immutable(self, small_panel):
        with pytest.raises(ValueError):
            small_panel.values[0, 0] = 99.0

    def test_rejects_one_dimensional(self):
        with pytest.raises(PanelDimensionError):
            PanelMatrix(np.arange(5.0))

    def test_rejects_short_time_axis(self):
        with pytest.raises(PanelDimensionError):
            PanelMatrix(np.ones((3, 2)))

    def test_rejects_empty(self):
        with pytest.raises(PanelDimensionError):
            PanelMatrix(np.empty((0, 5)))

    def test_rejects_nan_with_location(self):
        arr = np.ones((2, 4))
        arr[1, 2] = np.nan
        with pytest.raises(PanelFormatError, match="panel 2, time 3"):
            PanelMatrix(arr)

    def test_single_panel_allowed(self):
        p = PanelMatrix(np.zeros((1, 3)))
        assert p.n_panels == 1


class TestBreakSpec:
    def test_change_time_floor(self):
        spec = BreakSpec(theta=0.5, deltas=np.zeros(3))
        assert spec.change_time(10) == 5
        assert spec.change_time(7) == 3

    def test_theta_range(self):
        for bad in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(ValueError):
                BreakSpec(theta=bad, deltas=np.zeros(2))

    def test_change_time_boundary_error(self):
        spec = BreakSpec(theta=0.01, deltas=np.zeros(2))
        with pytest.raises(ValueError):
            spec.change_time(10)  # floor(0.1) = 0

    def test_is_null(self):
        assert BreakSpec(theta=0.5, deltas=np.zeros(4)).is_null
        assert not BreakSpec(theta=0.5, deltas=np.array([0.0, 0.1])).is_null


class TestIO:
    def test_round_trip_rows(self, tmp_path, gauss_panel):
        path = tmp_path / "p.csv"
        save_panel(gauss_panel, path)
        back = load_panel(path)
        np.testing.assert_array_equal(back.values, gauss_panel.values)

    def test_round_trip_columns(self, tmp_path, gauss_panel):
        path = tmp_path / "p.csv"
        save_panel(gauss_panel, path, layout="panels-as-columns")
        back = load_panel(path, layout="panels-as-columns")
        np.testing.assert_array_equal(back.values, gauss_panel.values)

    def test_header_row_skipped(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("a,b,c,d\n1,2,3,4\n5,6,7,8\n")
        p = load_panel(path)
        assert p.values.shape == (2, 4)

    def test_ragged_rows_reported_with_line(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("1,2,3,4\n5,6,7\n")
        with pytest.raises(PanelFormatError, match="line 2"):
            load_panel(path)

    def test_non_numeric_body_rejected(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("1,2,3,4\n5,oops,7,8\n")
        with pytest.raises(PanelFormatError, match="line 2"):
            load_panel(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("\n\n")
        with pytest.raises(PanelFormatError):
            load_panel(path)

    def test_unknown_layout(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("1,2,3\n")
        with pytest.raises(ValueError):
            load_panel(path, layout="sideways")

    def test_columns_layout_too_few_rows(self, tmp_path):
        # two file rows = two time points after transposition: below T >= 3
        path = tmp_path / "p.csv"
        path.write_text("1,2,3,4\n5,6,7,8\n")
        with pytest.raises(PanelDimensionError):
            load_panel(path, layout="panels-as-columns")


def test_column_means(small_panel):
    np.testing.assert_allclose(column_means(small_panel), [2.5, 2.5])
