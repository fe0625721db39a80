"""
Tests for field files, JSON documents and plot data.
"""

import numpy as np
import pandas as pd
import pytest

from src.core.exceptions import FieldFormatError, GridError
from src.core.grid import Field1D, Field2D, Grid2D
from src.utils.field_io import (
    atomic_write_text,
    emit_plot_data,
    field_frame,
    load_field,
    read_json,
    save_field,
    write_json,
)

pytestmark = pytest.mark.unit


class TestFieldFiles:
    def test_values_survive_a_write(self, tmp_path, gaussian_1d):
        path = save_field(gaussian_1d, tmp_path / "u.csv")
        loaded = load_field(path)

        assert isinstance(loaded, Field1D)
        assert np.array_equal(loaded.values, gaussian_1d.values)
        assert loaded.grid.n == gaussian_1d.grid.n
        assert loaded.grid.h == pytest.approx(gaussian_1d.grid.h)

    def test_2d_layout(self, tmp_path, gaussian_2d):
        path = save_field(gaussian_2d, tmp_path / "u2.csv")
        frame = pd.read_csv(path)
        assert list(frame.columns) == ["x", "y", "value"]
        # x outer, y inner
        assert frame["x"].iloc[0] == frame["x"].iloc[1]

        loaded = load_field(path)
        assert isinstance(loaded, Field2D)
        assert loaded.shape == (24, 12)
        assert np.array_equal(loaded.values, gaussian_2d.values)

    def test_moduli_taken_on_load(self, tmp_path):
        (tmp_path / "neg.csv").write_text("x,value\n0,-1\n1,2\n2,-3\n")
        assert load_field(tmp_path / "neg.csv").values.tolist() == [1.0, 2.0, 3.0]

    @pytest.mark.parametrize(
        "text",
        [
            "x,value\n0,1\n1,nan\n",
            "x,value\n0,1\n1,abc\n",
            "x,value\n0,1\n1,2\n3,4\n",
            "x,value\n0,1\n",
            "x,value\n1,1\n0,2\n",
            "a,b\n0,1\n1,2\n",
            "x,y,value\n0,0,1\n0,1,1\n1,0,1\n",
            "x,y,value\n0,0,1\n1,0,1\n0,1,1\n1,1,1\n",
        ],
        ids=[
            "non-finite",
            "non-numeric",
            "uneven-spacing",
            "single-sample",
            "decreasing",
            "bad-header",
            "partial-tensor",
            "y-outer",
        ],
    )
    def test_malformed_files(self, tmp_path, text):
        path = tmp_path / "bad.csv"
        path.write_text(text)
        with pytest.raises(FieldFormatError):
            load_field(path)

    def test_missing_file_is_a_grid_error(self, tmp_path):
        with pytest.raises(GridError):
            load_field(tmp_path / "missing.csv")

    def test_frame_columns(self, line_grid):
        u = Field1D.from_samples(line_grid, np.arange(8.0))
        frame = field_frame(u)
        assert list(frame.columns) == ["x", "value"]
        assert frame["x"].tolist() == line_grid.centers.tolist()

    def test_2d_frame_size(self):
        u = Field2D.zeros(Grid2D.centered(3, 2, 1.0, 1.0))
        assert len(field_frame(u)) == 6


class TestDocuments:
    def test_json_keys_sorted(self, tmp_path):
        path = write_json({"b": 1, "a": {"d": 2, "c": 3}}, tmp_path / "out" / "doc.json")
        text = path.read_text()
        assert text.index('"a"') < text.index('"b"')
        assert text.index('"c"') < text.index('"d"')
        assert read_json(path) == {"a": {"c": 3, "d": 2}, "b": 1}

    def test_atomic_write_replaces(self, tmp_path):
        path = tmp_path / "file.txt"
        atomic_write_text(path, "old")
        atomic_write_text(path, "new")
        assert path.read_text() == "new"
        assert [p.name for p in tmp_path.iterdir()] == ["file.txt"]

    def test_plot_data_header_only(self, tmp_path):
        empty = pd.DataFrame(columns=["check_id", "h", "margin"])
        path = emit_plot_data(empty, tmp_path / "plot.csv")
        assert path.read_text().strip() == "check_id,h,margin"

    def test_plot_data_column_order(self, tmp_path):
        table = pd.DataFrame({"energy": [-0.5, -0.25], "alpha": [1.0, 2.0], "extra": [0, 0]})
        path = emit_plot_data(table, tmp_path / "curve.csv", columns=["alpha", "energy"])
        assert path.read_text().splitlines() == ["alpha,energy", "1,-0.5", "2,-0.25"]

