from pathlib import Path

import numpy as np
import pytest

from plotkit import SCHEMAS, SchemaError, read_table

GOLDEN = Path(__file__).parent / "golden"


@pytest.mark.parametrize("kind,name", [
    ("cosine", "cosine.csv"),
    ("gain-sweep", "gain_sweep.csv"),
    ("contour", "contour.csv"),
    ("curves", "curves.csv"),
])
def test_golden_files_validate(kind, name):
    data = read_table(GOLDEN / name, kind)
    assert set(data) == set(SCHEMAS[kind])
    n = {v.size for v in data.values()}
    assert len(n) == 1 and n.pop() > 0


def test_unknown_kind_rejected(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(SchemaError, match="unknown figure kind"):
        read_table(p, "scatter3d")


def test_empty_file_rejected(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("")
    with pytest.raises(SchemaError, match="no header"):
        read_table(p, "cosine")


def test_header_only_rejected(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("phi,ratio,fit\n")
    with pytest.raises(SchemaError, match="no rows"):
        read_table(p, "cosine")


def test_missing_column_named(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("g,e_model,e_mc,e_cl,q\n1,2,3,4,5\n")
    with pytest.raises(SchemaError, match="missing column 'e_mc_sigma'"):
        read_table(p, "gain-sweep")


def test_unexpected_column_named(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("phi,ratio,fit,extra\n0,1,1,1\n")
    with pytest.raises(SchemaError, match="unexpected column 'extra'"):
        read_table(p, "cosine")


def test_non_numeric_cell_named(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("phi,ratio,fit\n0.0,oops,1.0\n")
    with pytest.raises(SchemaError, match="column 'ratio'"):
        read_table(p, "cosine")


def test_ragged_row_rejected(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("phi,ratio,fit\n0.0,1.0\n")
    with pytest.raises(SchemaError, match="row 2"):
        read_table(p, "cosine")


def test_comment_lines_skipped(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("# columns: phi, ratio, fit\nphi,ratio,fit\n0.0,1.0,1.0\n")
    data = read_table(p, "cosine")
    assert data["phi"].tolist() == [0.0]
    assert isinstance(data["ratio"], np.ndarray)
