import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from axieuler.fields import CylGrid, ScalarField, VectorFieldRZ
from axieuler.io import (FileFormatError, read_json, read_scalar_field, read_targets,
                         read_vector_field, write_json, write_rows, write_scalar_field, write_vector_field)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(2, 6), st.integers(0, 2 ** 32 - 1))
def test_scalar_round_trip_is_bit_exact(tmp_path_factory, nr, nz, seed):
    rng = np.random.default_rng(seed)
    g = CylGrid(float(rng.uniform(0.1, 10)), -1.3, float(rng.uniform(0, 5)), nr, nz)
    f = ScalarField(g, rng.standard_normal(g.shape) * 10.0 ** rng.integers(-300, 300, g.shape))
    path = tmp_path_factory.mktemp("io") / "f.csv"
    write_scalar_field(path, f)
    back = read_scalar_field(path)
    assert np.array_equal(back.values, f.values)
    np.testing.assert_allclose(back.grid.r, g.r, rtol=1e-12)
    np.testing.assert_allclose(back.grid.z, g.z, rtol=1e-12, atol=1e-12)


def test_vector_round_trip(tmp_path):
    g = CylGrid(1.0, -1.0, 1.0, 3, 4)
    rng = np.random.default_rng(0)
    u = VectorFieldRZ(g, rng.random(g.shape), rng.random(g.shape))
    write_vector_field(tmp_path / "u.csv", u)
    back = read_vector_field(tmp_path / "u.csv")
    assert np.array_equal(back.ur, u.ur) and np.array_equal(back.uz, u.uz)
    assert (tmp_path / "u.csv").read_text().splitlines()[0] == "r,z,ur,uz"


def test_row_major_z_fastest(tmp_path):
    g = CylGrid(2.0, 0.0, 3.0, 2, 3)
    write_scalar_field(tmp_path / "f.csv", ScalarField(g, np.arange(6.0)))
    rows = (tmp_path / "f.csv").read_text().splitlines()[1:]
    assert [r.split(",")[1] for r in rows[:3]] == ["0.5", "1.5", "2.5"]
    assert rows[1] == "0.5,1.5,1"


@pytest.mark.parametrize("text,where", [
    ("r,z,val\n1,1,1\n", ":1:"),
    ("r,z,value\n0.5,0.5,1\n0.5,1.5\n", ":3:"),
    ("r,z,value\n0.5,0.5,1\n0.5,1.5,abc\n", ":3:"),
    ("r,z,value\n0.5,0.5,1\n0.5,1.5,inf\n", ":3:"),
    ("r,z,value\n", "no data"),
    ("r,z,value\n0.5,0.5,1\n0.5,1.5,1\n1.5,0.5,1\n", "full grid"),
    ("r,z,value\n0.5,0.5,1\n0.5,1.5,1\n1.5,1.5,1\n1.5,0.5,1\n", ":4:"),
])
def test_malformed_files_name_the_row(tmp_path, text, where):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(FileFormatError, match=where):
        read_scalar_field(p)


def test_missing_file(tmp_path):
    with pytest.raises(FileFormatError, match="cannot read"):
        read_scalar_field(tmp_path / "nope.csv")


def test_targets(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("r,z\n1,2\n3,-4\n")
    assert np.array_equal(read_targets(p), [[1, 2], [3, -4]])


def test_json_round_trip_and_errors(tmp_path):
    doc = {"b": [1, 2.5], "a": {"x": None}}
    write_json(tmp_path / "d.json", doc)
    assert read_json(tmp_path / "d.json") == doc
    assert list(json.loads((tmp_path / "d.json").read_text())) == ["a", "b"]
    (tmp_path / "bad.json").write_text("{\n  oops\n}")
    with pytest.raises(FileFormatError, match=":2:"):
        read_json(tmp_path / "bad.json")


def test_atomic_write_keeps_old_file_on_failure(tmp_path):
    path = tmp_path / "f.csv"
    path.write_text("old\n")

    def rows():
        yield (1.0, 2.0)
        raise RuntimeError("interrupted")

    with pytest.raises(RuntimeError):
        write_rows(path, ("a", "b"), rows())
    assert path.read_text() == "old\n"
    assert [p.name for p in tmp_path.iterdir()] == ["f.csv"]
