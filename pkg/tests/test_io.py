"""Round-trip and diagnostic tests for the plain-text file formats."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bendrop import (
    CurveShape,
    InputError,
    SphereField,
    ball_cells,
    circle_panels,
    fibonacci_sphere_panels,
    get_grid,
    read_csv,
    read_curve,
    read_field,
    read_json_record,
    read_set,
    read_shape,
    write_csv,
    write_curve,
    write_field,
    write_json_record,
    write_set,
)

# %.17g round-trips every finite double; -0.0 is normalized to +0.0 because
# zero coefficients are dropped from the files entirely
finite = st.floats(allow_nan=False, allow_infinity=False).map(lambda x: x + 0.0)


@settings(deadline=None, max_examples=60)
@given(L=st.integers(2, 6), data=st.data())
def test_field_roundtrip_is_bit_exact(L, data):
    grid = get_grid(L)
    n = grid.n_coeffs
    coeffs = np.array(
        data.draw(st.lists(finite, min_size=n, max_size=n)), dtype=np.float64
    )
    f = SphereField(grid, coeffs)
    path = "/tmp/bendrop-test-field.txt"
    write_field(path, f)
    back = read_field(path)
    assert back.grid.band_limit == L
    assert np.array_equal(back.coeffs, f.coeffs)
    # bit-exact includes exponent extremes
    assert all(a == b for a, b in zip(back.coeffs, f.coeffs))


@settings(deadline=None, max_examples=60)
@given(
    degree=st.integers(1, 8),
    base_radius=st.floats(0.01, 100.0),
    data=st.data(),
)
def test_curve_roundtrip_is_bit_exact(degree, base_radius, data):
    n = 2 * degree + 1
    coeffs = np.array(
        data.draw(st.lists(finite, min_size=n, max_size=n)), dtype=np.float64
    )
    shape = CurveShape(degree, coeffs, base_radius)
    path = "/tmp/bendrop-test-curve.txt"
    write_curve(path, shape)
    back = read_curve(path)
    assert back.degree == degree
    assert back.base_radius == base_radius
    assert back.n_samples == shape.n_samples
    assert np.array_equal(back.coeffs, shape.coeffs)


@pytest.mark.parametrize(
    "make",
    [
        lambda: fibonacci_sphere_panels(64),
        lambda: circle_panels(32),
        lambda: ball_cells(100),
    ],
)
def test_set_roundtrip_is_bit_exact(make, tmp_path):
    ds = make()
    path = str(tmp_path / "set.txt")
    write_set(path, ds)
    back = read_set(path)
    assert back.dimension == ds.dimension
    assert back.mode == ds.mode
    assert np.array_equal(back.centroids, ds.centroids)
    assert np.array_equal(back.measures, ds.measures)
    assert np.array_equal(back.diameters, ds.diameters)
    for name in ("normals", "tangents"):
        a, b = getattr(ds, name), getattr(back, name)
        if a is None:
            assert b is None
        else:
            assert np.array_equal(a, b)


def test_read_shape_dispatches_on_magic(tmp_path):
    fpath = str(tmp_path / "f.txt")
    cpath = str(tmp_path / "c.txt")
    write_field(fpath, SphereField.zero(get_grid(3)))
    write_curve(cpath, CurveShape.circle(1.0, degree=4))
    assert isinstance(read_shape(fpath), SphereField)
    assert isinstance(read_shape(cpath), CurveShape)

    spath = str(tmp_path / "s.txt")
    write_set(spath, circle_panels(16))
    with pytest.raises(InputError, match="not a shape file"):
        read_shape(spath)


def test_missing_file_reports_input_error():
    with pytest.raises(InputError):
        read_field("/tmp/bendrop-does-not-exist.txt")
    with pytest.raises(InputError):
        read_json_record("/tmp/bendrop-does-not-exist.json")


def write_lines(path, lines):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


@pytest.mark.parametrize(
    "lines, fragment",
    [
        (["# wrong magic", "band_limit 2"], "expected"),
        (["# bendrop field v1", "band_limit 2", "coeff 1 0 abc"], "coefficient"),
        (["# bendrop field v1", "band_limit 2", "garbage here"], "unrecognized"),
        (["# bendrop field v1", "coeff 1 0 0.5"], "band_limit"),
        (["# bendrop field v1", "band_limit 2", "coeff 5 0 0.5"], "outside band limit"),
        (["# bendrop field v1", "band_limit 2", "coeff 2 5 0.5"], "order 5 invalid"),
    ],
)
def test_field_parse_diagnostics(tmp_path, lines, fragment):
    path = str(tmp_path / "bad.txt")
    write_lines(path, lines)
    with pytest.raises(InputError, match=fragment):
        read_field(path)


def test_field_diagnostics_carry_line_numbers(tmp_path):
    path = str(tmp_path / "bad.txt")
    write_lines(path, ["# bendrop field v1", "band_limit 2", "coeff 1 0 abc"])
    with pytest.raises(InputError) as exc:
        read_field(path)
    assert f"{path}:3" in str(exc.value)


@pytest.mark.parametrize(
    "lines, fragment",
    [
        (["# bendrop curve v1", "degree 3", "sin 0 0.4"], "sin 0"),
        (["# bendrop curve v1", "degree 3", "cos 7 0.4"], "outside degree"),
        (["# bendrop curve v1", "cos 1 0.4"], "missing degree"),
        (["# bendrop curve v1", "degree x"], "degree"),
    ],
)
def test_curve_parse_diagnostics(tmp_path, lines, fragment):
    path = str(tmp_path / "bad.txt")
    write_lines(path, lines)
    with pytest.raises(InputError, match=fragment):
        read_curve(path)


@pytest.mark.parametrize(
    "lines, fragment",
    [
        (["# bendrop set v1", "mode volume", "columns x y z measure diameter"],
         "columns line before dimension"),
        (["# bendrop set v1", "dimension 4"], "dimension must be 2 or 3"),
        (["# bendrop set v1", "dimension 3", "mode volume",
          "columns x y z measure diameter", "1 2 3"], "expected 5 values"),
        (["# bendrop set v1", "dimension 3", "mode volume",
          "columns x y z measure diameter"], "no elements"),
    ],
)
def test_set_parse_diagnostics(tmp_path, lines, fragment):
    path = str(tmp_path / "bad.txt")
    write_lines(path, lines)
    with pytest.raises(InputError, match=fragment):
        read_set(path)


def test_json_record_roundtrip(tmp_path):
    path = str(tmp_path / "rec.json")
    record = {
        "b": 1,
        "a": {"nested": [1.5, "x", None]},
        "value": 0.1 + 0.2,
    }
    write_json_record(path, record)
    assert read_json_record(path) == record
    # keys are sorted on disk so identical records give identical bytes
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    assert text.index('"a"') < text.index('"b"') < text.index('"value"')
    assert text.endswith("\n")


def test_json_diagnostics_carry_line(tmp_path):
    path = str(tmp_path / "bad.json")
    write_lines(path, ["{", '"a": 1,', "}"])
    with pytest.raises(InputError, match=":3:"):
        read_json_record(path)


@settings(deadline=None, max_examples=40)
@given(data=st.data())
def test_csv_roundtrip(data, tmp_path_factory):
    n_cols = data.draw(st.integers(1, 5))
    n_rows = data.draw(st.integers(1, 8))
    rows = [
        [data.draw(finite) for _ in range(n_cols)] for _ in range(n_rows)
    ]
    header = [f"col{i}" for i in range(n_cols)]
    path = "/tmp/bendrop-test-table.csv"
    write_csv(path, "test-table v1", header, rows)
    schema, got_header, arr = read_csv(path)
    assert schema == "test-table v1"
    assert got_header == header
    assert arr.shape == (n_rows, n_cols)
    assert np.array_equal(arr, np.array(rows))


def test_csv_integer_cells_parse_as_floats(tmp_path):
    path = str(tmp_path / "t.csv")
    write_csv(path, "mixed v1", ["i", "x"], [[3, 0.5], [7, 1.25]])
    _, _, arr = read_csv(path)
    assert np.array_equal(arr, np.array([[3.0, 0.5], [7.0, 1.25]]))


@pytest.mark.parametrize(
    "lines, fragment",
    [
        (["x,y", "1,2"], "missing '# bendrop"),
        (["# bendrop t v1", "x,y", "1,2,3"], "expected 2"),
        (["# bendrop t v1", "x,y", "1,abc"], "abc"),
    ],
)
def test_csv_parse_diagnostics(tmp_path, lines, fragment):
    path = str(tmp_path / "bad.csv")
    write_lines(path, lines)
    with pytest.raises(InputError, match=fragment):
        read_csv(path)
