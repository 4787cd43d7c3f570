"""Plain-text serialization for shapes, sets, records and tables.

Three line-oriented shape formats (scalar field, curve, discretized set),
JSON for single records and manifests, and CSV with a versioned schema
comment for tables.  All floats are written with %.17g so that reading a
file back reproduces the exact binary values; parse failures raise
InputError with file and line diagnostics.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .capacity import DiscretizedSet
from .curves import CurveShape
from .errors import InputError
from .sphere import SphereField, get_grid

__all__ = [
    "write_field",
    "read_field",
    "write_curve",
    "read_curve",
    "write_set",
    "read_set",
    "read_shape",
    "write_json_record",
    "read_json_record",
    "write_csv",
    "read_csv",
    "FIELD_MAGIC",
    "CURVE_MAGIC",
    "SET_MAGIC",
]

FIELD_MAGIC = "# bendrop field v1"
CURVE_MAGIC = "# bendrop curve v1"
SET_MAGIC = "# bendrop set v1"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _ensure_dir(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    if parent:
        os.makedirs(parent, exist_ok=True)


class _LineReader:
    """Iterates meaningful lines of a text file, tracking line numbers."""

    def __init__(self, path: str):
        self.path = path
        try:
            with open(path, "r", encoding="utf-8") as fh:
                self.raw = fh.readlines()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from exc
        self.pos = 0

    def fail(self, lineno: int, message: str) -> InputError:
        return InputError(f"{self.path}:{lineno}: {message}")

    def lines(self):
        """Yield (lineno, stripped line) skipping blanks and later comments."""
        for i, raw in enumerate(self.raw, start=1):
            line = raw.strip()
            if not line or (line.startswith("#") and i > 1):
                continue
            yield i, line

    def magic(self) -> str:
        if not self.raw:
            raise InputError(f"{self.path}:1: empty file")
        return self.raw[0].strip()


def _parse_float(reader: _LineReader, lineno: int, token: str, what: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise reader.fail(lineno, f"bad {what}: {token!r}") from None


def _parse_int(reader: _LineReader, lineno: int, token: str, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise reader.fail(lineno, f"bad {what}: {token!r}") from None


# -- scalar fields on the sphere ---------------------------------------


def write_field(path: str, field: SphereField) -> None:
    """Store band limit plus the nonzero coefficients as (l, m, value)."""
    _ensure_dir(path)
    L = field.grid.band_limit
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(FIELD_MAGIC + "\n")
        fh.write(f"band_limit {L}\n")
        for l in range(L + 1):
            for m in range(-l, l + 1):
                v = field.coeffs[l * l + l + m]
                if v != 0.0:
                    fh.write(f"coeff {l} {m} {_fmt(v)}\n")


def read_field(path: str) -> SphereField:
    reader = _LineReader(path)
    if reader.magic() != FIELD_MAGIC:
        raise reader.fail(1, f"expected {FIELD_MAGIC!r}, got {reader.magic()!r}")
    band_limit = None
    entries = []
    for lineno, line in reader.lines():
        if line == FIELD_MAGIC:
            continue
        parts = line.split()
        if parts[0] == "band_limit" and len(parts) == 2:
            band_limit = _parse_int(reader, lineno, parts[1], "band limit")
        elif parts[0] == "coeff" and len(parts) == 4:
            l = _parse_int(reader, lineno, parts[1], "degree")
            m = _parse_int(reader, lineno, parts[2], "order")
            v = _parse_float(reader, lineno, parts[3], "coefficient")
            entries.append((lineno, l, m, v))
        else:
            raise reader.fail(lineno, f"unrecognized field line: {line!r}")
    if band_limit is None:
        raise reader.fail(1, "missing band_limit line")
    if band_limit < 0:
        raise reader.fail(1, f"band limit must be nonnegative, got {band_limit}")
    coeffs = np.zeros((band_limit + 1) ** 2)
    for lineno, l, m, v in entries:
        if not (0 <= l <= band_limit):
            raise reader.fail(lineno, f"degree {l} outside band limit {band_limit}")
        if abs(m) > l:
            raise reader.fail(lineno, f"order {m} invalid for degree {l}")
        coeffs[l * l + l + m] = v
    return SphereField(get_grid(band_limit), coeffs)


# -- planar curves ------------------------------------------------------


def write_curve(path: str, shape: CurveShape) -> None:
    """Store degree, base radius, sample count and nonzero trig coefficients."""
    _ensure_dir(path)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CURVE_MAGIC + "\n")
        fh.write(f"degree {shape.degree}\n")
        fh.write(f"base_radius {_fmt(shape.base_radius)}\n")
        fh.write(f"n_samples {shape.n_samples}\n")
        for k in range(shape.degree + 1):
            a = shape.cos_coeff(k)
            if a != 0.0:
                fh.write(f"cos {k} {_fmt(a)}\n")
            if k > 0:
                b = shape.sin_coeff(k)
                if b != 0.0:
                    fh.write(f"sin {k} {_fmt(b)}\n")


def read_curve(path: str) -> CurveShape:
    reader = _LineReader(path)
    if reader.magic() != CURVE_MAGIC:
        raise reader.fail(1, f"expected {CURVE_MAGIC!r}, got {reader.magic()!r}")
    header = {"degree": None, "base_radius": 1.0, "n_samples": None}
    entries = []
    for lineno, line in reader.lines():
        if line == CURVE_MAGIC:
            continue
        parts = line.split()
        if parts[0] == "degree" and len(parts) == 2:
            header["degree"] = _parse_int(reader, lineno, parts[1], "degree")
        elif parts[0] == "base_radius" and len(parts) == 2:
            header["base_radius"] = _parse_float(reader, lineno, parts[1], "base radius")
        elif parts[0] == "n_samples" and len(parts) == 2:
            header["n_samples"] = _parse_int(reader, lineno, parts[1], "sample count")
        elif parts[0] in ("cos", "sin") and len(parts) == 3:
            k = _parse_int(reader, lineno, parts[1], "mode index")
            v = _parse_float(reader, lineno, parts[2], "coefficient")
            entries.append((lineno, parts[0], k, v))
        else:
            raise reader.fail(lineno, f"unrecognized curve line: {line!r}")
    if header["degree"] is None:
        raise reader.fail(1, "missing degree line")
    degree = header["degree"]
    coeffs = np.zeros(2 * degree + 1)
    for lineno, kind, k, v in entries:
        if not 0 <= k <= degree:
            raise reader.fail(lineno, f"mode {k} outside degree {degree}")
        if kind == "sin" and k == 0:
            raise reader.fail(lineno, "sin 0 is not a coefficient")
        coeffs[0 if k == 0 else (2 * k - 1 if kind == "cos" else 2 * k)] = v
    kwargs = {}
    if header["n_samples"] is not None:
        kwargs["n_samples"] = header["n_samples"]
    return CurveShape(degree, coeffs, header["base_radius"], **kwargs)


# -- discretized sets ----------------------------------------------------


def write_set(path: str, ds: DiscretizedSet) -> None:
    """Store element rows; orientation columns are included when present."""
    _ensure_dir(path)
    d = ds.dimension
    orient = ds.normals if d == 3 else ds.tangents
    coord_cols = ["x", "y", "z"][:d]
    cols = coord_cols + ["measure", "diameter"]
    if orient is not None:
        cols += [("nu_" if d == 3 else "t_") + c for c in coord_cols]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(SET_MAGIC + "\n")
        fh.write(f"dimension {d}\n")
        fh.write(f"mode {ds.mode}\n")
        fh.write("columns " + " ".join(cols) + "\n")
        for i in range(ds.centroids.shape[0]):
            row = list(ds.centroids[i]) + [ds.measures[i], ds.diameters[i]]
            if orient is not None:
                row += list(orient[i])
            fh.write(" ".join(_fmt(v) for v in row) + "\n")


def read_set(path: str) -> DiscretizedSet:
    reader = _LineReader(path)
    if reader.magic() != SET_MAGIC:
        raise reader.fail(1, f"expected {SET_MAGIC!r}, got {reader.magic()!r}")
    dimension = mode = None
    n_cols = None
    has_orient = False
    rows = []
    for lineno, line in reader.lines():
        if line == SET_MAGIC:
            continue
        parts = line.split()
        if parts[0] == "dimension" and len(parts) == 2:
            dimension = _parse_int(reader, lineno, parts[1], "dimension")
            if dimension not in (2, 3):
                raise reader.fail(lineno, f"dimension must be 2 or 3, got {dimension}")
        elif parts[0] == "mode" and len(parts) == 2:
            mode = parts[1]
        elif parts[0] == "columns":
            if dimension is None:
                raise reader.fail(lineno, "columns line before dimension line")
            base = dimension + 2
            if len(parts) - 1 == base:
                has_orient = False
            elif len(parts) - 1 == base + dimension:
                has_orient = True
            else:
                raise reader.fail(
                    lineno,
                    f"expected {base} or {base + dimension} columns for "
                    f"dimension {dimension}, got {len(parts) - 1}",
                )
            n_cols = len(parts) - 1
        else:
            if n_cols is None:
                raise reader.fail(lineno, f"unrecognized set line: {line!r}")
            if len(parts) != n_cols:
                raise reader.fail(
                    lineno, f"expected {n_cols} values, got {len(parts)}"
                )
            rows.append(
                [_parse_float(reader, lineno, t, "element value") for t in parts]
            )
    if dimension is None or mode is None or n_cols is None:
        raise reader.fail(1, "missing dimension, mode or columns line")
    if not rows:
        raise reader.fail(len(reader.raw), "set file contains no elements")
    data = np.array(rows)
    centroids = data[:, :dimension]
    measures = data[:, dimension]
    diameters = data[:, dimension + 1]
    orient = data[:, dimension + 2 :] if has_orient else None
    return DiscretizedSet(
        dimension=dimension,
        mode=mode,
        centroids=centroids,
        measures=measures,
        diameters=diameters,
        normals=orient if dimension == 3 else None,
        tangents=orient if dimension == 2 else None,
        label=os.path.basename(path),
    )


def read_shape(path: str) -> SphereField | CurveShape:
    """Open a shape file of either kind, dispatching on the magic line."""
    magic = _LineReader(path).magic()
    if magic == FIELD_MAGIC:
        return read_field(path)
    if magic == CURVE_MAGIC:
        return read_curve(path)
    raise InputError(
        f"{path}:1: not a shape file (expected {FIELD_MAGIC!r} or "
        f"{CURVE_MAGIC!r}, got {magic!r})"
    )


# -- records and tables --------------------------------------------------


def write_json_record(path: str, record: dict) -> None:
    """One JSON object per file, keys sorted, trailing newline."""
    _ensure_dir(path)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json_record(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc


def write_csv(path: str, schema: str, header: list[str], rows) -> None:
    """CSV with a '# bendrop <schema>' comment line, then header, then rows.

    Floats are written with %.17g; other values with str().
    """
    _ensure_dir(path)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# bendrop {schema}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            cells = [
                _fmt(v) if isinstance(v, (float, np.floating)) else str(v)
                for v in row
            ]
            fh.write(",".join(cells) + "\n")


def read_csv(path: str) -> tuple[str, list[str], np.ndarray]:
    """Read a bendrop CSV: returns (schema, header, numeric array).

    Every cell must parse as a float (integer columns come back as float).
    """
    reader = _LineReader(path)
    magic = reader.magic()
    if not magic.startswith("# bendrop "):
        raise reader.fail(1, f"missing '# bendrop <schema>' comment, got {magic!r}")
    schema = magic[len("# bendrop ") :]
    header: list[str] | None = None
    rows = []
    for lineno, line in reader.lines():
        if line == magic:
            continue
        if header is None:
            header = line.split(",")
            continue
        parts = line.split(",")
        if len(parts) != len(header):
            raise reader.fail(
                lineno, f"expected {len(header)} cells, got {len(parts)}"
            )
        rows.append([_parse_float(reader, lineno, t, "cell") for t in parts])
    if header is None:
        raise reader.fail(1, "missing header row")
    data = np.array(rows) if rows else np.zeros((0, len(header)))
    return schema, header, data
