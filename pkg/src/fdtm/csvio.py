"""CSV readers/writers for clouds, measures, graphs, geodesics and experiments.

All floats are printed with 17 significant digits so that float64 values
round-trip exactly. Data files carry no header; comment lines start with '#'.
"""

from __future__ import annotations

import numpy as np

from fdtm.errors import CsvFormatError


def fmt(x: float) -> str:
    """Format a float with 17 significant digits."""
    return format(float(x), ".17g")


def _parse_rows(path: str, expected_cols: int | None = None) -> np.ndarray:
    """Read numeric CSV rows, skipping '#' comments and blank lines.

    Raises CsvFormatError with the 1-based row number on the first malformed
    row (wrong arity or a non-numeric field).
    """
    rows: list[list[float]] = []
    ncols = expected_cols
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            fields = [f.strip() for f in text.split(",")]
            if ncols is None:
                ncols = len(fields)
            if len(fields) != ncols:
                raise CsvFormatError(
                    f"{path}: expected {ncols} fields, found {len(fields)}",
                    row=lineno,
                )
            try:
                rows.append([float(f) for f in fields])
            except ValueError:
                raise CsvFormatError(f"{path}: non-numeric field", row=lineno)
    if not rows:
        return np.empty((0, ncols or 0))
    return np.asarray(rows, dtype=np.float64)


def write_cloud(path: str, points: np.ndarray) -> None:
    points = np.asarray(points, dtype=np.float64)
    with open(path, "w", encoding="utf-8") as fh:
        for row in points:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def read_cloud(path: str) -> np.ndarray:
    data = _parse_rows(path)
    if data.size == 0:
        raise CsvFormatError(f"{path}: no data rows")
    return data


def write_measure(path: str, points: np.ndarray, masses: np.ndarray) -> None:
    points = np.asarray(points, dtype=np.float64)
    masses = np.asarray(masses, dtype=np.float64)
    with open(path, "w", encoding="utf-8") as fh:
        for row, w in zip(points, masses):
            fh.write(",".join(fmt(v) for v in row) + "," + fmt(w) + "\n")


def read_measure(path: str) -> tuple[np.ndarray, np.ndarray]:
    data = _parse_rows(path)
    if data.size == 0 or data.shape[1] < 2:
        raise CsvFormatError(f"{path}: expected coordinates plus a mass column")
    return data[:, :-1], data[:, -1]


def write_graph(path: str, edge_i: np.ndarray, edge_j: np.ndarray, weights: np.ndarray) -> None:
    """Rows `i,j,weight` with vertex indices in input-cloud order."""
    with open(path, "w", encoding="utf-8") as fh:
        for i, j, w in zip(edge_i, edge_j, weights):
            fh.write(f"{int(i)},{int(j)},{fmt(w)}\n")


def write_geodesic(path: str, distance: float, polyline: np.ndarray) -> None:
    """Polyline rows preceded by a `# distance=<value>` comment line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# distance={fmt(distance)}\n")
        for row in np.asarray(polyline, dtype=np.float64):
            fh.write(",".join(fmt(v) for v in row) + "\n")


def write_table(path: str, metadata: dict, columns: list[str], rows: list[tuple]) -> None:
    """Experiment CSV: '#'-prefixed metadata header, then plain data rows."""
    with open(path, "w", encoding="utf-8") as fh:
        for key, value in metadata.items():
            fh.write(f"# {key}={value}\n")
        fh.write("# columns=" + ",".join(columns) + "\n")
        for row in rows:
            fields = [fmt(v) if isinstance(v, float) else str(v) for v in row]
            fh.write(",".join(fields) + "\n")
