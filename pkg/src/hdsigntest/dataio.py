"""Reading and writing observation matrices as CSV.

One observation per row, comma-separated decimals.  A single header line
is tolerated on input and detected by a non-numeric first row.  Output
uses repr serialization (17 significant digits), so a written matrix
reads back bit-exactly.
"""

from __future__ import annotations

import numpy as np

from .errors import DataFileError
from .statistics import as_matrix


def parse_matrix_csv(text: str, source: str = "input") -> np.ndarray:
    """Parse CSV text into an observation matrix.

    Errors carry 1-based row/column context, counted after any header.
    """
    lines = [line for line in text.splitlines() if line.strip() != ""]
    if not lines:
        raise DataFileError(f"{source}: file contains no data rows")

    def parse_row(line):
        return [cell.strip() for cell in line.split(",")]

    first = parse_row(lines[0])
    start = 0
    try:
        [float(cell) for cell in first]
    except ValueError:
        start = 1
        if len(lines) == 1:
            raise DataFileError(f"{source}: only a header line, no data rows")

    rows = []
    width = None
    for offset, line in enumerate(lines[start:]):
        rownum = offset + 1
        cells = parse_row(line)
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise DataFileError(
                f"{source}: row {rownum}: expected {width} fields, found {len(cells)}"
            )
        values = []
        for colnum, cell in enumerate(cells, start=1):
            try:
                values.append(float(cell))
            except ValueError:
                raise DataFileError(
                    f"{source}: row {rownum}, column {colnum}: "
                    f"non-numeric value {cell!r}"
                ) from None
        rows.append(values)
    matrix = np.array(rows, dtype=float)
    if not np.isfinite(matrix).all():
        bad = np.argwhere(~np.isfinite(matrix))[0]
        raise DataFileError(
            f"{source}: row {int(bad[0]) + 1}, column {int(bad[1]) + 1}: "
            "non-finite value"
        )
    return matrix


def read_matrix_csv(path) -> np.ndarray:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise DataFileError(f"cannot read {path}: {exc}") from exc
    return parse_matrix_csv(text, source=str(path))


def matrix_to_csv(matrix) -> str:
    matrix = as_matrix(matrix)
    return "\n".join(",".join(repr(float(v)) for v in row) for row in matrix) + "\n"


def write_matrix_csv(matrix, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(matrix_to_csv(matrix))
