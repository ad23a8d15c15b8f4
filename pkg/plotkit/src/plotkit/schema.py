"""CSV schema contracts for the simulator's result files.

Each figure kind consumes exactly one producer schema; anything else is
rejected up front with the offending column named.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

SCHEMAS: dict[str, tuple[str, ...]] = {
    "cosine": ("phi", "ratio", "fit"),
    "gain-sweep": ("g", "e_model", "e_mc", "e_mc_sigma", "e_cl", "q"),
    "contour": ("n_sig", "n_noise", "q"),
    "curves": ("n_sig", "nth_s", "q", "e_model", "g_opt"),
}


class SchemaError(ValueError):
    """Input table does not match the figure kind's column contract."""


def read_table(path: str | Path, kind: str) -> dict[str, np.ndarray]:
    """Load a result CSV and validate it against the kind's schema."""
    if kind not in SCHEMAS:
        raise SchemaError(f"unknown figure kind: {kind}")
    expected = SCHEMAS[kind]
    text = Path(path).read_text()
    lines = [line for line in text.splitlines() if line.strip() and not line.startswith("#")]
    if not lines:
        raise SchemaError("empty table: no header row")
    header = [c.strip() for c in lines[0].split(",")]
    for col in expected:
        if col not in header:
            raise SchemaError(f"missing column '{col}' for kind {kind}")
    for col in header:
        if col not in expected:
            raise SchemaError(f"unexpected column '{col}' for kind {kind}")
    if len(lines) == 1:
        raise SchemaError("empty table: header but no rows")

    columns: dict[str, list[float]] = {c: [] for c in header}
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(header):
            raise SchemaError(f"row {lineno} has {len(cells)} cells, expected {len(header)}")
        for col, cell in zip(header, cells):
            try:
                columns[col].append(float(cell))
            except ValueError as exc:
                raise SchemaError(f"column '{col}' holds non-numeric value {cell!r}") from exc
    return {c: np.asarray(v) for c, v in columns.items()}
