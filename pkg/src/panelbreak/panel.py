"""Core data model for panel observations.

A panel is an N x T matrix: N parallel series ("panels"), each observed at
T common time points. All public contracts use 1-based time indices t=1..T.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray


class PanelError(Exception):
    """Base class for panel-data errors."""


class PanelFormatError(PanelError):
    """Malformed input file (ragged rows, non-numeric cells)."""


class PanelDimensionError(PanelError):
    """Panel dimensions violate N >= 1, T >= 3."""


@dataclass(frozen=True)
class PanelMatrix:
    """Immutable N x T observation matrix, row i = panel i, column t = time t."""

    values: NDArray[np.float64]

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 2:
            raise PanelDimensionError(f"expected a 2-d array, got ndim={arr.ndim}")
        n, t = arr.shape
        if n < 1:
            raise PanelDimensionError(f"need at least one panel, got N={n}")
        if t < 3:
            raise PanelDimensionError(
                f"need at least T=3 time points for a non-degenerate grid, got T={t}"
            )
        if not np.all(np.isfinite(arr)):
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise PanelFormatError(
                f"non-finite value at panel {bad[0] + 1}, time {bad[1] + 1}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n_panels(self) -> int:
        return self.values.shape[0]

    @property
    def n_time(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class BreakSpec:
    """A mean shift of size deltas[i] in panel i after time floor(theta*T)."""

    theta: float
    deltas: NDArray[np.float64] = field(repr=False)

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError(f"theta must lie in (0,1), got {self.theta}")
        d = np.atleast_1d(np.asarray(self.deltas, dtype=np.float64))
        d.setflags(write=False)
        object.__setattr__(self, "deltas", d)

    def change_time(self, t: int) -> int:
        """The break time t0 = floor(theta*T), 1-based."""
        t0 = int(np.floor(self.theta * t))
        if not 1 <= t0 <= t - 1:
            raise ValueError(f"change time t0={t0} outside 1..{t - 1} for T={t}")
        return t0

    @property
    def is_null(self) -> bool:
        """True iff no panel changes (sum of squared deltas is zero)."""
        return float(np.sum(self.deltas**2)) == 0.0


def _parse_rows(text: str) -> list[list[float]]:
    """Parse delimiter-separated numeric text, skipping a non-numeric header."""
    rows: list[list[float]] = []
    width = None
    reader = csv.reader(io.StringIO(text))
    for lineno, record in enumerate(reader, start=1):
        cells = [c.strip() for c in record if c.strip() != ""]
        if not cells:
            continue
        try:
            parsed = [float(c) for c in cells]
        except ValueError:
            if lineno == 1 and not rows:
                continue  # header row
            raise PanelFormatError(f"non-numeric cell on line {lineno}") from None
        if width is None:
            width = len(parsed)
        elif len(parsed) != width:
            raise PanelFormatError(
                f"ragged row on line {lineno}: expected {width} cells, got {len(parsed)}"
            )
        rows.append(parsed)
    if not rows:
        raise PanelFormatError("no numeric data found")
    return rows


def load_panel(path, layout: str = "panels-as-rows") -> PanelMatrix:
    """Read a CSV file of panel observations.

    ``layout`` selects whether file rows are panels ("panels-as-rows") or
    time points ("panels-as-columns"). An optional non-numeric header row
    is skipped.
    """
    if layout not in ("panels-as-rows", "panels-as-columns"):
        raise ValueError(f"unknown layout {layout!r}")
    with open(path, "r", encoding="utf-8") as fh:
        rows = _parse_rows(fh.read())
    arr = np.array(rows, dtype=np.float64)
    if layout == "panels-as-columns":
        arr = arr.T
    return PanelMatrix(arr)


def save_panel(p: PanelMatrix, path, layout: str = "panels-as-rows") -> None:
    """Write a panel back to CSV (inverse of load_panel for the same layout)."""
    arr = p.values if layout == "panels-as-rows" else p.values.T
    np.savetxt(path, arr, delimiter=",", fmt="%.17g")


def column_means(p: PanelMatrix) -> NDArray[np.float64]:
    """Per-panel time averages: entry i is the mean of panel i over t=1..T."""
    return p.values.mean(axis=1)
