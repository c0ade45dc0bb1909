"""Year-indexed data frame shared by the reduction, sampling, and CLI
layers, plus CSV ingestion with one file per column role.

Missing values are NaN cells; every column shares the frame's year
axis.  Columns carry a role ("proxy" | "temperature" | "forcing") and an
optional transform flag applied before standardization or model entry.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DataError, DegenerateInputError

__all__ = [
    "ROLES",
    "TRANSFORMS",
    "TimeSeriesFrame",
    "apply_transform",
    "read_role_csv",
    "merge_frames",
    "write_csv",
]

ROLES = ("proxy", "temperature", "forcing")

# identity; log(x); log(1 - x) for series bounded above by 1 (e.g.
# nonpositive volcanic forcing)
TRANSFORMS = ("identity", "log", "log1p_neg")


def apply_transform(values: np.ndarray, transform: str) -> np.ndarray:
    """Apply a per-series transform, NaN cells passing through."""
    values = np.asarray(values, dtype=float)
    if transform == "identity":
        return values.copy()
    present = np.isfinite(values)
    out = np.full(values.shape, np.nan)
    if transform == "log":
        if np.any(values[present] <= 0.0):
            raise DataError("log transform requires strictly positive values")
        out[present] = np.log(values[present])
        return out
    if transform == "log1p_neg":
        if np.any(values[present] >= 1.0):
            raise DataError("log1p_neg transform requires values below 1")
        out[present] = np.log1p(-values[present])
        return out
    raise ConfigurationError(f"unknown transform {transform!r}; expected {TRANSFORMS}")


@dataclass
class TimeSeriesFrame:
    """Columns of annual data over a common strictly increasing year axis."""

    years: np.ndarray
    columns: dict[str, np.ndarray] = field(default_factory=dict)
    roles: dict[str, str] = field(default_factory=dict)
    transforms: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.years = np.asarray(self.years, dtype=int)
        if self.years.ndim != 1 or self.years.size == 0:
            raise DataError("year axis must be a non-empty 1-D integer array")
        if np.any(np.diff(self.years) <= 0):
            raise DataError("years must be strictly increasing")
        for name in list(self.columns):
            col = np.asarray(self.columns[name], dtype=float)
            if col.shape != self.years.shape:
                raise DataError(
                    f"column {name!r} has length {col.size}, year axis {self.years.size}"
                )
            if not np.any(np.isfinite(col)):
                raise DegenerateInputError(f"column {name!r} has no observed values")
            self.columns[name] = col
            role = self.roles.get(name, "proxy")
            if role not in ROLES:
                raise ConfigurationError(f"column {name!r} has unknown role {role!r}")
            self.roles[name] = role
            transform = self.transforms.get(name, "identity")
            if transform not in TRANSFORMS:
                raise ConfigurationError(
                    f"column {name!r} has unknown transform {transform!r}"
                )
            self.transforms[name] = transform

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise DataError(f"no column named {name!r}")
        return self.columns[name]

    def present(self, name: str) -> np.ndarray:
        """Boolean mask of observed (non-NaN) cells."""
        return np.isfinite(self.column(name))

    def names(self, role: str | None = None) -> list[str]:
        if role is None:
            return list(self.columns)
        return [n for n in self.columns if self.roles[n] == role]

    def window_mask(self, window: tuple[int, int] | None) -> np.ndarray:
        """Mask of years inside the inclusive (start, end) window."""
        if window is None:
            return np.ones(self.years.size, dtype=bool)
        lo, hi = window
        if lo > hi:
            raise ConfigurationError(f"window start {lo} exceeds end {hi}")
        return (self.years >= lo) & (self.years <= hi)

    def transformed(self, name: str) -> np.ndarray:
        """Column values with the declared per-series transform applied."""
        return apply_transform(self.column(name), self.transforms[name])

    def with_column(
        self,
        name: str,
        values: np.ndarray,
        role: str = "proxy",
        transform: str = "identity",
    ) -> "TimeSeriesFrame":
        columns = dict(self.columns)
        roles = dict(self.roles)
        transforms = dict(self.transforms)
        columns[name] = np.asarray(values, dtype=float)
        roles[name] = role
        transforms[name] = transform
        return TimeSeriesFrame(self.years.copy(), columns, roles, transforms)


def read_role_csv(path, role: str, transforms: dict[str, str] | None = None) -> TimeSeriesFrame:
    """Read one CSV of columns sharing a role.

    Expected layout: header row starting with ``year``, then one column
    per series; missing values are empty cells.
    """
    if role not in ROLES:
        raise ConfigurationError(f"unknown role {role!r}; expected one of {ROLES}")
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if not header or header[0].strip().lower() != "year":
            raise DataError(f"{path}: first column must be 'year'")
        names = [h.strip() for h in header[1:]]
        if len(set(names)) != len(names) or any(not n for n in names):
            raise DataError(f"{path}: column names must be unique and non-empty")
        years: list[int] = []
        rows: list[list[float]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(names) + 1:
                raise DataError(
                    f"{path}:{lineno}: expected {len(names) + 1} cells, got {len(row)}"
                )
            try:
                years.append(int(row[0]))
            except ValueError:
                raise DataError(f"{path}:{lineno}: year {row[0]!r} is not an integer") from None
            values = []
            for name, cell in zip(names, row[1:]):
                cell = cell.strip()
                if not cell:
                    values.append(np.nan)
                    continue
                try:
                    values.append(float(cell))
                except ValueError:
                    raise DataError(
                        f"{path}:{lineno}: cell {cell!r} in column {name!r} is not numeric"
                    ) from None
            rows.append(values)
    if not rows:
        raise DataError(f"{path}: no data rows")
    year_arr = np.asarray(years, dtype=int)
    order = np.argsort(year_arr, kind="stable")
    year_arr = year_arr[order]
    if np.any(np.diff(year_arr) == 0):
        raise DataError(f"{path}: duplicate years present")
    data = np.asarray(rows, dtype=float)[order]
    transforms = transforms or {}
    return TimeSeriesFrame(
        years=year_arr,
        columns={name: data[:, i] for i, name in enumerate(names)},
        roles={name: role for name in names},
        transforms={name: transforms.get(name, "identity") for name in names},
    )


def merge_frames(frames: list[TimeSeriesFrame]) -> TimeSeriesFrame:
    """Outer-join frames on the year axis; names must not collide."""
    if not frames:
        raise DataError("no frames to merge")
    years = frames[0].years
    for fr in frames[1:]:
        years = np.union1d(years, fr.years)
    columns: dict[str, np.ndarray] = {}
    roles: dict[str, str] = {}
    transforms: dict[str, str] = {}
    for fr in frames:
        idx = np.searchsorted(years, fr.years)
        for name in fr.columns:
            if name in columns:
                raise DataError(f"column {name!r} appears in more than one input")
            col = np.full(years.size, np.nan)
            col[idx] = fr.columns[name]
            columns[name] = col
            roles[name] = fr.roles[name]
            transforms[name] = fr.transforms[name]
    return TimeSeriesFrame(years, columns, roles, transforms)


def write_csv(path, years: np.ndarray, columns: dict[str, np.ndarray]) -> None:
    """Write a year-indexed CSV; NaN cells become empty cells."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["year", *columns.keys()])
        for i, year in enumerate(years):
            row: list[str] = [str(int(year))]
            for col in columns.values():
                v = col[i]
                row.append("" if not np.isfinite(v) else format(float(v), ".17g"))
            writer.writerow(row)
