"""Numeric dataset container and CSV ingestion.

A :class:`Dataset` is an immutable n x d matrix of finite reals with unique
column names. Every other module consumes datasets through this type, so
validation happens exactly once, at construction.

CSV dialect: comma separator, "." decimal point, optional single header row,
no quoting. Missing or non-numeric cells are rejected outright.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np


class DataError(ValueError):
    """Raised for malformed input data or invalid column selections."""


def default_names(d: int) -> tuple[str, ...]:
    """Generated column names X1..Xd used when a file has no header."""
    return tuple(f"X{i + 1}" for i in range(d))


@dataclass(frozen=True)
class Dataset:
    """Immutable numeric data matrix with named columns.

    Attributes
    ----------
    values : np.ndarray
        Read-only (n, d) float64 array, all entries finite.
    col_names : tuple of str
        d distinct column labels; column i is addressed by col_names[i].
    """

    values: np.ndarray
    col_names: tuple[str, ...]

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 2:
            raise DataError(f"expected a 2-d matrix, got ndim={arr.ndim}")
        n, d = arr.shape
        if n < 1 or d < 1:
            raise DataError(f"empty dataset: shape {arr.shape}")
        if not np.isfinite(arr).all():
            i, j = np.argwhere(~np.isfinite(arr))[0]
            raise DataError(f"non-finite value at row {i + 1}, column {j + 1}")
        names = tuple(str(c) for c in self.col_names)
        if len(names) != d:
            raise DataError(f"{len(names)} column names for {d} columns")
        if len(set(names)) != d:
            raise DataError("column names are not unique")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "col_names", names)

    @classmethod
    def from_array(cls, values, col_names=None) -> "Dataset":
        """Build a dataset from any array-like, generating names if absent."""
        arr = np.atleast_2d(np.asarray(values, dtype=float))
        if col_names is None:
            col_names = default_names(arr.shape[1])
        return cls(arr, tuple(col_names))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def column(self, i: int) -> np.ndarray:
        return self.values[:, i]

    def name_to_index(self, name: str) -> int:
        try:
            return self.col_names.index(name)
        except ValueError:
            raise DataError(f"unknown column name {name!r}") from None


@dataclass(frozen=True)
class VariableSet:
    """Ordered set of distinct column indices into a dataset.

    Order records selection history: first-selected first. Use
    :func:`variable_set` to validate indices against a dimension.
    """

    indices: tuple[int, ...]

    def __post_init__(self) -> None:
        idx = tuple(int(i) for i in self.indices)
        if len(set(idx)) != len(idx):
            raise DataError(f"duplicate indices in variable set: {idx}")
        if any(i < 0 for i in idx):
            raise DataError(f"negative index in variable set: {idx}")
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, i) -> bool:
        return i in self.indices

    def names(self, data: Dataset) -> tuple[str, ...]:
        return tuple(data.col_names[i] for i in self.indices)


def variable_set(indices, d: int) -> VariableSet:
    """Validated variable set: distinct indices, each in [0, d)."""
    vs = VariableSet(tuple(indices))
    for i in vs.indices:
        if i >= d:
            raise DataError(f"column index {i} out of range for d={d}")
    return vs


_MISSING_TOKENS = {"", "na", "n/a", "nan", "nan.", "null", "none", "."}


def _parse_cell(cell: str, row: int, col: int) -> float:
    text = cell.strip()
    if text.lower() in _MISSING_TOKENS:
        raise DataError(
            f"missing value {cell!r} at row {row}, column {col}: "
            "missing data are not allowed"
        )
    try:
        value = float(text)
    except ValueError:
        raise DataError(
            f"non-numeric value {cell!r} at row {row}, column {col}: "
            "categorical variables are not allowed"
        ) from None
    if not np.isfinite(value):
        raise DataError(f"non-finite value {cell!r} at row {row}, column {col}")
    return value


def _looks_like_header(row: list[str]) -> bool:
    for cell in row:
        try:
            float(cell)
        except ValueError:
            return True
    return False


def read_csv(path, header: bool | None = None) -> Dataset:
    """Read a numeric CSV file into a :class:`Dataset`.

    Parameters
    ----------
    path : str or Path
        File to read.
    header : bool, optional
        True if the first row holds column names, False if not. The
        default sniffs: a first row with any non-numeric cell is a header.

    Body cells must all parse as finite reals; any missing or categorical
    cell is a hard error reporting its row and column (1-based, counting
    data rows only).
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise DataError(f"{path}: empty file")
    if header is None:
        header = _looks_like_header(rows[0])
    if header:
        names = tuple(c.strip() for c in rows[0])
        body = rows[1:]
    else:
        names = default_names(len(rows[0]))
        body = rows
    if not body:
        raise DataError(f"{path}: no data rows")
    d = len(names)
    values = np.empty((len(body), d))
    for i, row in enumerate(body):
        if len(row) != d:
            raise DataError(
                f"{path}: row {i + 1} has {len(row)} cells, expected {d}"
            )
        for j, cell in enumerate(row):
            values[i, j] = _parse_cell(cell, i + 1, j + 1)
    return Dataset(values, names)


def write_csv(data: Dataset, path) -> None:
    """Write a dataset as CSV with a header row.

    Values use repr-style formatting so read_csv(write_csv(x)) round-trips
    exactly on names and to full float precision on values.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(data.col_names)
        for row in data.values:
            writer.writerow([format(v, ".17g") for v in row])


def subset_columns(data: Dataset, vars: VariableSet | tuple[int, ...]) -> Dataset:
    """New dataset holding the given columns, in the given order."""
    if not isinstance(vars, VariableSet):
        vars = VariableSet(tuple(vars))
    if len(vars) == 0:
        raise DataError("empty column selection is not a dataset")
    for i in vars:
        if i >= data.d:
            raise DataError(f"column index {i} out of range for d={data.d}")
    sub = Dataset.__new__(Dataset)
    values = data.values[:, list(vars.indices)]
    values.setflags(write=False)
    object.__setattr__(sub, "values", values)
    object.__setattr__(sub, "col_names", tuple(data.col_names[i] for i in vars))
    return sub


def subsample_rows(data: Dataset, size: int, seed: int = 0) -> np.ndarray:
    """Draw `size` distinct row indices uniformly without replacement.

    Deterministic for a fixed seed: uses numpy's PCG64 generator, whose
    streams are reproducible across platforms. Returned indices are sorted
    ascending.
    """
    n = data.n
    if not 1 <= size <= n:
        raise DataError(f"sample size {size} out of range [1, {n}]")
    rng = np.random.default_rng(seed)
    idx = rng.choice(n, size=size, replace=False)
    idx.sort()
    return idx
