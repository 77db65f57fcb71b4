"""Tabular data sets, correlations, contingency tables and the data file format."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class DataError(ValueError):
    pass


class DataType(enum.Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"
    MIXED = "mixed"


@dataclass(frozen=True)
class Variable:
    name: str
    num_categories: int | None = None  # None for continuous

    def __post_init__(self):
        if self.num_categories is not None and self.num_categories < 2:
            raise DataError(f"{self.name}: a discrete variable needs >= 2 categories")

    @property
    def is_discrete(self) -> bool:
        return self.num_categories is not None

    @classmethod
    def continuous(cls, name: str) -> "Variable":
        return cls(name)

    @classmethod
    def discrete(cls, name: str, num_categories: int) -> "Variable":
        return cls(name, num_categories)


class DataSet:
    """N x p table of values over named, typed variables.

    Discrete cells hold category indices ``0..k-1``; they are stored in the
    same float array as continuous cells and read back as ints through
    :meth:`discrete_column`.
    """

    def __init__(self, variables: Sequence[Variable], values):
        values = np.array(values, dtype=float)
        if values.ndim != 2 or values.shape[1] != len(variables):
            raise DataError(
                f"values shape {values.shape} does not match {len(variables)} variables"
            )
        names = [v.name for v in variables]
        if len(set(names)) != len(names):
            raise DataError("variable names must be unique")
        for j, v in enumerate(variables):
            col = values[:, j]
            if not np.all(np.isfinite(col)):
                raise DataError(f"column {v.name!r} has missing or non-finite values")
            if v.is_discrete and col.size and (
                np.any(col != np.round(col)) or col.min() < 0 or col.max() >= v.num_categories
            ):
                raise DataError(
                    f"column {v.name!r} has values outside 0..{v.num_categories - 1}"
                )
        values.setflags(write=False)
        self._variables = list(variables)
        self._values = values
        self._index = {n: j for j, n in enumerate(names)}

    @classmethod
    def continuous(cls, names: Sequence[str], values) -> "DataSet":
        return cls([Variable(n) for n in names], values)

    @property
    def variables(self) -> list[Variable]:
        return list(self._variables)

    @property
    def names(self) -> list[str]:
        return [v.name for v in self._variables]

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def num_rows(self) -> int:
        return self._values.shape[0]

    @property
    def num_columns(self) -> int:
        return self._values.shape[1]

    @property
    def data_type(self) -> DataType:
        kinds = {v.is_discrete for v in self._variables}
        if kinds == {True}:
            return DataType.DISCRETE
        if kinds == {False}:
            return DataType.CONTINUOUS
        return DataType.MIXED

    def variable(self, name: str) -> Variable:
        return self._variables[self.column_index(name)]

    def column_index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise DataError(f"unknown variable {name!r}") from None

    def column(self, name: str) -> np.ndarray:
        return self._values[:, self.column_index(name)]

    def discrete_column(self, name: str) -> np.ndarray:
        if not self.variable(name).is_discrete:
            raise DataError(f"variable {name!r} is continuous")
        return self.column(name).astype(np.int64)

    def select(self, names: Sequence[str]) -> "DataSet":
        idx = [self.column_index(n) for n in names]
        return DataSet([self._variables[j] for j in idx], self._values[:, idx])

    def __eq__(self, other):
        if not isinstance(other, DataSet):
            return NotImplemented
        return self._variables == other._variables and np.array_equal(
            self._values, other._values
        )

    def __repr__(self):
        return f"DataSet({self.num_rows} rows, {self.names})"


@dataclass(frozen=True)
class CorrelationMatrix:
    names: list[str]
    values: np.ndarray
    sample_size: int
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(self.names)})

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise DataError(f"unknown variable {name!r}") from None

    def __getitem__(self, pair):
        x, y = pair
        return self.values[self.index(x), self.index(y)]


def correlation_matrix(data: DataSet) -> CorrelationMatrix:
    """Pearson correlations of an all-continuous data set."""
    for v in data.variables:
        if v.is_discrete:
            raise DataError(f"variable {v.name!r} is discrete")
    n = data.num_rows
    if n < 2:
        raise DataError("need at least 2 rows")
    x = data.values - data.values.mean(axis=0)
    ss = np.einsum("ij,ij->j", x, x)
    for name, s in zip(data.names, ss):
        if s == 0:
            raise DataError(f"variable {name!r} has zero variance")
    sd = np.sqrt(ss)
    r = (x.T @ x) / np.outer(sd, sd)
    r = (r + r.T) / 2
    np.clip(r, -1.0, 1.0, out=r)
    np.fill_diagonal(r, 1.0)
    r.setflags(write=False)
    return CorrelationMatrix(data.names, r, n)


_COND_LIMIT = 1e12


def partial_correlation(c: CorrelationMatrix, x: str, y: str, z: Iterable[str] = ()) -> float:
    """Partial correlation of ``x`` and ``y`` given ``z`` from a correlation matrix.

    Computed from the inverse of the correlation submatrix over
    ``{x, y} + z``.  Raises DataError when that submatrix is singular
    (condition number above 1e12).
    """
    z = list(z)
    if x == y or x in z or y in z:
        raise DataError("x, y and the conditioning set must be disjoint")
    if not z:
        return float(c[x, y])
    # canonical order so the result does not depend on argument order
    a, b = sorted((x, y))
    idx = [c.index(a), c.index(b)] + [c.index(v) for v in sorted(z)]
    sub = c.values[np.ix_(idx, idx)]
    if np.linalg.cond(sub) > _COND_LIMIT:
        raise DataError(f"singular conditioning set for {x}, {y} | {z}")
    prec = np.linalg.inv(sub)
    r = -prec[0, 1] / np.sqrt(prec[0, 0] * prec[1, 1])
    return float(np.clip(r, -1.0, 1.0))


def cross_tabulate(data: DataSet, x: str, y: str, z: Sequence[str] = ()):
    """Contingency tables of ``x`` by ``y``, one per observed value of ``z``.

    Returns a list of ``(stratum_key, table)`` pairs ordered by key, where
    ``table`` has shape ``(categories of x, categories of y)``.
    """
    vars_ = [data.variable(n) for n in (x, y, *z)]
    for v in vars_:
        if not v.is_discrete:
            raise DataError(f"variable {v.name!r} is continuous")
    kx, ky = vars_[0].num_categories, vars_[1].num_categories
    cx = data.discrete_column(x)
    cy = data.discrete_column(y)
    if not z:
        table = np.zeros((kx, ky), dtype=np.int64)
        np.add.at(table, (cx, cy), 1)
        return [((), table)]
    zcols = np.column_stack([data.discrete_column(n) for n in z])
    keys, inverse = np.unique(zcols, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    tables = np.zeros((len(keys), kx, ky), dtype=np.int64)
    np.add.at(tables, (inverse, cx, cy), 1)
    return [(tuple(int(v) for v in key), tables[s]) for s, key in enumerate(keys)]


# -- file format ----------------------------------------------------------------

_MAX_DISCRETE_LEVELS = 50


def _fmt(value: float, discrete: bool) -> str:
    if discrete:
        return str(int(value))
    return repr(float(value))


def save_tabular(data: DataSet) -> str:
    """Tab-delimited text with a header row of variable names."""
    flags = [v.is_discrete for v in data.variables]
    lines = ["\t".join(data.names)]
    for row in data.values:
        lines.append("\t".join(_fmt(v, d) for v, d in zip(row, flags)))
    return "\n".join(lines) + "\n"


def _is_category(cell: str) -> bool:
    return cell.isdigit()


def load_tabular(text: str, declared_types: dict | Sequence[Variable] | None = None) -> DataSet:
    """Parse tab-delimited text produced by :func:`save_tabular`.

    ``declared_types`` may be a list of Variables (one per column) or a dict
    mapping names to a category count (``None`` for continuous).  Without it,
    a column is discrete when every cell is a non-negative integer and it has
    at most 50 distinct values.
    """
    lines = text.replace("\r\n", "\n").split("\n")
    while lines and lines[-1] == "":
        lines.pop()
    if not lines or not lines[0].strip():
        raise DataError("missing header row")
    names = lines[0].split("\t")
    cells = []
    for i, ln in enumerate(lines[1:], start=2):
        row = ln.split("\t")
        if len(row) != len(names):
            raise DataError(f"row {i} has {len(row)} fields, expected {len(names)}")
        cells.append(row)
    values = np.empty((len(cells), len(names)))
    for i, row in enumerate(cells):
        for j, cell in enumerate(row):
            try:
                values[i, j] = float(cell)
            except ValueError:
                raise DataError(
                    f"row {i + 2}, column {names[j]!r}: cannot parse {cell!r}"
                ) from None

    if isinstance(declared_types, dict):
        variables = [
            Variable(n, declared_types[n]) if n in declared_types else _infer(n, values[:, j], cells, j)
            for j, n in enumerate(names)
        ]
    elif declared_types is not None:
        variables = list(declared_types)
        if [v.name for v in variables] != names:
            raise DataError("declared variables do not match the header")
    else:
        variables = [_infer(n, values[:, j], cells, j) for j, n in enumerate(names)]
    return DataSet(variables, values)


def _infer(name, col, cells, j) -> Variable:
    if col.size and all(_is_category(row[j]) for row in cells):
        levels = np.unique(col)
        if len(levels) <= _MAX_DISCRETE_LEVELS:
            return Variable(name, max(2, int(levels.max()) + 1))
    return Variable(name)

