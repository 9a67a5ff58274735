"""Dataset ingestion, data-role inference, and filter application.

The data model is a single flat table: named columns over atomic cells.
Roles (Measure, Dimension, Time) are heuristic guesses that callers can
override per column.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field, replace

from . import canonical
from .errors import (
    DatasetTooLargeError,
    EmptyDatasetError,
    NonFlatJsonError,
    RaggedCsvError,
    UnknownColumnError,
)
from .model import (
    DataRole,
    Filter,
    JsonAtomic,
    OneOfFilter,
    RangeFilter,
    is_atomic,
)
from .predicate import equal_values

Row = dict[str, JsonAtomic]


@dataclass(frozen=True)
class Column:
    name: str
    role: DataRole
    role_overridden: bool = False


@dataclass(frozen=True)
class Dataset:
    columns: tuple[Column, ...]
    rows: list[Row] = field(default_factory=list)

    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise UnknownColumnError(f"no column named {name!r}")

    def with_role(self, name: str, role: DataRole) -> "Dataset":
        """Override one column's inferred role."""
        self.column(name)
        columns = tuple(
            replace(c, role=role, role_overridden=True) if c.name == name else c
            for c in self.columns
        )
        return Dataset(columns, self.rows)

    def query(self) -> list[tuple[str, DataRole]]:
        """The (name, role) pairs used for catalog matching."""
        return [(c.name, c.role) for c in self.columns]


# Full calendar date, optionally with a time part (space or T separator,
# seconds/fraction/offset optional).
_ISO_DATE = re.compile(
    r"^\d{4}-\d{2}-\d{2}"
    r"([T ]\d{2}:\d{2}(:\d{2}(\.\d+)?)?(Z|[+-]\d{2}:?\d{2})?)?$"
)
_YEAR = re.compile(r"^\d{4}$")


def infer_role(values: list[JsonAtomic]) -> DataRole:
    """Guess a column's role from its values.

    All-numeric columns are Measure even when the numbers look like years;
    string columns are Time when every value is an ISO-8601 date/datetime or
    a bare 4-digit year, or when at least 90% are full dates (tolerating a
    little junk); everything else is Dimension.
    """
    present = [v for v in values if v is not None]
    if not present:
        return DataRole.DIMENSION
    if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in present):
        return DataRole.MEASURE
    if all(isinstance(v, str) for v in present):
        if all(_ISO_DATE.match(v) or _YEAR.match(v) for v in present):
            return DataRole.TIME
        full_dates = sum(1 for v in present if _ISO_DATE.match(v))
        if full_dates >= 0.9 * len(present):
            return DataRole.TIME
    return DataRole.DIMENSION


def _parse_number(text: str) -> int | float | None:
    try:
        return int(text)
    except ValueError:
        pass
    try:
        value = float(text)
    except ValueError:
        return None
    # inf/nan spellings are text, not numbers, in a data file
    if value != value or value in (float("inf"), float("-inf")):
        return None
    return value


def _finish(names: list[str], rows: list[Row]) -> Dataset:
    if not rows:
        raise EmptyDatasetError("dataset has no rows")
    columns = tuple(
        Column(name, infer_role([row.get(name) for row in rows])) for name in names
    )
    return Dataset(columns, rows)


def _load_csv(text: str) -> Dataset:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyDatasetError("CSV input is empty") from None

    raw_rows: list[list[str]] = []
    for line_no, record in enumerate(reader, start=2):
        if not record:
            continue
        if len(record) != len(header):
            raise RaggedCsvError(
                f"line {line_no}: expected {len(header)} cells, got {len(record)}"
            )
        raw_rows.append(record)
    if not raw_rows:
        raise EmptyDatasetError("CSV has a header but no rows")

    # Uniform parse per column: numbers only when every nonempty cell parses.
    typed_columns: list[list[JsonAtomic]] = []
    for index in range(len(header)):
        cells = [record[index] for record in raw_rows]
        numbers = [_parse_number(c) if c != "" else None for c in cells]
        if all(n is not None for c, n in zip(cells, numbers) if c != ""):
            typed_columns.append(numbers)
        else:
            typed_columns.append([c if c != "" else None for c in cells])

    rows = [
        {name: typed_columns[i][r] for i, name in enumerate(header)}
        for r in range(len(raw_rows))
    ]
    return _finish(header, rows)


def _load_json_array(text: str) -> Dataset:
    value = canonical.loads(text)
    if not isinstance(value, list):
        raise NonFlatJsonError("expected a JSON array of flat objects")
    names: list[str] = []
    rows: list[Row] = []
    for index, item in enumerate(value):
        if not isinstance(item, dict):
            raise NonFlatJsonError(f"row {index} is not an object")
        for key, cell in item.items():
            if not is_atomic(cell):
                raise NonFlatJsonError(f"row {index}, column {key!r}: nested value")
            if key not in names:
                names.append(key)
        rows.append(dict(item))
    # Heterogeneous rows: absent keys read as Null.
    rows = [{name: row.get(name) for name in names} for row in rows]
    return _finish(names, rows)


def load_dataset(
    data: bytes | str,
    format: str,
    *,
    max_bytes: int | None = None,
) -> Dataset:
    """Parse CSV (header row required) or a JSON array of flat objects."""
    if isinstance(data, str):
        raw = data.encode("utf-8")
    else:
        raw = data
    if max_bytes is not None and len(raw) > max_bytes:
        raise DatasetTooLargeError(
            f"dataset is {len(raw)} bytes; limit is {max_bytes}"
        )
    text = raw.decode("utf-8-sig")
    if format == "csv":
        return _load_csv(text)
    if format == "json-array":
        return _load_json_array(text)
    raise ValueError(f"unknown dataset format {format!r}")


def _coerce_number(value: JsonAtomic) -> int | float | None:
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, float)):
        return value
    if isinstance(value, str):
        return _parse_number(value)
    return None


def _keeps(f: Filter, value: JsonAtomic) -> bool:
    if value is None:
        return False
    if isinstance(f, RangeFilter):
        number = _coerce_number(value)
        return number is not None and f.min <= number <= f.max
    return any(equal_values(value, v) for v in f.values)


def apply_filters(d: Dataset, fs: list[Filter] | tuple[Filter, ...]) -> Dataset:
    """Keep rows satisfying every filter; Null cells in a filtered column
    never satisfy it."""
    if not fs:
        return d
    names = set(d.column_names())
    for f in fs:
        if f.column not in names:
            raise UnknownColumnError(f"filter references unknown column {f.column!r}")
    rows = [row for row in d.rows if all(_keeps(f, row.get(f.column)) for f in fs)]
    return Dataset(d.columns, rows)
