####################################################################################################
# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License. See LICENSE in the project root for license information.
####################################################################################################

import logging
import math
import os
import re
from dataclasses import dataclass
from enum import Enum, unique
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .Errors import (
    EmptyInputError, InsufficientRows, MissingFileError, ParseFailure, RaggedRowsError, SchemaViolation
)
from .Random import Stage, make_rng

# finite decimal literal, e.g. "1.5", "-2", "3e1", ".5"
_DECIMAL = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")

Value = Union[float, str]


@unique
class ColumnKind(Enum):
    NUMERIC = "numeric"
    CATEGORICAL = "categorical"


@dataclass(frozen=True)
class ColumnSchema:
    name: str
    kind: ColumnKind
    categories: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind == ColumnKind.CATEGORICAL:
            if not self.categories:
                raise SchemaViolation(f"Categorical column '{self.name}' has no categories")
            if len(set(self.categories)) != len(self.categories):
                raise SchemaViolation(f"Categorical column '{self.name}' has duplicate categories")
        elif self.categories:
            raise SchemaViolation(f"Numeric column '{self.name}' cannot declare categories")

    @property
    def is_numeric(self) -> bool:
        return self.kind == ColumnKind.NUMERIC

    def to_dict(self) -> dict:
        result = {"name": self.name, "kind": self.kind.value}
        if self.categories:
            result["categories"] = list(self.categories)
        return result

    @staticmethod
    def from_dict(doc: dict) -> "ColumnSchema":
        return ColumnSchema(doc["name"], ColumnKind(doc["kind"]), tuple(doc.get("categories", ())))


Schema = Tuple[ColumnSchema, ...]


def _check_schema(schema: Sequence[ColumnSchema]) -> Schema:
    names = [c.name for c in schema]
    if len(set(names)) != len(names):
        raise SchemaViolation(f"Column names must be unique: {names}")
    return tuple(schema)


def parse_decimal(cell: str) -> Optional[float]:
    "Returns the finite value of a decimal literal, or None if the cell is not one"
    if not _DECIMAL.fullmatch(cell):
        return None
    value = float(cell)
    return value if math.isfinite(value) else None


@dataclass(frozen=True, eq=False)
class TabularDataset:
    """Rows of mixed numeric / categorical values under a column schema

    The frame index records the origin row id of every row, which is what makes
    the disjointness of split datasets checkable. Treat the frame as read-only.
    """
    schema: Schema
    frame: pd.DataFrame

    def __post_init__(self):
        schema = _check_schema(self.schema)
        names = [c.name for c in schema]
        if list(self.frame.columns) != names:
            raise SchemaViolation(f"Frame columns {list(self.frame.columns)} do not match schema {names}")

        frame = self.frame.copy()
        for column in schema:
            if column.is_numeric:
                try:
                    values = frame[column.name].to_numpy(dtype=np.float64)
                except (TypeError, ValueError) as e:
                    raise ParseFailure(f"Column '{column.name}' holds non-numeric values") from e
                if not np.all(np.isfinite(values)):
                    raise ParseFailure(f"Column '{column.name}' holds non-finite values")
                frame[column.name] = values
            else:
                values = frame[column.name].astype(object)
                unknown = set(values) - set(column.categories)
                if unknown:
                    raise SchemaViolation(
                        f"Column '{column.name}' holds values outside its categories: {sorted(map(str, unknown))}"
                    )
                frame[column.name] = values
        object.__setattr__(self, "schema", schema)
        object.__setattr__(self, "frame", frame)

    @classmethod
    def from_rows(cls, schema: Sequence[ColumnSchema], rows: Iterable[Sequence[Value]], index: Sequence[int] = None):
        rows = [tuple(r) for r in rows]
        for r in rows:
            if len(r) != len(schema):
                raise RaggedRowsError(f"Row {r} has {len(r)} values, expected {len(schema)}")
        frame = pd.DataFrame(rows, columns=[c.name for c in schema], index=index)
        if not rows:
            frame = pd.DataFrame({c.name: pd.Series([], dtype=object) for c in schema})
        return cls(tuple(schema), frame)

    @classmethod
    def from_columns(cls, schema: Sequence[ColumnSchema], columns: Dict[str, Sequence[Value]]):
        return cls(tuple(schema), pd.DataFrame({c.name: list(columns[c.name]) for c in schema}))

    @classmethod
    def concat(cls, datasets: Sequence["TabularDataset"]) -> "TabularDataset":
        if not datasets:
            raise ValueError("Nothing to concatenate")
        schema = datasets[0].schema
        for d in datasets[1:]:
            if d.schema != schema:
                raise SchemaViolation("Datasets do not share one schema")
        return cls(schema, pd.concat([d.frame for d in datasets]))

    def __len__(self) -> int:
        return len(self.frame)

    @property
    def names(self) -> List[str]:
        return [c.name for c in self.schema]

    @property
    def rows(self) -> List[Tuple[Value, ...]]:
        return [
            tuple(float(v) if c.is_numeric else v for c, v in zip(self.schema, row))
            for row in self.frame.itertuples(index=False, name=None)
        ]

    @property
    def origin(self) -> np.ndarray:
        "Origin row ids of the rows"
        return self.frame.index.to_numpy()

    def column(self, name: str) -> np.ndarray:
        return self.frame[name].to_numpy()

    def take(self, positions: Sequence[int]) -> "TabularDataset":
        return TabularDataset(self.schema, self.frame.iloc[np.asarray(positions, dtype=np.int64)])

    def replace_columns(self, columns: Dict[str, Sequence[Value]]) -> "TabularDataset":
        "Returns a copy with some columns' values replaced, origin ids kept"
        frame = self.frame.copy()
        for name, values in columns.items():
            frame[name] = list(values)
        return TabularDataset(self.schema, frame)

    def reindexed(self, start: int = 0) -> "TabularDataset":
        "Returns a copy whose origin ids are start, start + 1, ..."
        frame = self.frame.copy()
        frame.index = pd.RangeIndex(start, start + len(frame))
        return TabularDataset(self.schema, frame)


@dataclass(frozen=True, eq=False)
class SplitTriple:
    train: TabularDataset
    reference: TabularDataset
    holdout: TabularDataset

    def __post_init__(self):
        if not len(self.train) == len(self.reference) == len(self.holdout):
            raise ValueError("Train, reference and holdout must have equal sizes")
        origins = [set(d.origin.tolist()) for d in (self.train, self.reference, self.holdout)]
        if origins[0] & origins[1] or origins[0] & origins[2] or origins[1] & origins[2]:
            raise ValueError("Train, reference and holdout must be disjoint")


def infer_schema(raw_rows: Sequence[Sequence[str]], header: Sequence[str]) -> List[ColumnSchema]:
    """Infers a column schema from raw text cells

    A column is numeric iff every non-empty cell is a finite decimal number; otherwise it is
    categorical with its categories the sorted distinct cell values.
    """
    if not header:
        raise EmptyInputError("No header")
    for i, row in enumerate(raw_rows):
        if len(row) != len(header):
            raise RaggedRowsError(f"Row {i + 1} has {len(row)} cells, header has {len(header)}")

    schema = []
    for j, name in enumerate(header):
        cells = [row[j] for row in raw_rows]
        if all(parse_decimal(c) is not None for c in cells if c != ""):
            schema.append(ColumnSchema(name, ColumnKind.NUMERIC))
        else:
            schema.append(ColumnSchema(name, ColumnKind.CATEGORICAL, tuple(sorted(set(cells)))))
    return list(_check_schema(schema))


def _read_raw(path: Union[str, os.PathLike]) -> Tuple[List[str], List[List[str]]]:
    if not os.path.isfile(path):
        raise MissingFileError(f"No such file: {path}")
    try:
        raw = pd.read_csv(
            path,
            header=None,
            dtype=str,
            keep_default_na=False,
            na_values=[],
            skip_blank_lines=False,
            encoding="utf-8",
            index_col=False
        )
    except pd.errors.EmptyDataError as e:
        raise EmptyInputError(f"{path} is empty") from e
    except pd.errors.ParserError as e:
        if "Expected" in str(e):
            raise RaggedRowsError(f"{path}: {e}") from e
        raise ParseFailure(f"{path}: {e}") from e
    except UnicodeDecodeError as e:
        raise ParseFailure(f"{path} is not valid UTF-8") from e

    cells = raw.to_numpy(dtype=object)
    for i, row in enumerate(cells):
        if all(not isinstance(c, str) or c == "" for c in row):
            raise RaggedRowsError(f"{path}: line {i + 1} is blank")
    if any(not isinstance(c, str) for c in cells.ravel()):
        raise RaggedRowsError(f"{path} has rows with fewer cells than the header")
    header = list(cells[0])
    return header, [list(r) for r in cells[1:]]


def _parse_rows(schema: Sequence[ColumnSchema], header: List[str], rows: List[List[str]], source) -> TabularDataset:
    if header != [c.name for c in schema]:
        raise SchemaViolation(f"{source}: header {header} does not match schema {[c.name for c in schema]}")
    columns = {}
    for j, column in enumerate(schema):
        cells = [r[j] for r in rows]
        if column.is_numeric:
            values = []
            for i, c in enumerate(cells):
                v = parse_decimal(c)
                if v is None:
                    raise ParseFailure(f"{source}: line {i + 2}, column '{column.name}': '{c}' is not a finite number")
                values.append(v)
            columns[column.name] = values
        else:
            unknown = sorted(set(cells) - set(column.categories))
            if unknown:
                raise SchemaViolation(f"{source}: column '{column.name}' has unknown categories {unknown}")
            columns[column.name] = cells
    return TabularDataset.from_columns(schema, columns)


def load_csv(path: Union[str, os.PathLike], schema: Sequence[ColumnSchema] = None) -> TabularDataset:
    """Loads a header-first UTF-8 CSV file

    Args:
        path: the file to read
        schema: the schema to parse against; inferred from the file when omitted
    """
    header, rows = _read_raw(path)
    if schema is None:
        schema = infer_schema(rows, header)
    dataset = _parse_rows(schema, header, rows, path)
    logging.debug(f"[data] Loaded {len(dataset)} rows x {len(schema)} columns from {path}")
    return dataset


def load_csv_group(paths: Sequence[Union[str, os.PathLike]]) -> Tuple[List[ColumnSchema], List[TabularDataset]]:
    "Loads CSV files sharing one header under a schema inferred over all their rows"
    raws = [_read_raw(p) for p in paths]
    header = raws[0][0]
    for p, (h, _) in zip(paths, raws):
        if h != header:
            raise SchemaViolation(f"{p}: header {h} differs from {header}")
    schema = infer_schema([r for _, rows in raws for r in rows], header)
    return schema, [_parse_rows(schema, h, rows, p) for p, (h, rows) in zip(paths, raws)]


def write_csv(dataset: TabularDataset, path: Union[str, os.PathLike]):
    "Writes a dataset so that load_csv with the same schema yields identical rows"
    frame = dataset.frame.copy()
    for column in dataset.schema:
        if column.is_numeric:
            # shortest round-trip representation
            frame[column.name] = [repr(float(v)) for v in frame[column.name]]
    frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n")


def split_disjoint(dataset: TabularDataset, n: int, seed: int) -> SplitTriple:
    "Draws disjoint train / reference / holdout sets of n rows each by a seeded permutation"
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if 3 * n > len(dataset):
        raise InsufficientRows(f"Need {3 * n} rows for three disjoint sets of {n}, have {len(dataset)}")
    permutation = make_rng(seed, Stage.SPLIT).permutation(len(dataset))
    return SplitTriple(
        train=dataset.take(permutation[:n]),
        reference=dataset.take(permutation[n:2 * n]),
        holdout=dataset.take(permutation[2 * n:3 * n])
    )
