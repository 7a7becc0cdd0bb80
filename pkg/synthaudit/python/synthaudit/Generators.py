####################################################################################################
# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License. See LICENSE in the project root for license information.
#
# Toy population and generator family spanning the leakage spectrum: a memorizer that emits
# noised copies of training rows, a smooth parametric fit, and an oracle that never sees the
# training data.
####################################################################################################

import logging
from dataclasses import dataclass, field
from enum import Enum, unique
from typing import List, Optional, Tuple

import numpy as np

from .Constants import DEFAULT_CATEGORICAL_RESAMPLE
from .Dataset import ColumnKind, ColumnSchema, TabularDataset
from .Density import as_matrix
from .Errors import ConfigError, InsufficientRows
from .Neighbors import nearest_distances
from .Random import Stage, make_rng

_TOLERANCE = 1e-12


@dataclass(frozen=True)
class CategoricalTable:
    "Independent probability table of one categorical column"
    name: str
    categories: Tuple[str, ...]
    probabilities: Tuple[float, ...]

    def __post_init__(self):
        if not self.categories or len(self.categories) != len(self.probabilities):
            raise ValueError(f"Column '{self.name}': need one probability per category")
        if len(set(self.categories)) != len(self.categories):
            raise ValueError(f"Column '{self.name}': duplicate categories")
        if any(p < 0 for p in self.probabilities) or abs(sum(self.probabilities) - 1.0) > _TOLERANCE:
            raise ValueError(f"Column '{self.name}': probabilities must be non-negative and sum to 1")


@dataclass(frozen=True, eq=False)
class PopulationSpec:
    """A population distribution: a diagonal Gaussian mixture over the numeric columns, independent
    probability tables over the categorical ones

    Attributes:
        numeric: numeric column names
        weights: K mixture weights
        means: K x p component means
        variances: K x p component variances
        categorical: per categorical column, its probability table
    """
    numeric: Tuple[str, ...]
    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    categorical: Tuple[CategoricalTable, ...] = ()

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        p = len(self.numeric)
        means = np.asarray(self.means, dtype=np.float64).reshape(len(weights), p)
        variances = np.asarray(self.variances, dtype=np.float64).reshape(len(weights), p)
        if len(weights) == 0 or np.any(weights < 0) or abs(weights.sum() - 1.0) > _TOLERANCE:
            raise ValueError("Mixture weights must be non-negative and sum to 1")
        if not np.all(np.isfinite(means)) or not np.all(np.isfinite(variances)) or np.any(variances <= 0):
            raise ValueError("Component means must be finite and variances positive")
        names = list(self.numeric) + [t.name for t in self.categorical]
        if not names or len(set(names)) != len(names):
            raise ValueError(f"Column names must be non-empty and unique: {names}")
        object.__setattr__(self, "numeric", tuple(self.numeric))
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "variances", variances)
        object.__setattr__(self, "categorical", tuple(self.categorical))

    @property
    def schema(self) -> Tuple[ColumnSchema, ...]:
        return tuple(ColumnSchema(name, ColumnKind.NUMERIC) for name in self.numeric) + tuple(
            ColumnSchema(t.name, ColumnKind.CATEGORICAL, tuple(sorted(t.categories))) for t in self.categorical
        )

    def to_dict(self) -> dict:
        return {
            "numeric": {
                "columns": list(self.numeric),
                "components": [{
                    "weight": float(w),
                    "mean": m.tolist(),
                    "variance": v.tolist()
                } for w, m, v in zip(self.weights, self.means, self.variances)]
            },
            "categorical": {t.name: dict(zip(t.categories, t.probabilities))
                            for t in self.categorical}
        }

    @staticmethod
    def from_dict(doc: dict, path: str = "$") -> "PopulationSpec":
        """Builds a population from its document form

            {"numeric": {"columns": [...], "components": [{"weight", "mean", "variance"}, ...]},
             "categorical": {"<column>": {"<category>": probability, ...}, ...}}
        """
        if not isinstance(doc, dict):
            raise ConfigError(path, "expected an object")
        numeric = doc.get("numeric", {"columns": [], "components": [{"weight": 1.0, "mean": [], "variance": []}]})
        if not isinstance(numeric, dict):
            raise ConfigError(f"{path}.numeric", "expected an object")
        columns = numeric.get("columns")
        if not isinstance(columns, list):
            raise ConfigError(f"{path}.numeric.columns", "expected a list of column names")
        components = numeric.get("components")
        if not isinstance(components, list) or not components:
            raise ConfigError(f"{path}.numeric.components", "expected a non-empty list")
        for i, c in enumerate(components):
            where = f"{path}.numeric.components[{i}]"
            if not isinstance(c, dict) or not {"weight", "mean", "variance"} <= set(c):
                raise ConfigError(where, "expected an object with weight, mean and variance")
            if not isinstance(c["mean"], list) or not isinstance(c["variance"], list) \
                or len(c["mean"]) != len(columns) or len(c["variance"]) != len(columns):
                raise ConfigError(where, f"mean and variance need {len(columns)} entries")

        categorical = doc.get("categorical", {})
        if not isinstance(categorical, dict):
            raise ConfigError(f"{path}.categorical", "expected an object of probability tables")
        tables = []
        for name, table in categorical.items():
            try:
                tables.append(CategoricalTable(name, tuple(table), tuple(float(p) for p in table.values())))
            except (AttributeError, TypeError, ValueError) as e:
                raise ConfigError(f"{path}.categorical.{name}", str(e)) from e

        try:
            return PopulationSpec(
                numeric=tuple(columns),
                weights=[c["weight"] for c in components],
                means=[c["mean"] for c in components],
                variances=[c["variance"] for c in components],
                categorical=tuple(tables)
            )
        except (TypeError, ValueError) as e:
            raise ConfigError(path, str(e)) from e


def _draw_population(spec: PopulationSpec, n: int, rng: np.random.Generator) -> TabularDataset:
    component = rng.choice(len(spec.weights), size=n, p=spec.weights)
    numerics = spec.means[component] + np.sqrt(spec.variances[component]) * rng.standard_normal(
        (n, len(spec.numeric))
    )
    columns = {name: numerics[:, j] for j, name in enumerate(spec.numeric)}
    for table in spec.categorical:
        codes = rng.choice(len(table.categories), size=n, p=np.asarray(table.probabilities))
        columns[table.name] = [table.categories[c] for c in codes]
    return TabularDataset.from_columns(spec.schema, columns)


def sample_population(spec: PopulationSpec, n: int, seed: int) -> TabularDataset:
    "Draws n i.i.d. rows from the population"
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return _draw_population(spec, n, make_rng(seed, Stage.POPULATION))


@unique
class GeneratorKind(Enum):
    MEMORIZER = "memorizer"
    PARAMETRIC_FIT = "parametric_fit"
    POPULATION_ORACLE = "population_oracle"


@dataclass(frozen=True, eq=False)
class GeneratorSpec:
    """A toy generator

    Attributes:
        kind: the generator family
        noise_fraction: memorizer only, numeric noise deviation as a fraction of each column's deviation
        resample_probability: memorizer only, probability of redrawing a categorical cell from the
            training marginal
        population: population_oracle only, the true population
        name: label used in result keys; defaults to the kind
    """
    kind: GeneratorKind
    noise_fraction: float = 0.0
    resample_probability: float = DEFAULT_CATEGORICAL_RESAMPLE
    population: Optional[PopulationSpec] = None
    name: str = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "kind", GeneratorKind(getattr(self.kind, "value", self.kind)))
        if not self.noise_fraction >= 0:
            raise ValueError(f"noise_fraction must be non-negative, got {self.noise_fraction}")
        if not 0 <= self.resample_probability <= 1:
            raise ValueError(f"resample_probability must be in [0, 1], got {self.resample_probability}")
        if self.kind == GeneratorKind.POPULATION_ORACLE and self.population is None:
            raise ValueError("population_oracle needs a population")
        if self.name is None:
            object.__setattr__(self, "name", self.kind.value)

    def params(self) -> dict:
        if self.kind == GeneratorKind.MEMORIZER:
            return {"noise_fraction": self.noise_fraction, "resample_probability": self.resample_probability}
        return {}


def _memorize(gen: GeneratorSpec, T: TabularDataset, m: int, rng: np.random.Generator) -> TabularDataset:
    n = len(T)
    # concatenated permutations: every training row is emitted once per pass
    passes = -(-m // n)
    rows = np.concatenate([rng.permutation(n) for _ in range(passes)])[:m]
    copies = T.take(rows)

    replaced = {}
    for column in T.schema:
        if column.is_numeric:
            sigma = float(T.column(column.name).std())
            noise = rng.standard_normal(m) * (gen.noise_fraction * sigma)
            replaced[column.name] = copies.column(column.name) + noise
        else:
            redraw = rng.random(m) < gen.resample_probability
            marginal = T.column(column.name)[rng.integers(n, size=m)]
            replaced[column.name] = np.where(redraw, marginal, copies.column(column.name))
    return copies.replace_columns(replaced)


def _parametric_fit(T: TabularDataset, m: int, rng: np.random.Generator) -> TabularDataset:
    n = len(T)
    columns = {}
    for column in T.schema:
        values = T.column(column.name)
        if column.is_numeric:
            values = values.astype(np.float64)
            columns[column.name] = values.mean() + values.std() * rng.standard_normal(m)
        else:
            columns[column.name] = values[rng.integers(n, size=m)]
    return TabularDataset.from_columns(T.schema, columns)


def generate(gen: GeneratorSpec, T: TabularDataset, m: int, seed: int) -> TabularDataset:
    """Produces m synthetic rows from training data T

    Args:
        gen: the generator
        T: training rows; ignored by the population oracle
        m: synthetic rows wanted
        seed: the cell seed
    """
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    rng = make_rng(seed, Stage.GENERATE)
    if gen.kind == GeneratorKind.POPULATION_ORACLE:
        synthetic = _draw_population(gen.population, m, rng)
    else:
        if len(T) == 0:
            raise InsufficientRows(f"{gen.kind.value} needs training rows")
        if gen.kind == GeneratorKind.MEMORIZER:
            synthetic = _memorize(gen, T, m, rng)
        else:
            synthetic = _parametric_fit(T, m, rng)
    logging.debug(f"[toygen] {gen.name} generated {m} rows")
    return synthetic.reindexed()


def identical_match_fraction(synthetic: TabularDataset, train: TabularDataset) -> float:
    "Fraction of synthetic rows that appear verbatim among the training rows"
    if len(synthetic) == 0:
        return 0.0
    seen = set(train.rows)
    return sum(row in seen for row in synthetic.rows) / len(synthetic)


def dcr_train_distance(synthetic, train) -> float:
    "Mean distance from each encoded training row to its closest encoded synthetic row"
    return float(np.mean(nearest_distances(as_matrix(train, "train"), as_matrix(synthetic, "synthetic"))))


def sample_populations() -> List[str]:
    return sorted(SAMPLE_POPULATIONS)


def sample_population_spec(name: str) -> PopulationSpec:
    try:
        return PopulationSpec.from_dict(SAMPLE_POPULATIONS[name])
    except KeyError:
        raise ValueError(f"Unknown sample population '{name}', choose from {sample_populations()}") from None


SAMPLE_POPULATIONS = {
    # 4 numeric + 2 categorical columns, three well-separated clusters
    "mixed_gaussian": {
        "numeric": {
            "columns": ["x0", "x1", "x2", "x3"],
            "components": [
                {"weight": 0.5, "mean": [0.0, 0.0, 0.0, 0.0], "variance": [1.0, 1.0, 1.0, 1.0]},
                {"weight": 0.3, "mean": [3.0, -2.0, 1.0, 4.0], "variance": [0.5, 2.0, 1.0, 0.25]},
                {"weight": 0.2, "mean": [-4.0, 2.0, -3.0, 1.0], "variance": [2.0, 0.5, 0.5, 1.0]},
            ]
        },
        "categorical": {
            "color": {"red": 0.5, "green": 0.3, "blue": 0.2},
            "size": {"small": 0.6, "large": 0.4},
        }
    },
    "gaussian": {
        "numeric": {
            "columns": ["x0", "x1"],
            "components": [{"weight": 1.0, "mean": [0.0, 0.0], "variance": [1.0, 1.0]}]
        }
    },
}
