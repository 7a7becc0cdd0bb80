####################################################################################################
# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License. See LICENSE in the project root for license information.
####################################################################################################

import json
import logging
from dataclasses import dataclass
from functools import cached_property
from enum import Enum, unique
from hashlib import md5
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .Constants import PCA_VARIANCE_THRESHOLD
from .Dataset import ColumnKind, ColumnSchema, TabularDataset
from .Errors import EncodingError


@unique
class EncodingStrategy(Enum):
    ORDINAL_STANDARDIZE = "ordinal_standardize"    #: ordinal codes, every dimension standardized
    ONE_HOT_SCALE = "one_hot_scale"    #: numeric dimensions standardized, raw 0/1 indicators
    ORDINAL_STANDARDIZE_PCA = "ordinal_standardize_pca"    #: ordinal + standardize, then PCA reduction

    @staticmethod
    def parse(value) -> "EncodingStrategy":
        if isinstance(value, EncodingStrategy):
            return value
        try:
            return EncodingStrategy(str(value).replace("-", "_"))
        except ValueError:
            raise EncodingError(f"Unknown encoding strategy '{value}'")


@dataclass(frozen=True)
class Feature:
    "One raw output dimension before dropping / projection"
    column: str
    category: Optional[str] = None    # set for one-hot indicators

    @property
    def name(self) -> str:
        return self.column if self.category is None else f"{self.column}={self.category}"

    @property
    def is_indicator(self) -> bool:
        return self.category is not None


@dataclass(frozen=True, eq=False)
class EncodedMatrix:
    values: np.ndarray
    encoder_id: str

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise EncodingError(f"Encoded values must be a matrix, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise EncodingError("Encoded values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    def __len__(self) -> int:
        return self.values.shape[0]

    def take(self, positions: Sequence[int]) -> "EncodedMatrix":
        return EncodedMatrix(self.values[np.asarray(positions, dtype=np.int64)], self.encoder_id)


@dataclass(frozen=True, eq=False)
class Encoder:
    """A fitted feature transformation from a tabular schema to real matrices

    Attributes:
        strategy: the encoding strategy
        schema: the schema the encoder was fitted on
        vocabulary: per categorical column, the lexicographically ordered categories seen at fit time;
            the ordinal code of a category is its position
        features: the raw output dimensions before constant ones are dropped
        kept: indices into features of the retained dimensions
        means, scales: standardization parameters of the retained dimensions
        pca_mean, pca_components: the PCA projection (components as rows), None unless strategy uses PCA
    """
    strategy: EncodingStrategy
    schema: Tuple[ColumnSchema, ...]
    vocabulary: Dict[str, Tuple[str, ...]]
    features: Tuple[Feature, ...]
    kept: Tuple[int, ...]
    means: np.ndarray
    scales: np.ndarray
    pca_mean: Optional[np.ndarray] = None
    pca_components: Optional[np.ndarray] = None

    @property
    def dropped(self) -> List[str]:
        "Names of the constant dimensions removed at fit time"
        kept = set(self.kept)
        return [f.name for i, f in enumerate(self.features) if i not in kept]

    @property
    def output_dimension(self) -> int:
        return len(self.kept) if self.pca_components is None else self.pca_components.shape[0]

    @cached_property
    def encoder_id(self) -> str:
        # stable hash of the audit document
        return md5(self.to_json().encode("utf-8")).digest().hex()[:16]

    def encode(self, dataset: TabularDataset) -> EncodedMatrix:
        return encode(self, dataset)

    def to_dict(self) -> dict:
        doc = {
            "strategy": self.strategy.value,
            "schema": [c.to_dict() for c in self.schema],
            "vocabulary": {k: list(v) for k, v in self.vocabulary.items()},
            "features": [f.name for f in self.features],
            "kept": list(self.kept),
            "means": self.means.tolist(),
            "scales": self.scales.tolist(),
        }
        if self.pca_components is not None:
            doc["pca"] = {
                "mean": self.pca_mean.tolist(),
                "components": self.pca_components.tolist(),
                "retained": int(self.pca_components.shape[0])
            }
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "Encoder":
        doc = json.loads(text)
        strategy = EncodingStrategy(doc["strategy"])
        schema = tuple(ColumnSchema.from_dict(c) for c in doc["schema"])
        vocabulary = {k: tuple(v) for k, v in doc["vocabulary"].items()}
        pca = doc.get("pca")
        return Encoder(
            strategy=strategy,
            schema=schema,
            vocabulary=vocabulary,
            features=_features_for(schema, vocabulary, strategy),
            kept=tuple(doc["kept"]),
            means=np.asarray(doc["means"], dtype=np.float64),
            scales=np.asarray(doc["scales"], dtype=np.float64),
            pca_mean=np.asarray(pca["mean"], dtype=np.float64) if pca else None,
            pca_components=np.asarray(pca["components"], dtype=np.float64).reshape(-1, len(doc["kept"]))
            if pca else None
        )


def _features_for(schema, vocabulary, strategy: EncodingStrategy) -> Tuple[Feature, ...]:
    features = []
    for column in schema:
        if column.is_numeric or strategy != EncodingStrategy.ONE_HOT_SCALE:
            features.append(Feature(column.name))
        else:
            features.extend(Feature(column.name, c) for c in vocabulary[column.name])
    return tuple(features)


def _raw_matrix(schema, vocabulary, strategy: EncodingStrategy, dataset: TabularDataset) -> np.ndarray:
    blocks = []
    for column in schema:
        values = dataset.column(column.name)
        if column.is_numeric:
            blocks.append(values.astype(np.float64)[:, None])
            continue

        codes_map = {c: i for i, c in enumerate(vocabulary[column.name])}
        try:
            codes = np.fromiter((codes_map[v] for v in values), dtype=np.int64, count=len(values))
        except KeyError as e:
            raise EncodingError(f"Column '{column.name}': category {e.args[0]!r} was not seen at fit time") from None

        if strategy == EncodingStrategy.ONE_HOT_SCALE:
            one_hot = np.zeros((len(values), len(codes_map)))
            one_hot[np.arange(len(values)), codes] = 1.0
            blocks.append(one_hot)
        else:
            blocks.append(codes.astype(np.float64)[:, None])
    if not blocks:
        return np.zeros((len(dataset), 0))
    return np.hstack(blocks)


def _check_schema(expected, dataset: TabularDataset):
    actual = [(c.name, c.kind) for c in dataset.schema]
    if actual != [(c.name, c.kind) for c in expected]:
        raise EncodingError(f"Dataset schema {[n for n, _ in actual]} does not match the encoder's schema")


def _principal_components(values: np.ndarray, threshold: float):
    mean = values.mean(axis=0)
    centered = values - mean
    covariance = centered.T @ centered / values.shape[0]
    eigenvalues, eigenvectors = np.linalg.eigh(covariance)
    order = np.argsort(eigenvalues, kind="stable")[::-1]
    eigenvalues = np.clip(eigenvalues[order], 0.0, None)
    components = eigenvectors[:, order].T

    # deterministic sign: largest-magnitude loading positive
    signs = np.sign(components[np.arange(len(components)), np.argmax(np.abs(components), axis=1)])
    components = components * signs[:, None]

    explained = np.cumsum(eigenvalues) / eigenvalues.sum()
    retained = int(np.argmax(explained >= threshold - 1e-12)) + 1
    return mean, components[:retained]


def fit_encoder(
    strategy,
    fit_data: Sequence[TabularDataset],
    vocabulary_data: Sequence[TabularDataset] = None,
    pca_threshold: float = PCA_VARIANCE_THRESHOLD
) -> Encoder:
    """Fits an encoder on the concatenation of datasets

    Args:
        strategy: an EncodingStrategy or its name
        fit_data: datasets the means, deviations and PCA components are computed on
        vocabulary_data: datasets whose categories make up the vocabulary; defaults to fit_data
        pca_threshold: cumulative explained variance retained by PCA
    """
    strategy = EncodingStrategy.parse(strategy)
    if not fit_data:
        raise EncodingError("No data to fit the encoder on")
    schema = fit_data[0].schema
    vocabulary_data = list(vocabulary_data) if vocabulary_data else list(fit_data)
    for d in list(fit_data) + vocabulary_data:
        _check_schema(schema, d)

    fit = TabularDataset.concat(list(fit_data))
    if len(fit) < 2:
        raise EncodingError(f"Need at least 2 rows to fit an encoder, got {len(fit)}")

    vocabulary = {}
    for column in schema:
        if column.kind == ColumnKind.CATEGORICAL:
            seen = set()
            for d in vocabulary_data:
                seen.update(d.column(column.name).tolist())
            vocabulary[column.name] = tuple(sorted(seen))

    features = _features_for(schema, vocabulary, strategy)
    raw = _raw_matrix(schema, vocabulary, strategy, fit)

    # population statistics
    means = raw.mean(axis=0)
    scales = raw.std(axis=0)
    kept = np.flatnonzero(scales > 0)
    if len(kept) == 0:
        raise EncodingError("Every column is constant on the fit data")
    means, scales = means[kept], scales[kept]

    if strategy == EncodingStrategy.ONE_HOT_SCALE:
        indicator = np.array([features[i].is_indicator for i in kept])
        means[indicator] = 0.0
        scales[indicator] = 1.0

    pca_mean = pca_components = None
    if strategy == EncodingStrategy.ORDINAL_STANDARDIZE_PCA:
        standardized = (raw[:, kept] - means) / scales
        pca_mean, pca_components = _principal_components(standardized, pca_threshold)

    encoder = Encoder(
        strategy=strategy,
        schema=schema,
        vocabulary=vocabulary,
        features=features,
        kept=tuple(int(i) for i in kept),
        means=means,
        scales=scales,
        pca_mean=pca_mean,
        pca_components=pca_components
    )
    if encoder.dropped:
        logging.debug(f"[encode] Dropped constant dimensions {encoder.dropped}")
    logging.debug(f"[encode] Fitted {strategy.value} encoder with {encoder.output_dimension} output dimensions")
    return encoder


def encode(encoder: Encoder, dataset: TabularDataset) -> EncodedMatrix:
    "Applies a fitted encoder; row order is preserved"
    _check_schema(encoder.schema, dataset)
    raw = _raw_matrix(encoder.schema, encoder.vocabulary, encoder.strategy, dataset)
    values = (raw[:, list(encoder.kept)] - encoder.means) / encoder.scales
    if encoder.pca_components is not None:
        values = (values - encoder.pca_mean) @ encoder.pca_components.T
    return EncodedMatrix(values, encoder.encoder_id)
