####################################################################################################
# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License. See LICENSE in the project root for license information.
####################################################################################################

from dataclasses import dataclass
from enum import Enum, unique
from typing import List

import numpy as np
from scipy.spatial.distance import cdist

from .Density import as_matrix
from .Errors import ShapeMismatch


@unique
class Metric(Enum):
    EUCLIDEAN = "euclidean"
    CITYBLOCK = "cityblock"
    CHEBYSHEV = "chebyshev"


@dataclass(frozen=True, eq=False)
class NeighborResult:
    "The k nearest rows of a searched matrix, closest first"
    indices: np.ndarray
    distances: np.ndarray

    def __len__(self) -> int:
        return len(self.indices)


def _check(queries: np.ndarray, data: np.ndarray):
    if data.shape[0] == 0:
        raise ShapeMismatch("Cannot search an empty matrix")
    if queries.shape[1] != data.shape[1]:
        raise ShapeMismatch(f"Query has {queries.shape[1]} dimensions, data has {data.shape[1]}")


def _select(distances: np.ndarray, k: int) -> NeighborResult:
    n = len(distances)
    if k >= n:
        order = np.argsort(distances, kind="stable")
    else:
        # partial selection, then a stable sort of everything within the k-th distance so that
        # ties at the boundary go to the lower row index
        threshold = distances[np.argpartition(distances, k - 1)[k - 1]]
        candidates = np.flatnonzero(distances <= threshold)
        order = candidates[np.argsort(distances[candidates], kind="stable")][:k]
    return NeighborResult(indices=order, distances=distances[order])


def pairwise_distances(queries, data, metric=Metric.EUCLIDEAN) -> np.ndarray:
    "m x n distance matrix between the rows of queries and data"
    queries = as_matrix(queries, "queries")
    data = as_matrix(data)
    _check(queries, data)
    return cdist(queries, data, metric=Metric(metric).value)


def knn(query, data, k: int, metric=Metric.EUCLIDEAN) -> NeighborResult:
    """Exact k-nearest-neighbor search of one query

    Args:
        query: d-vector
        data: n x d matrix searched
        k: neighbors wanted; all n rows are returned when k >= n
        metric: a Metric or its name

    Ties are broken by the lower row index.
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    query = np.asarray(getattr(query, "values", query), dtype=np.float64).reshape(1, -1)
    return _select(pairwise_distances(query, data, metric)[0], k)


def knn_batch(queries, data, k: int, metric=Metric.EUCLIDEAN) -> List[NeighborResult]:
    "knn for every row of a query matrix"
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    return [_select(row, k) for row in pairwise_distances(queries, data, metric)]


def nearest_distance(query, data, metric=Metric.EUCLIDEAN) -> float:
    return float(knn(query, data, 1, metric).distances[0])


def nearest_distances(queries, data, metric=Metric.EUCLIDEAN) -> np.ndarray:
    "Distance from every query row to its nearest data row"
    return pairwise_distances(queries, data, metric).min(axis=1)
