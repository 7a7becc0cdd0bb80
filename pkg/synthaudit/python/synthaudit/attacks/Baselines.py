####################################################################################################
# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License. See LICENSE in the project root for license information.
####################################################################################################

import logging
from typing import Optional

import numpy as np

from ..Constants import DEFAULT_K
from ..Density import kde_fit, kde_logpdf
from ..Errors import AttackError
from ..Neighbors import Metric, knn_batch, nearest_distances, pairwise_distances
from .Inputs import require_rows, resolve_k, shared_matrices
from .Scores import AttackId, AttackScores


def domias(S, R, X) -> AttackScores:
    "Log density ratio log p_S(x) - log p_R(x) of KDEs fitted on S and R"
    S, R, X = shared_matrices("domias", S=S, R=R, X=X)
    require_rows("domias", "S", S, 2)
    require_rows("domias", "R", R, 2)
    scores = kde_logpdf(kde_fit(S), X) - kde_logpdf(kde_fit(R), X)
    return AttackScores(AttackId.DOMIAS, {}, scores)


def dcr(S, X, metric=Metric.EUCLIDEAN) -> AttackScores:
    "Negated distance to the closest synthetic record"
    S, X = shared_matrices("dcr", S=S, X=X)
    metric = Metric(metric)
    return AttackScores(AttackId.DCR, {"metric": metric.value}, -nearest_distances(X, S, metric))


def dcr_diff(S, R, X, metric=Metric.EUCLIDEAN) -> AttackScores:
    "Distance to the closest reference record minus distance to the closest synthetic record"
    S, R, X = shared_matrices("dcr_diff", S=S, R=R, X=X)
    metric = Metric(metric)
    scores = nearest_distances(X, R, metric) - nearest_distances(X, S, metric)
    return AttackScores(AttackId.DCR_DIFF, {"metric": metric.value}, scores)


def mc(S, X, radius: Optional[float] = None, metric=Metric.EUCLIDEAN) -> AttackScores:
    """Fraction of synthetic records within a radius of each test point

    Args:
        S: encoded synthetic data
        X: encoded test points
        radius: neighborhood radius; defaults to the median over X of the distance to the closest
            synthetic record, or the smallest positive distance when that median is 0
        metric: distance defining the neighborhood
    """
    S, X = shared_matrices("mc", S=S, X=X)
    metric = Metric(metric)
    distances = pairwise_distances(X, S, metric)
    if radius is None:
        radius = float(np.median(distances.min(axis=1)))
        if radius == 0.0:
            positive = distances[distances > 0]
            radius = float(positive.min()) if positive.size else 1.0
        logging.debug(f"[attack] mc default radius {radius}")
    elif not radius > 0:
        raise AttackError(f"mc: radius must be positive, got {radius}")
    scores = np.count_nonzero(distances <= radius, axis=1) / S.shape[0]
    return AttackScores(AttackId.MC, {"radius": float(radius), "metric": metric.value}, scores)


def dpi(S, R, X, k=DEFAULT_K, metric=Metric.EUCLIDEAN) -> AttackScores:
    """Share of synthetic records among the k nearest neighbors of each test point in S + R

    S is stacked before R, so distance ties resolve in favor of synthetic records.
    """
    S, R, X = shared_matrices("dpi", S=S, R=R, X=X)
    require_rows("dpi", "S", S, 1)
    require_rows("dpi", "R", R, 1)
    metric = Metric(metric)
    stacked = np.vstack([S, R])
    k_used = resolve_k("dpi", k, stacked.shape[0])
    n_synthetic = S.shape[0]
    neighbors = knn_batch(X, stacked, k_used, metric)
    scores = np.array([np.count_nonzero(nb.indices < n_synthetic) / k_used for nb in neighbors])
    return AttackScores(AttackId.DPI, {"k": k_used, "metric": metric.value}, scores)
