####################################################################################################
# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License. See LICENSE in the project root for license information.
#
# Gaussian kernel density estimation with diagonal Silverman bandwidths. Densities are only ever
# handled in log space.
####################################################################################################

import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import logsumexp

from .Errors import DegenerateDimension, ShapeMismatch

_LOG_2PI = math.log(2.0 * math.pi)

# upper bound on the number of (query, support, dimension) differences held at once
_BLOCK_ELEMENTS = 1 << 22


def as_matrix(data, name: str = "data") -> np.ndarray:
    "Accepts an EncodedMatrix or array-like and returns a 2-D float64 array"
    values = np.asarray(getattr(data, "values", data), dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    if values.ndim != 2:
        raise ShapeMismatch(f"{name} must be a matrix, got shape {values.shape}")
    return values


@dataclass(frozen=True, eq=False)
class Bandwidth:
    "Per-dimension kernel standard deviations h_1..h_d"
    values: np.ndarray

    def __post_init__(self):
        values = np.atleast_1d(np.asarray(self.values, dtype=np.float64))
        if values.ndim != 1 or not np.all(np.isfinite(values)) or not np.all(values > 0):
            raise DegenerateDimension(f"Bandwidths must be positive and finite, got {values}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def dimension(self) -> int:
        return len(self.values)


def silverman_bandwidth(data) -> Bandwidth:
    """Silverman's rule of thumb, multivariate diagonal form

        h_j = sigma_j * (4 / ((d + 2) * n)) ** (1 / (d + 4))

    with sigma_j the population standard deviation of dimension j. Reduces to
    1.06 * sigma * n ** (-1/5) in one dimension.
    """
    data = as_matrix(data)
    n, d = data.shape
    if n < 2:
        raise DegenerateDimension(f"Silverman's rule needs at least 2 points, got {n}")
    sigma = data.std(axis=0)
    degenerate = np.flatnonzero(sigma == 0)
    if len(degenerate):
        raise DegenerateDimension(f"Dimensions {degenerate.tolist()} have zero variance")
    return Bandwidth(sigma * (4.0 / ((d + 2) * n))**(1.0 / (d + 4)))


@dataclass(frozen=True, eq=False)
class KdeModel:
    """A fitted Gaussian KDE

    Attributes:
        support: the fitted points, stored verbatim
        bandwidth: per-dimension bandwidth
        log_norm: log(n * (2 pi)^(d/2) * prod(h_j))
    """
    support: np.ndarray
    bandwidth: Bandwidth
    log_norm: float

    @property
    def size(self) -> int:
        return self.support.shape[0]

    @property
    def dimension(self) -> int:
        return self.support.shape[1]

    @property
    def log_kernel_norm(self) -> float:
        "log of a single kernel's normalization, (2 pi)^(d/2) * prod(h_j)"
        return 0.5 * self.dimension * _LOG_2PI + float(np.sum(np.log(self.bandwidth.values)))

    def logpdf(self, queries) -> np.ndarray:
        return kde_logpdf(self, queries)


def kde_fit(data, bandwidth: Union[Bandwidth, float, np.ndarray, None] = None) -> KdeModel:
    """Fits a Gaussian KDE

    Args:
        data: n x d support points
        bandwidth: explicit bandwidth (a Bandwidth, a scalar or a d-vector); Silverman's rule if omitted
    """
    support = as_matrix(data, "support").copy()
    n, d = support.shape
    if n < 1:
        raise ShapeMismatch("A KDE needs at least one support point")
    if bandwidth is None:
        bandwidth = silverman_bandwidth(support)
    elif not isinstance(bandwidth, Bandwidth):
        bandwidth = Bandwidth(np.broadcast_to(np.asarray(bandwidth, dtype=np.float64), (d, )))
    if bandwidth.dimension != d:
        raise ShapeMismatch(f"Bandwidth has {bandwidth.dimension} dimensions, data has {d}")

    support.setflags(write=False)
    log_norm = math.log(n) + 0.5 * d * _LOG_2PI + float(np.sum(np.log(bandwidth.values)))
    logging.debug(f"[kde] Fitted on {n} x {d} points, bandwidth {bandwidth.values.tolist()}")
    return KdeModel(support=support, bandwidth=bandwidth, log_norm=log_norm)


def _check_queries(model: KdeModel, queries) -> np.ndarray:
    queries = as_matrix(queries, "queries")
    if queries.shape[1] != model.dimension:
        raise ShapeMismatch(f"Queries have {queries.shape[1]} dimensions, model has {model.dimension}")
    return queries


def _log_kernel_sums(model: KdeModel, queries: np.ndarray) -> np.ndarray:
    "log sum_k exp(-|(q - s_k) / h|^2 / 2) for every query row"
    scaled_support = model.support / model.bandwidth.values
    scaled_queries = queries / model.bandwidth.values
    block = max(1, _BLOCK_ELEMENTS // max(1, model.size * model.dimension))

    result = np.empty(len(queries))
    for start in range(0, len(queries), block):
        differences = scaled_queries[start:start + block, None, :] - scaled_support[None, :, :]
        exponents = -0.5 * np.sum(differences * differences, axis=2)
        result[start:start + block] = logsumexp(exponents, axis=1)
    return result


def kde_logpdf(model: KdeModel, queries) -> np.ndarray:
    "Log density of the model at every query row, via log-sum-exp"
    queries = _check_queries(model, queries)
    return _log_kernel_sums(model, queries) - model.log_norm


def kde_logpdf_augmented(
    model: KdeModel, extra, queries, base_logpdf: np.ndarray = None, refit_bandwidth: bool = False
) -> np.ndarray:
    """Log density of the KDE refitted on support + {extra}, without refitting

        log((n * p(q) + K_h(q, extra)) / (n + 1))

    Args:
        model: the KDE on the original support
        extra: the d-vector added to the support
        queries: m x d query points
        base_logpdf: kde_logpdf(model, queries) when the caller already has it
        refit_bandwidth: recompute Silverman's bandwidth on support + {extra} and refit instead of
            reusing the model's bandwidth
    """
    queries = _check_queries(model, queries)
    extra = np.asarray(getattr(extra, "values", extra), dtype=np.float64).reshape(-1)
    if extra.shape[0] != model.dimension:
        raise ShapeMismatch(f"Extra point has {extra.shape[0]} dimensions, model has {model.dimension}")

    if refit_bandwidth:
        return kde_logpdf(kde_fit(np.vstack([model.support, extra])), queries)

    if base_logpdf is None:
        log_sums = _log_kernel_sums(model, queries)
    else:
        log_sums = np.asarray(base_logpdf, dtype=np.float64) + model.log_norm

    scaled = (queries - extra) / model.bandwidth.values
    extra_exponent = -0.5 * np.sum(scaled * scaled, axis=1)
    return np.logaddexp(log_sums, extra_exponent) - model.log_kernel_norm - math.log(model.size + 1)
