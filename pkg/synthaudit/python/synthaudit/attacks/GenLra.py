####################################################################################################
# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License. See LICENSE in the project root for license information.
#
# Gen-LRA: scores a test point by how much adding it to the reference sample raises the
# likelihood of the synthetic points closest to it, under a Gaussian KDE surrogate.
####################################################################################################

import logging
from enum import Enum, unique
from typing import Union

import numpy as np

from ..Constants import DEFAULT_K
from ..Density import kde_fit, kde_logpdf, kde_logpdf_augmented
from ..Errors import AttackError
from ..Neighbors import knn_batch
from .Inputs import require_rows, resolve_k, shared_matrices
from .Scores import AttackId, AttackScores


@unique
class BandwidthMode(Enum):
    SHARED = "shared"    #: the augmented KDE reuses the reference bandwidth
    REFIT = "refit"    #: Silverman's rule is reapplied to the augmented support

    @staticmethod
    def parse(value) -> "BandwidthMode":
        try:
            return BandwidthMode(getattr(value, "value", value))
        except ValueError:
            raise AttackError(f"Unknown bandwidth mode '{value}'")


def gen_lra(S, R, X, k: Union[int, str] = DEFAULT_K, bandwidth_mode=BandwidthMode.SHARED) -> AttackScores:
    """Likelihood-ratio influence of each test point on its k nearest synthetic points

    For every row x of X:

        score(x) = sum over s in kNN_S(x) of [log p(s | R + {x}) - log p(s | R)]

    where p is a Gaussian KDE with Silverman bandwidth fitted once on R.

    Args:
        S: encoded synthetic data
        R: encoded reference data, at least 2 rows
        X: encoded test points
        k: synthetic neighbors summed over, or "N" for all of S
        bandwidth_mode: BandwidthMode.SHARED (default) or BandwidthMode.REFIT
    """
    S, R, X = shared_matrices("gen_lra", S=S, R=R, X=X)
    require_rows("gen_lra", "R", R, 2)
    require_rows("gen_lra", "S", S, 1)
    k_used = resolve_k("gen_lra", k, S.shape[0])
    mode = BandwidthMode.parse(bandwidth_mode)
    refit = mode == BandwidthMode.REFIT

    model = kde_fit(R)
    base = kde_logpdf(model, S)

    scores = np.empty(X.shape[0])
    for i, neighbors in enumerate(knn_batch(X, S, k_used)):
        local_base = base[neighbors.indices]
        augmented = kde_logpdf_augmented(
            model, X[i], S[neighbors.indices], base_logpdf=local_base, refit_bandwidth=refit
        )
        scores[i] = np.sum(augmented - local_base)

    logging.debug(f"[attack] gen_lra scored {X.shape[0]} points, k={k_used}, bandwidth={mode.value}")
    return AttackScores(AttackId.GEN_LRA, {"k": k_used, "bandwidth_mode": mode.value}, scores)
