####################################################################################################
# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License. See LICENSE in the project root for license information.
####################################################################################################

import logging
from dataclasses import asdict, dataclass
from typing import Tuple

import numpy as np
from scipy.special import expit

from ..Constants import LOGAN_ITERATIONS, LOGAN_L2, LOGAN_STEP
from ..Errors import AttackError
from .Inputs import shared_matrices
from .Scores import AttackId, AttackScores


@dataclass(frozen=True)
class LoganConfig:
    """Training budget of the synthetic-vs-reference classifier

    Attributes:
        iterations: full-batch gradient steps; no convergence test is made
        step: learning rate
        l2: ridge penalty on the weights (the intercept is not penalized)
    """
    iterations: int = LOGAN_ITERATIONS
    step: float = LOGAN_STEP
    l2: float = LOGAN_L2

    def __post_init__(self):
        if self.iterations < 0:
            raise AttackError(f"logan: iterations must be non-negative, got {self.iterations}")
        if not self.step > 0:
            raise AttackError(f"logan: step must be positive, got {self.step}")
        if self.l2 < 0:
            raise AttackError(f"logan: l2 must be non-negative, got {self.l2}")


def fit_logistic(features: np.ndarray, labels: np.ndarray, config: LoganConfig) -> Tuple[np.ndarray, float]:
    "L2-regularized logistic regression by full-batch gradient descent from zero weights"
    n, d = features.shape
    weights = np.zeros(d)
    bias = 0.0
    for _ in range(config.iterations):
        residual = expit(features @ weights + bias) - labels
        weights -= config.step * (features.T @ residual / n + config.l2 * weights)
        bias -= config.step * float(np.mean(residual))
    return weights, bias


def logan(S, R, X, train_config: LoganConfig = None) -> AttackScores:
    "Probability, under a classifier trained to tell S (1) from R (0), that each test point is synthetic"
    S, R, X = shared_matrices("logan", S=S, R=R, X=X)
    if S.shape[0] == 0 or R.shape[0] == 0:
        raise AttackError("logan needs both synthetic and reference rows to train a classifier")
    config = train_config or LoganConfig()

    features = np.vstack([S, R])
    labels = np.concatenate([np.ones(S.shape[0]), np.zeros(R.shape[0])])
    weights, bias = fit_logistic(features, labels, config)
    logging.debug(f"[attack] logan trained {config.iterations} iterations, |w|={np.linalg.norm(weights):.4g}")

    return AttackScores(AttackId.LOGAN, asdict(config), expit(X @ weights + bias))
