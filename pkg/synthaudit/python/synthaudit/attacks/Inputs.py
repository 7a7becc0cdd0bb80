####################################################################################################
# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License. See LICENSE in the project root for license information.
####################################################################################################

from typing import List, Union

import numpy as np

from ..Constants import FULL_SYNTHETIC_K
from ..Density import as_matrix
from ..Errors import AttackError, EncoderMismatch


def shared_matrices(attack: str, **named) -> List[np.ndarray]:
    """Unwraps the attack's input matrices, checking that they come from one encoder

    Keyword args name the inputs (S, R, X) for diagnostics. Plain arrays carry no encoder id
    and are only checked for a common width.
    """
    ids = {name: getattr(m, "encoder_id", None) for name, m in named.items()}
    known = {i for i in ids.values() if i is not None}
    if len(known) > 1:
        raise EncoderMismatch(f"{attack}: inputs were encoded by different encoders {ids}")

    matrices = [as_matrix(m, name) for name, m in named.items()]
    widths = {name: m.shape[1] for name, m in zip(named, matrices)}
    if len(set(widths.values())) > 1:
        raise EncoderMismatch(f"{attack}: inputs have different widths {widths}")
    return matrices


def require_rows(attack: str, name: str, matrix: np.ndarray, minimum: int):
    if matrix.shape[0] < minimum:
        raise AttackError(f"{attack} needs at least {minimum} rows in {name}, got {matrix.shape[0]}")


def resolve_k(attack: str, k: Union[int, str], available: int) -> int:
    "Resolves k, where the literal 'N' selects every available row"
    if isinstance(k, str):
        if k.upper() != FULL_SYNTHETIC_K:
            raise AttackError(f"{attack}: k must be a positive integer or '{FULL_SYNTHETIC_K}', got '{k}'")
        return available
    if isinstance(k, bool) or int(k) != k or not 1 <= k <= available:
        raise AttackError(f"{attack}: k must be in [1, {available}], got {k}")
    return int(k)
