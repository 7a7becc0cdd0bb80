####################################################################################################
# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License. See LICENSE in the project root for license information.
#
# Project-wide seeded random streams. Every seeded operation draws from numpy's PCG64 bit
# generator initialized through a SeedSequence, so results are bit-reproducible across platforms.
####################################################################################################

from enum import Enum
from typing import Union

import numpy as np


class Stage(Enum):
    "Independent random streams used within one benchmark cell"
    POPULATION = 1
    SPLIT = 2
    GENERATE = 3
    ATTACK = 4


def make_rng(seed: int, stage: Union[Stage, int, None] = None) -> np.random.Generator:
    """Creates the PCG64 generator for a seed, optionally keyed by a stage

    Args:
        seed: the user-facing seed
        stage: a stage key; distinct stages of the same seed never share a stream
    """
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF]
    if stage is not None:
        entropy.append(stage.value if isinstance(stage, Stage) else int(stage))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))
