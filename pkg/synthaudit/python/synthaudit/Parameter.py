####################################################################################################
# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License. See LICENSE in the project root for license information.
####################################################################################################

import itertools
from typing import Callable, List

from .Random import make_rng


def create_parameter_grid(
    parameter_choices: dict, filter_func: Callable = None, sample: int = 0, seed: int = 0
) -> List[dict]:
    """
    Create a parameter grid from a dictionary that maps each parameter to its possible values,
    with/without a filter and a number of samples.

        Returns a list of dictionaries {parameter: value}, in the order of the Cartesian product
        (the last parameter varies fastest).

        Args:
            parameter_choices: A dictionary that maps each parameter to its possible values, e.g.
                                        {
                                            "generator": [memorizer, oracle],
                                            "n": [250, 1000],
                                            "seed": range(10)
                                        }
                               A value that is not iterable is a single choice.

            filter_func: A callable taking one parameter combination (a tuple, in key order) and returning
                         whether it belongs in the grid.
            sample: A number to limit the size of the grid; combinations are drawn without replacement by
                    a generator seeded with seed and kept in grid order.
    """
    choices = []
    keys = []

    for key, value in parameter_choices.items():
        if isinstance(value, (str, bytes, dict)):
            value = [value]
        try:
            _ = iter(value)
        except TypeError:
            value = [value]
        choices.append(list(value))
        keys.append(key)

    variants = list(filter(filter_func, itertools.product(*choices)))
    if 0 < sample < len(variants):
        picked = make_rng(seed).choice(len(variants), size=sample, replace=False)
        variants = [variants[i] for i in sorted(picked)]

    return [dict(zip(keys, variant)) for variant in variants]
