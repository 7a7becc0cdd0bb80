####################################################################################################
# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License. See LICENSE in the project root for license information.
####################################################################################################

from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet

from ..Encoders import EncodingStrategy
from ..Errors import AttackError
from .Baselines import dcr, dcr_diff, domias, dpi, mc
from .GenLra import gen_lra
from .Logan import LoganConfig, logan
from .Scores import AttackId, AttackScores


@dataclass(frozen=True)
class AttackInfo:
    "What an attack consumes: whether it reads R, its encoding arm and its parameter names"
    attack_id: AttackId
    uses_reference: bool
    default_encoding: EncodingStrategy
    parameters: FrozenSet[str]
    run: Callable[..., AttackScores]


def _logan(S, R, X, **params):
    return logan(S, R, X, LoganConfig(**params))


ATTACKS: Dict[AttackId, AttackInfo] = {
    info.attack_id: info
    for info in (
        AttackInfo(
            AttackId.GEN_LRA, True, EncodingStrategy.ORDINAL_STANDARDIZE, frozenset({"k", "bandwidth_mode"}),
            gen_lra
        ),
        AttackInfo(
            AttackId.DOMIAS, True, EncodingStrategy.ORDINAL_STANDARDIZE, frozenset(),
            domias
        ),
        AttackInfo(
            AttackId.DCR, False, EncodingStrategy.ONE_HOT_SCALE, frozenset({"metric"}),
            lambda S, R, X, **p: dcr(S, X, **p)
        ),
        AttackInfo(
            AttackId.DCR_DIFF, True, EncodingStrategy.ONE_HOT_SCALE, frozenset({"metric"}),
            dcr_diff
        ),
        AttackInfo(
            AttackId.MC, False, EncodingStrategy.ONE_HOT_SCALE, frozenset({"radius", "metric"}),
            lambda S, R, X, **p: mc(S, X, **p)
        ),
        AttackInfo(
            AttackId.DPI, True, EncodingStrategy.ONE_HOT_SCALE, frozenset({"k", "metric"}),
            dpi
        ),
        AttackInfo(
            AttackId.LOGAN, True, EncodingStrategy.ONE_HOT_SCALE, frozenset({"iterations", "step", "l2"}), _logan
        ),
    )
}


def attack_info(attack) -> AttackInfo:
    return ATTACKS[AttackId.parse(attack)]


def check_parameters(attack, params: dict):
    info = attack_info(attack)
    unknown = sorted(set(params) - info.parameters)
    if unknown:
        raise AttackError(f"{info.attack_id.value} does not take parameters {unknown}")


def run_attack(attack, S, R, X, **params) -> AttackScores:
    """Runs one attack by id on encoded S, R and X

    R may be None for attacks that do not read the reference sample.
    """
    info = attack_info(attack)
    check_parameters(info.attack_id, params)
    if info.uses_reference and R is None:
        raise AttackError(f"{info.attack_id.value} needs a reference sample")
    return info.run(S, R, X, **params)
