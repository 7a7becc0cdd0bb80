####################################################################################################
# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License. See LICENSE in the project root for license information.
####################################################################################################

import json
from dataclasses import dataclass
from enum import Enum, unique
from typing import Any, Dict, Union

import numpy as np

from ..Errors import AttackError


@unique
class AttackId(Enum):
    GEN_LRA = "gen_lra"
    DOMIAS = "domias"
    DCR = "dcr"
    DCR_DIFF = "dcr_diff"
    MC = "mc"
    DPI = "dpi"
    LOGAN = "logan"

    @staticmethod
    def parse(value) -> "AttackId":
        if isinstance(value, AttackId):
            return value
        try:
            return AttackId(str(value).lower().replace("-", "_"))
        except ValueError:
            raise AttackError(f"Unknown attack '{value}'")

    @property
    def label(self) -> str:
        "Command-line spelling, e.g. gen-lra"
        return self.value.replace("_", "-")


@dataclass(frozen=True, eq=False)
class AttackScores:
    """Per-test-point membership scores of one attack configuration, larger meaning member

    Attributes:
        attack_id: the attack that produced the scores
        params: the complete parameters the attack ran with
        scores: one finite score per test row, aligned with the test matrix
    """
    attack_id: AttackId
    params: Dict[str, Any]
    scores: np.ndarray

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(scores)):
            raise AttackError(f"{self.attack_id.value} produced non-finite scores")
        scores.setflags(write=False)
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "params", dict(self.params))

    def __len__(self) -> int:
        return len(self.scores)

    def to_dict(self) -> dict:
        return {"attack": self.attack_id.value, "params": self.params, "scores": self.scores.tolist()}

    def to_json(self, indent: int = None) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=indent)

    @staticmethod
    def from_dict(doc: dict) -> "AttackScores":
        try:
            return AttackScores(AttackId.parse(doc["attack"]), doc.get("params", {}), doc["scores"])
        except (KeyError, TypeError) as e:
            raise AttackError(f"Malformed scores document: {e}") from e

    @staticmethod
    def from_json(text: str) -> "AttackScores":
        return AttackScores.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class MembershipPrediction:
    "Member bits under the rule bits[i] = 1 iff scores[i] > threshold"
    bits: np.ndarray
    threshold: float


def decide(scores: Union[AttackScores, np.ndarray], threshold: float) -> MembershipPrediction:
    values = scores.scores if isinstance(scores, AttackScores) else np.asarray(scores, dtype=np.float64)
    return MembershipPrediction(bits=(values > threshold).astype(np.int8), threshold=float(threshold))
