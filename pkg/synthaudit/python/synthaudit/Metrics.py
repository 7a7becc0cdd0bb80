####################################################################################################
# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License. See LICENSE in the project root for license information.
####################################################################################################

import json
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.stats import rankdata

from .Constants import DEFAULT_FPR_LEVELS
from .Errors import MetricError
from .attacks.Scores import AttackScores, decide

_TPR_PREFIX = "tpr@"


@dataclass(frozen=True, eq=False)
class LabeledScores:
    "Attack scores with their membership labels (1 = member of T)"
    scores: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        scores = np.asarray(getattr(self.scores, "scores", self.scores), dtype=np.float64).reshape(-1)
        labels = np.asarray(self.labels).reshape(-1)
        if len(scores) != len(labels):
            raise MetricError(f"{len(scores)} scores but {len(labels)} labels")
        if not np.all(np.isin(labels, (0, 1))):
            raise MetricError("Labels must be 0 or 1")
        if np.any(np.isnan(scores)):
            raise MetricError("Scores must not be NaN")
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "labels", labels.astype(np.int8))

    def __len__(self) -> int:
        return len(self.scores)

    @property
    def positives(self) -> np.ndarray:
        return self.scores[self.labels == 1]

    @property
    def negatives(self) -> np.ndarray:
        return self.scores[self.labels == 0]

    def require_both_classes(self):
        if not np.any(self.labels == 1) or not np.any(self.labels == 0):
            raise MetricError("Both members and non-members are required")


def mann_whitney_u(data: LabeledScores) -> float:
    "U statistic of the members: concordant pairs plus half the tied pairs, from midranks"
    data.require_both_classes()
    ranks = rankdata(data.scores, method="average")
    m1 = int(np.count_nonzero(data.labels == 1))
    return float(np.sum(ranks[data.labels == 1]) - m1 * (m1 + 1) / 2)


def auc_roc(data: LabeledScores) -> float:
    "Area under the empirical ROC curve, ties counted as one half"
    m1 = len(data.positives)
    m0 = len(data.negatives)
    return mann_whitney_u(data) / (m1 * m0)


def tpr_at_fpr(data: LabeledScores, fpr_levels: Sequence[float] = DEFAULT_FPR_LEVELS) -> Dict[float, float]:
    """True-positive rate at fixed false-positive rates, no interpolation

    For every level alpha, the threshold is the smallest gamma among -inf and the observed scores
    whose false-positive rate under the rule score > gamma is at most alpha.
    """
    data.require_both_classes()
    for alpha in fpr_levels:
        if not 0 < alpha < 1:
            raise MetricError(f"FPR levels must lie in (0, 1), got {alpha}")

    positives = np.sort(data.positives)
    negatives = np.sort(data.negatives)
    thresholds = np.concatenate([[-np.inf], np.unique(data.scores)])
    fpr = (len(negatives) - np.searchsorted(negatives, thresholds, side="right")) / len(negatives)
    tpr = (len(positives) - np.searchsorted(positives, thresholds, side="right")) / len(positives)

    result = {}
    for alpha in fpr_levels:
        # fpr is nonincreasing in the threshold and reaches 0 at the largest score
        first = int(np.argmax(fpr <= alpha))
        result[float(alpha)] = float(tpr[first])
    return result


def accuracy_at_median(data: LabeledScores) -> float:
    "Accuracy of the decisions score > median(scores)"
    if len(data) == 0:
        raise MetricError("No scores")
    bits = decide(data.scores, float(np.median(data.scores))).bits
    return float(np.mean(bits == data.labels))


@dataclass(frozen=True)
class EvalReport:
    """Metrics of one attack run on one labeled test set

    Attributes:
        attack_id: the attack's id, e.g. gen_lra
        attack: the attack's configured name, used as its key
        params: parameters the attack ran with
        seed, generator, n: coordinates of the benchmark cell, when there is one
    """
    attack_id: str
    auc: float
    tpr_at_fpr: Dict[float, float]
    accuracy_median: float
    params: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None
    attack: Optional[str] = None
    generator: Optional[str] = None
    n: Optional[int] = None

    def __post_init__(self):
        if self.attack is None:
            object.__setattr__(self, "attack", self.attack_id)
        for value in [self.auc, self.accuracy_median, *self.tpr_at_fpr.values()]:
            if not 0 <= value <= 1:
                raise MetricError(f"Metric value {value} outside [0, 1]")

    def to_dict(self) -> dict:
        return {
            "attack_id": self.attack_id,
            "attack": self.attack,
            "params": self.params,
            "generator": self.generator,
            "n": self.n,
            "seed": self.seed,
            "auc": self.auc,
            "tpr_at_fpr": {repr(k): v for k, v in self.tpr_at_fpr.items()},
            "accuracy_median": self.accuracy_median,
        }

    def to_json(self, indent: int = None) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=indent)

    @staticmethod
    def from_dict(doc: dict) -> "EvalReport":
        return EvalReport(
            attack_id=doc["attack_id"],
            attack=doc.get("attack"),
            params=doc.get("params", {}),
            generator=doc.get("generator"),
            n=doc.get("n"),
            seed=doc.get("seed"),
            auc=doc["auc"],
            tpr_at_fpr={float(k): v
                        for k, v in doc["tpr_at_fpr"].items()},
            accuracy_median=doc["accuracy_median"]
        )

    @staticmethod
    def from_json(text: str) -> "EvalReport":
        return EvalReport.from_dict(json.loads(text))


def evaluate(
    scores: AttackScores, labels, fpr_levels: Sequence[float] = DEFAULT_FPR_LEVELS, **coordinates
) -> EvalReport:
    "Computes every metric of one attack run; coordinates (seed, attack, generator, n) are recorded as given"
    data = LabeledScores(scores.scores, labels)
    return EvalReport(
        attack_id=scores.attack_id.value,
        params=scores.params,
        auc=auc_roc(data),
        tpr_at_fpr=tpr_at_fpr(data, fpr_levels),
        accuracy_median=accuracy_at_median(data),
        **coordinates
    )


def _frame(reports: Sequence[EvalReport]) -> pd.DataFrame:
    rows = []
    for r in reports:
        row = {
            "generator": r.generator or "",
            "n": r.n if r.n is not None else 0,
            "attack": r.attack,
            "seed": r.seed,
            "auc": r.auc,
            "accuracy_median": r.accuracy_median
        }
        row.update({_TPR_PREFIX + repr(alpha): v for alpha, v in r.tpr_at_fpr.items()})
        rows.append(row)
    return pd.DataFrame(rows)


def aggregate(reports: Sequence[EvalReport]) -> dict:
    """Summarizes reports across seeds and ranks attacks

    Returns a document with
        groups: per (generator, n, attack), mean and population deviation of every metric
        ranks: per (generator, n) cell, each attack's rank by descending mean AUC, ties averaged
        average_rank: per attack, its mean rank over the cells
    """
    if not reports:
        raise MetricError("Nothing to aggregate")
    frame = _frame(reports)
    metrics = [c for c in frame.columns if c not in ("generator", "n", "attack", "seed")]
    grouped = frame.groupby(["generator", "n", "attack"], sort=False)
    means = grouped[metrics].mean()
    stds = grouped[metrics].std(ddof=0).fillna(0.0)
    counts = grouped.size()

    groups = []
    for key in means.index:
        generator, n, attack = key
        entry = {"generator": generator, "n": int(n), "attack": attack, "seeds": int(counts[key])}
        tpr = {}
        for metric in metrics:
            stats = {"mean": float(means.at[key, metric]), "std": float(stds.at[key, metric])}
            if metric.startswith(_TPR_PREFIX):
                tpr[metric[len(_TPR_PREFIX):]] = stats
            else:
                entry[metric] = stats
        entry["tpr_at_fpr"] = tpr
        groups.append(entry)

    ranks = []
    auc = means["auc"].reset_index()
    for (generator, n), cell in auc.groupby(["generator", "n"], sort=False):
        for attack, rank in zip(cell["attack"], rankdata(-cell["auc"].to_numpy(), method="average")):
            ranks.append({"generator": generator, "n": int(n), "attack": attack, "rank": float(rank)})
    average_rank = pd.DataFrame(ranks).groupby("attack", sort=False)["rank"].mean()

    return {
        "groups": groups,
        "ranks": ranks,
        "average_rank": {attack: float(v) for attack, v in average_rank.items()},
    }


def _cell(stats: dict) -> str:
    return f"{stats['mean']:.3f} ({stats['std']:.2f})"


def render_summary_table(summary: dict) -> str:
    """Plain-text tables of an aggregate summary

    The AUC table has one row per (generator, n) and one column per attack, closed by the
    average-rank row; the TPR table has one row per (generator, n, attack) and one column per
    FPR level. Cells read "mean (std)".
    """
    groups = summary["groups"]
    attacks = list(dict.fromkeys(g["attack"] for g in groups))
    cells = list(dict.fromkeys((g["generator"], g["n"]) for g in groups))
    auc = {(g["generator"], g["n"], g["attack"]): _cell(g["auc"]) for g in groups}

    auc_rows = [{
        "generator": generator or "-",
        "n": str(n),
        **{a: auc.get((generator, n, a), "")
           for a in attacks}
    } for generator, n in cells]
    auc_rows.append({"generator": "Average Rank", "n": "", **{a: f"{summary['average_rank'][a]:.2f}" for a in attacks}})

    tpr_rows = [{
        "generator": g["generator"] or "-",
        "n": str(g["n"]),
        "attack": g["attack"],
        **{f"TPR@FPR={level}": _cell(stats)
           for level, stats in g["tpr_at_fpr"].items()}
    } for g in groups]

    return "\n".join([
        "AUC-ROC",
        pd.DataFrame(auc_rows).to_string(index=False),
        "",
        "TPR at fixed FPR",
        pd.DataFrame(tpr_rows).to_string(index=False),
        "",
    ])
