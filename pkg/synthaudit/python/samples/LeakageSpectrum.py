####################################################################################################
# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License. See LICENSE in the project root for license information.
####################################################################################################

from typing import NamedTuple, Sequence
from synthaudit import AttackId, ExperimentConfig, K_ABLATION_GRID, RunRecord, run_experiment


class Options(NamedTuple):
    Population: str = "mixed_gaussian"
    NoiseFractions: Sequence[float] = [0.0, 0.05, 0.2]
    Sizes: Sequence[int] = [100, 250]
    Seeds: int = 5
    Workers: int = 1


def LeakageSpectrum(opts=Options()) -> ExperimentConfig:
    """Every attack against memorizers of decreasing fidelity, the parametric fit and the oracle

    A well-behaved attack's AUC falls from the exact memorizer towards 0.5 at the oracle.
    """
    generators = [{
        "kind": "memorizer",
        "name": f"memorizer_{fraction}",
        "noise_fraction": fraction
    } for fraction in opts.NoiseFractions]
    generators += [{"kind": "parametric_fit"}, {"kind": "population_oracle"}]

    return ExperimentConfig.from_dict({
        "population": {"sample": opts.Population},
        "generators": generators,
        "attacks": [a.value for a in AttackId],
        "n_sizes": list(opts.Sizes),
        "seeds": list(range(opts.Seeds)),
        "max_workers": opts.Workers
    })


def LocalizationAblation(opts=Options()) -> ExperimentConfig:
    "Gen-LRA over the neighbor-count grid, k = N scoring against every synthetic row"
    return ExperimentConfig.from_dict({
        "population": {"sample": opts.Population},
        "generators": [{"kind": "memorizer", "noise_fraction": opts.NoiseFractions[-1]}],
        "attacks": [{"attack": "gen_lra", "k": k, "name": f"gen_lra_k{k}"} for k in K_ABLATION_GRID],
        "n_sizes": list(opts.Sizes),
        "seeds": list(range(opts.Seeds)),
        "max_workers": opts.Workers
    })


def Run(config: ExperimentConfig, output_dir: str = None) -> RunRecord:
    record = run_experiment(config, output_dir)
    print(record.summary_table())
    return record
