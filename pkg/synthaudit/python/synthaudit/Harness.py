####################################################################################################
# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License. See LICENSE in the project root for license information.
#
# Benchmark harness: population sampling, disjoint T/R/H splits, generation, encoding, attacks
# and metrics over the Cartesian product of generators x attacks x sizes x seeds, with per-cell
# result files that make interrupted runs resumable.
####################################################################################################

import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum, unique
from functools import lru_cache
from hashlib import md5
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import yaml

from .Constants import DEFAULT_FPR_LEVELS, FULL_SYNTHETIC_K
from .Dataset import SplitTriple, TabularDataset, load_csv, split_disjoint
from .Encoders import EncodingStrategy, encode, fit_encoder
from .Errors import AttackError, ConfigError, EncodingError, SynthAuditError
from .Generators import (
    GeneratorKind, GeneratorSpec, PopulationSpec, dcr_train_distance, generate, identical_match_fraction,
    sample_population, sample_population_spec
)
from .Metrics import EvalReport, aggregate, evaluate, render_summary_table
from .Neighbors import Metric
from .Parameter import create_parameter_grid
from .attacks import AttackId, AttackScores, BandwidthMode, LoganConfig, attack_info, check_parameters, run_attack

SUMMARY_JSON = "summary.json"
SUMMARY_TEXT = "summary.txt"
TIMINGS_JSON = "timings.json"


@unique
class EncoderFit(Enum):
    SYNTHETIC = "synthetic"    #: statistics on S, category vocabulary on S + R + X
    POOLED = "pooled"    #: statistics and vocabulary on S + R + X


@dataclass(frozen=True)
class AttackConfig:
    attack_id: AttackId
    name: str
    encoding: EncodingStrategy
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class PopulationSource:
    "Where the 3n rows of a cell come from: a population spec, or rows of a CSV file"
    spec: Optional[PopulationSpec] = None
    csv: Optional[str] = None

    def rows(self, n: int, seed: int) -> TabularDataset:
        if self.spec is not None:
            return sample_population(self.spec, 3 * n, seed)
        return _load_cached(self.csv)

    def describe(self) -> dict:
        if self.spec is not None:
            return {"spec": self.spec.to_dict()}
        with open(self.csv, "rb") as f:
            return {"csv": os.path.basename(self.csv), "md5": md5(f.read()).hexdigest()}


@lru_cache(maxsize=4)
def _load_cached(path: str) -> TabularDataset:
    return load_csv(path)


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """One benchmark: every combination of generator, attack, size and seed is a cell

    Attributes:
        population: the data source
        generators, attacks: what is run in each cell
        n_sizes: sizes of T, R, H and S
        seeds: cell seeds
        encoder_fit: which rows the encoders are fitted on
        bandwidth_mode: Gen-LRA bandwidth mode for attacks that do not set their own
        fpr_levels: FPR operating points of the TPR metric
        output_dir: default output directory
        max_workers: number of worker processes; 1 runs cells in this process
    """
    population: PopulationSource
    generators: Tuple[GeneratorSpec, ...]
    attacks: Tuple[AttackConfig, ...]
    n_sizes: Tuple[int, ...]
    seeds: Tuple[int, ...]
    encoder_fit: EncoderFit = EncoderFit.SYNTHETIC
    bandwidth_mode: BandwidthMode = BandwidthMode.SHARED
    fpr_levels: Tuple[float, ...] = DEFAULT_FPR_LEVELS
    output_dir: Optional[str] = None
    max_workers: int = 1

    @property
    def config_hash(self) -> str:
        "Stable hash of everything that affects cell results"
        doc = {
            "population": self.population.describe(),
            "generators": [{
                "name": g.name,
                "kind": g.kind.value,
                "params": g.params(),
                "population": g.population.to_dict() if g.population else None
            } for g in self.generators],
            "attacks": [{
                "attack": a.attack_id.value,
                "name": a.name,
                "encoding": a.encoding.value,
                "params": a.params
            } for a in self.attacks],
            "n_sizes": list(self.n_sizes),
            "seeds": list(self.seeds),
            "encoder_fit": self.encoder_fit.value,
            "bandwidth_mode": self.bandwidth_mode.value,
            "fpr_levels": list(self.fpr_levels),
        }
        return md5(json.dumps(doc, sort_keys=True).encode("utf-8")).hexdigest()[:12]

    def attack_params(self, attack: AttackConfig) -> Dict[str, Any]:
        params = dict(attack.params)
        if attack.attack_id == AttackId.GEN_LRA:
            params.setdefault("bandwidth_mode", self.bandwidth_mode.value)
        return params

    @staticmethod
    def from_dict(doc: dict, base_dir: str = None) -> "ExperimentConfig":
        return _parse_config(doc, base_dir or os.getcwd())


def load_config(path: str) -> ExperimentConfig:
    "Loads an experiment config from a JSON (or YAML) file; relative CSV paths resolve against its folder"
    if not os.path.exists(path):
        raise ConfigError("$", f"config file does not exist: {path}")
    with open(path, "r", encoding="utf-8") as f:
        try:
            doc = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError("$", f"not a valid JSON document: {e}") from e
    return ExperimentConfig.from_dict(doc, os.path.dirname(os.path.abspath(path)))


def _expect(value, types, path: str, what: str):
    if isinstance(value, bool) or not isinstance(value, types):
        raise ConfigError(path, f"expected {what}")
    return value


def _parse_population(doc, base_dir: str) -> PopulationSource:
    path = "$.population"
    _expect(doc, dict, path, "an object")
    if "csv" in doc:
        csv = _expect(doc["csv"], str, f"{path}.csv", "a file path")
        csv = csv if os.path.isabs(csv) else os.path.join(base_dir, csv)
        if not os.path.isfile(csv):
            raise ConfigError(f"{path}.csv", f"no such file: {csv}")
        return PopulationSource(csv=csv)
    if "sample" in doc:
        try:
            return PopulationSource(spec=sample_population_spec(doc["sample"]))
        except ValueError as e:
            raise ConfigError(f"{path}.sample", str(e)) from e
    return PopulationSource(spec=PopulationSpec.from_dict(doc, path))


def _parse_generator(doc, path: str, population: PopulationSource) -> GeneratorSpec:
    _expect(doc, dict, path, "an object")
    unknown = set(doc) - {"kind", "name", "noise_fraction", "resample_probability", "population"}
    if unknown:
        raise ConfigError(path, f"unknown fields {sorted(unknown)}")
    try:
        kind = GeneratorKind(doc.get("kind"))
    except ValueError:
        raise ConfigError(f"{path}.kind", f"expected one of {[k.value for k in GeneratorKind]}") from None

    spec = None
    if kind == GeneratorKind.POPULATION_ORACLE:
        if "population" in doc:
            spec = PopulationSpec.from_dict(doc["population"], f"{path}.population")
        elif population.spec is not None:
            spec = population.spec
        else:
            raise ConfigError(f"{path}.population", "population_oracle over a CSV source needs its own population")

    kwargs = {k: doc[k] for k in ("noise_fraction", "resample_probability") if k in doc}
    for k, v in kwargs.items():
        _expect(v, (int, float), f"{path}.{k}", "a number")
    try:
        return GeneratorSpec(kind=kind, population=spec, name=doc.get("name"), **kwargs)
    except ValueError as e:
        raise ConfigError(path, str(e)) from e


def _check_attack_value(attack_id: AttackId, key: str, value, path: str):
    try:
        if key == "k":
            if value != FULL_SYNTHETIC_K and (isinstance(value, bool) or not isinstance(value, int) or value < 1):
                raise ValueError(f"expected a positive integer or '{FULL_SYNTHETIC_K}'")
        elif key == "metric":
            Metric(value)
        elif key == "bandwidth_mode":
            BandwidthMode.parse(value)
        elif key == "radius":
            if value is not None and (not isinstance(value, (int, float)) or not value > 0):
                raise ValueError("expected a positive number")
    except (ValueError, AttackError) as e:
        raise ConfigError(path, str(e)) from e


def _parse_attack(doc, path: str) -> AttackConfig:
    if isinstance(doc, str):
        doc = {"attack": doc}
    _expect(doc, dict, path, "an object or an attack name")
    try:
        attack_id = AttackId.parse(doc.get("attack"))
    except AttackError:
        raise ConfigError(f"{path}.attack", f"expected one of {[a.value for a in AttackId]}") from None
    info = attack_info(attack_id)

    params = {k: v for k, v in doc.items() if k not in ("attack", "name", "encoding")}
    try:
        check_parameters(attack_id, params)
    except AttackError as e:
        raise ConfigError(path, str(e)) from e
    for key, value in params.items():
        _check_attack_value(attack_id, key, value, f"{path}.{key}")
    if attack_id == AttackId.LOGAN:
        try:
            LoganConfig(**params)
        except (AttackError, TypeError) as e:
            raise ConfigError(path, str(e)) from e

    try:
        encoding = EncodingStrategy.parse(doc.get("encoding", info.default_encoding))
    except EncodingError as e:
        raise ConfigError(f"{path}.encoding", str(e)) from e
    name = _expect(doc.get("name", attack_id.value), str, f"{path}.name", "a string")
    return AttackConfig(attack_id=attack_id, name=name, encoding=encoding, params=params)


def _parse_list(doc: dict, key: str, parse) -> tuple:
    value = doc.get(key)
    if not isinstance(value, list) or not value:
        raise ConfigError(f"$.{key}", "expected a non-empty list")
    return tuple(parse(v, f"$.{key}[{i}]") for i, v in enumerate(value))


def _unique_names(items, key: str):
    seen = set()
    for i, item in enumerate(items):
        if item.name in seen:
            raise ConfigError(f"$.{key}[{i}].name", f"duplicate name '{item.name}'")
        seen.add(item.name)


def _parse_config(doc, base_dir: str) -> ExperimentConfig:
    _expect(doc, dict, "$", "an object")
    unknown = set(doc) - {
        "population", "generators", "attacks", "n_sizes", "seeds", "encoder_fit", "bandwidth_mode", "fpr_levels",
        "output_dir", "max_workers"
    }
    if unknown:
        raise ConfigError("$", f"unknown fields {sorted(unknown)}")
    if "population" not in doc:
        raise ConfigError("$.population", "missing")

    population = _parse_population(doc["population"], base_dir)
    generators = _parse_list(doc, "generators", lambda v, p: _parse_generator(v, p, population))
    attacks = _parse_list(doc, "attacks", _parse_attack)
    _unique_names(generators, "generators")
    _unique_names(attacks, "attacks")

    def positive_int(v, p):
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise ConfigError(p, "expected a positive integer")
        return v

    def integer(v, p):
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(p, "expected an integer")
        return v

    def level(v, p):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not 0 < v < 1:
            raise ConfigError(p, "expected a number in (0, 1)")
        return float(v)

    n_sizes = _parse_list(doc, "n_sizes", positive_int)
    seeds = _parse_list(doc, "seeds", integer)
    fpr_levels = _parse_list(doc, "fpr_levels", level) if "fpr_levels" in doc else DEFAULT_FPR_LEVELS

    try:
        encoder_fit = EncoderFit(doc.get("encoder_fit", EncoderFit.SYNTHETIC.value))
    except ValueError:
        raise ConfigError("$.encoder_fit", f"expected one of {[e.value for e in EncoderFit]}") from None
    try:
        bandwidth_mode = BandwidthMode.parse(doc.get("bandwidth_mode", BandwidthMode.SHARED.value))
    except AttackError as e:
        raise ConfigError("$.bandwidth_mode", str(e)) from e

    if population.csv is not None:
        rows = len(_load_cached(population.csv))
        for i, n in enumerate(n_sizes):
            if 3 * n > rows:
                raise ConfigError(f"$.n_sizes[{i}]", f"3 x {n} rows needed, {population.csv} has {rows}")

    output_dir = doc.get("output_dir")
    if output_dir is not None:
        output_dir = _expect(output_dir, str, "$.output_dir", "a directory path")
        output_dir = output_dir if os.path.isabs(output_dir) else os.path.join(base_dir, output_dir)

    return ExperimentConfig(
        population=population,
        generators=generators,
        attacks=attacks,
        n_sizes=n_sizes,
        seeds=seeds,
        encoder_fit=encoder_fit,
        bandwidth_mode=bandwidth_mode,
        fpr_levels=fpr_levels,
        output_dir=output_dir,
        max_workers=positive_int(doc.get("max_workers", 1), "$.max_workers")
    )


@dataclass(frozen=True, eq=False)
class CellData:
    "The rows shared by every attack of one (generator, n, seed) cell"
    split: SplitTriple
    synthetic: TabularDataset
    test: TabularDataset
    labels: np.ndarray


def prepare_cell(config: ExperimentConfig, generator: GeneratorSpec, n: int, seed: int) -> CellData:
    split = split_disjoint(config.population.rows(n, seed), n, seed)
    synthetic = generate(generator, split.train, n, seed)
    if [(c.name, c.kind) for c in synthetic.schema] != [(c.name, c.kind) for c in split.train.schema]:
        raise EncodingError(f"{generator.name} produced columns that differ from the population's")
    if synthetic.schema != split.train.schema:
        # same columns, categories declared by a different population
        synthetic = TabularDataset.from_rows(split.train.schema, synthetic.rows)
    test = TabularDataset.concat([split.train, split.holdout])
    labels = np.concatenate([np.ones(n, dtype=np.int8), np.zeros(n, dtype=np.int8)])
    return CellData(split=split, synthetic=synthetic, test=test, labels=labels)


def fit_cell_encoder(strategy: EncodingStrategy, data: CellData, encoder_fit: EncoderFit):
    "Fits an attack's encoder on S, R and X only; labels are never consulted"
    pool = [data.synthetic, data.split.reference, data.test]
    if encoder_fit == EncoderFit.POOLED:
        return fit_encoder(strategy, pool)
    return fit_encoder(strategy, [data.synthetic], vocabulary_data=pool)


@dataclass
class CellRecord:
    "Outcome of one (generator, attack, n, seed) cell"
    generator: str
    attack: str
    n: int
    seed: int
    scores: Optional[AttackScores] = None
    labels: Optional[np.ndarray] = None
    report: Optional[EvalReport] = None
    diagnostics: Dict[str, float] = field(default_factory=dict)
    error: Optional[Dict[str, str]] = None
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def key(self) -> str:
        return f"{self.generator}_{self.attack}_{self.n}_{self.seed}"

    def to_dict(self) -> dict:
        doc = {"generator": self.generator, "attack": self.attack, "n": self.n, "seed": self.seed}
        if self.error is not None:
            doc["error"] = self.error
        else:
            doc["scores"] = self.scores.to_dict()
            doc["labels"] = self.labels.tolist()
            doc["report"] = self.report.to_dict()
            doc["diagnostics"] = self.diagnostics
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"

    @staticmethod
    def from_dict(doc: dict) -> "CellRecord":
        record = CellRecord(doc["generator"], doc["attack"], doc["n"], doc["seed"], error=doc.get("error"))
        if record.error is None:
            record.scores = AttackScores.from_dict(doc["scores"])
            record.labels = np.asarray(doc["labels"], dtype=np.int8)
            record.report = EvalReport.from_dict(doc["report"])
            record.diagnostics = doc.get("diagnostics", {})
        return record


def score_cell(
    config: ExperimentConfig,
    generator: GeneratorSpec,
    attack: AttackConfig,
    n: int,
    seed: int,
    data: CellData = None,
    raise_errors: bool = False
) -> CellRecord:
    "Runs one cell; stage errors are recorded on the returned record"
    record = CellRecord(generator.name, attack.name, n, seed)
    stage = "prepare"
    try:
        start = time.perf_counter()
        if data is None:
            data = prepare_cell(config, generator, n, seed)
        record.timings[stage] = time.perf_counter() - start

        stage, start = "encode", time.perf_counter()
        encoder = fit_cell_encoder(attack.encoding, data, config.encoder_fit)
        S, R, X = (encode(encoder, d) for d in (data.synthetic, data.split.reference, data.test))
        record.timings[stage] = time.perf_counter() - start

        stage, start = "attack", time.perf_counter()
        scores = run_attack(attack.attack_id, S, R, X, **config.attack_params(attack))
        record.timings[stage] = time.perf_counter() - start

        stage, start = "evaluate", time.perf_counter()
        record.report = evaluate(
            scores, data.labels, config.fpr_levels, seed=seed, attack=attack.name, generator=generator.name, n=n
        )
        record.scores, record.labels = scores, data.labels
        record.diagnostics = {
            "identical_match_fraction": identical_match_fraction(data.synthetic, data.split.train),
            "dcr_train_distance": dcr_train_distance(S, X.take(np.flatnonzero(data.labels == 1))),
        }
        record.timings[stage] = time.perf_counter() - start
    except (SynthAuditError, ArithmeticError, ValueError) as e:
        if raise_errors:
            raise
        logging.warning(f"[harness] Cell {record.key} failed at {stage}: {type(e).__name__}: {e}")
        record.error = {"stage": stage, "type": type(e).__name__, "message": str(e)}
    return record


def run_cell(
    config: ExperimentConfig, generator: GeneratorSpec, attack: AttackConfig, n: int, seed: int
) -> EvalReport:
    "Runs one cell and returns its report; stage errors propagate"
    return score_cell(config, generator, attack, n, seed, raise_errors=True).report


@dataclass
class RunRecord:
    "Everything a benchmark run produced"
    config_hash: str
    cells: List[CellRecord]
    summary: dict
    output_dir: Optional[str] = None

    @property
    def reports(self) -> List[EvalReport]:
        return [c.report for c in self.cells if c.report is not None]

    @property
    def errors(self) -> List[CellRecord]:
        return [c for c in self.cells if c.error is not None]

    def summary_document(self) -> dict:
        return {
            "config_hash": self.config_hash,
            "cells": len(self.cells),
            "errors": [dict(c.to_dict(), key=c.key) for c in self.errors],
            **self.summary
        }

    def summary_table(self) -> str:
        if not self.summary["groups"]:
            return "No completed cells\n"
        return render_summary_table(self.summary)


def _cell_path(cells_dir: str, record_key: str) -> str:
    return os.path.join(cells_dir, f"{record_key}.json")


def _write_text(path: str, text: str):
    # a cell file is either complete or absent
    partial = path + ".partial"
    with open(partial, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    os.replace(partial, path)


def _run_group(
    config: ExperimentConfig, generator: GeneratorSpec, n: int, seed: int, attacks: List[AttackConfig], cells_dir: str
) -> List[CellRecord]:
    "Runs the attacks of one (generator, n, seed) on shared cell data, persisting each cell"
    records = []
    start = time.perf_counter()
    try:
        data = prepare_cell(config, generator, n, seed)
        prepare_error = None
    except (SynthAuditError, ArithmeticError, ValueError) as e:
        data, prepare_error = None, e
    prepared = time.perf_counter() - start

    for attack in attacks:
        if prepare_error is not None:
            record = CellRecord(generator.name, attack.name, n, seed)
            record.error = {"stage": "prepare", "type": type(prepare_error).__name__, "message": str(prepare_error)}
            logging.warning(f"[harness] Cell {record.key} failed at prepare: {prepare_error}")
        else:
            record = score_cell(config, generator, attack, n, seed, data)
        record.timings["prepare"] = prepared
        if cells_dir is not None:
            _write_text(_cell_path(cells_dir, record.key), record.to_json())
        records.append(record)
    return records


def run_experiment(config: ExperimentConfig, output_dir: str = None, resume: bool = False) -> RunRecord:
    """Runs every cell of an experiment and aggregates the reports

    Args:
        config: the experiment
        output_dir: where cells/<hash>/*.json, timings.json, summary.json and summary.txt are written;
            defaults to config.output_dir; nothing is persisted when both are None
        resume: reuse cell files already present for this config hash instead of recomputing them
    """
    config_hash = config.config_hash
    output_dir = output_dir or config.output_dir
    cells_dir = None
    if output_dir is not None:
        cells_dir = os.path.join(output_dir, "cells", config_hash)
        os.makedirs(cells_dir, exist_ok=True)

    grid = create_parameter_grid({
        "generator": config.generators,
        "n": config.n_sizes,
        "seed": config.seeds,
    })
    logging.info(
        f"[harness] {config_hash}: {len(grid) * len(config.attacks)} cells "
        f"({len(config.generators)} generators x {len(config.attacks)} attacks x "
        f"{len(config.n_sizes)} sizes x {len(config.seeds)} seeds)"
    )

    completed: Dict[str, CellRecord] = {}
    jobs = []
    for cell in grid:
        missing = []
        for attack in config.attacks:
            key = CellRecord(cell["generator"].name, attack.name, cell["n"], cell["seed"]).key
            path = _cell_path(cells_dir, key) if cells_dir else None
            if resume and path and os.path.isfile(path):
                with open(path, "r", encoding="utf-8") as f:
                    completed[key] = CellRecord.from_dict(json.load(f))
            else:
                missing.append(attack)
        if missing:
            jobs.append((cell["generator"], cell["n"], cell["seed"], missing))
    if resume:
        logging.info(f"[harness] Resuming: {len(completed)} cells already complete")

    if config.max_workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.max_workers) as executor:
            futures = [
                executor.submit(_run_group, config, g, n, seed, attacks, cells_dir) for g, n, seed, attacks in jobs
            ]
            results = [f.result() for f in futures]
    else:
        results = [_run_group(config, g, n, seed, attacks, cells_dir) for g, n, seed, attacks in jobs]
    for records in results:
        completed.update((r.key, r) for r in records)

    # config order, independent of scheduling
    cells = [
        completed[CellRecord(cell["generator"].name, attack.name, cell["n"], cell["seed"]).key]
        for cell in grid
        for attack in config.attacks
    ]
    reports = [c.report for c in cells if c.report is not None]
    summary = aggregate(reports) if reports else {"groups": [], "ranks": [], "average_rank": {}}
    record = RunRecord(config_hash=config_hash, cells=cells, summary=summary, output_dir=output_dir)

    if output_dir is not None:
        timings = {c.key: c.timings for c in cells if c.timings}
        timings_path = os.path.join(cells_dir, TIMINGS_JSON)
        if resume and os.path.isfile(timings_path):
            with open(timings_path, "r", encoding="utf-8") as f:
                timings = dict(json.load(f), **timings)
        _write_text(timings_path, json.dumps(timings, sort_keys=True, indent=1) + "\n")
        _write_text(
            os.path.join(output_dir, SUMMARY_JSON),
            json.dumps(record.summary_document(), sort_keys=True, indent=1) + "\n"
        )
        _write_text(os.path.join(output_dir, SUMMARY_TEXT), record.summary_table())

    if record.errors:
        logging.warning(f"[harness] {len(record.errors)} of {len(cells)} cells failed")
    return record
