#!/usr/bin/env python3
####################################################################################################
# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License. See LICENSE in the project root for license information.
#
# Command line front end. stdout carries only the JSON payload (or the summary table);
# diagnostics go to stderr. Exit codes: 0 success, 2 usage or input error, 1 internal error.
####################################################################################################

import argparse
import json
import logging
import os
import sys
from dataclasses import replace

import numpy as np

from .Constants import DEFAULT_FPR_LEVELS, DEFAULT_K, FULL_SYNTHETIC_K, OUTPUT_DIR_ENV
from .Dataset import load_csv, load_csv_group
from .Encoders import EncodingStrategy, encode, fit_encoder
from .Errors import SynthAuditError
from .Harness import load_config, run_experiment
from .Metrics import evaluate
from .attacks import AttackId, AttackScores, attack_info, run_attack

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INPUT = 2


class UsageError(SynthAuditError):
    "A required flag is missing or flags conflict"


def _k_value(text: str):
    if text.upper() == FULL_SYNTHETIC_K:
        return FULL_SYNTHETIC_K
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer or '{FULL_SYNTHETIC_K}', got '{text}'")
    if k < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {k}")
    return k


def _fpr_levels(text: str):
    try:
        levels = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'")
    if not all(0 < v < 1 for v in levels):
        raise argparse.ArgumentTypeError(f"FPR levels must lie in (0, 1), got '{text}'")
    return levels


def _dump(doc_json: str):
    sys.stdout.write(doc_json + "\n")


def add_audit_args(parser):
    parser.add_argument("--synthetic", required=True, help="CSV of the released synthetic data")
    parser.add_argument("--reference", help="CSV of a reference sample from the population")
    parser.add_argument("--test", required=True, help="CSV of the records to score")
    parser.add_argument(
        "--attack",
        default=AttackId.GEN_LRA.label,
        choices=[a.label for a in AttackId],
        help="Attack to run (default: %(default)s)"
    )
    parser.add_argument(
        "--k",
        type=_k_value,
        default=DEFAULT_K,
        help=f"Neighbors used by gen-lra and dpi, or {FULL_SYNTHETIC_K} for all synthetic rows (default: %(default)s)"
    )
    parser.add_argument(
        "--encoding",
        choices=[e.value.replace("_", "-") for e in EncodingStrategy],
        help="Feature encoding (default: ordinal-standardize for density attacks, one-hot-scale otherwise)"
    )
    parser.add_argument("--radius", type=float, help="mc neighborhood radius (default: median closest distance)")
    parser.add_argument("--bandwidth-mode", choices=["shared", "refit"], help="gen-lra augmented bandwidth")
    parser.add_argument(
        "--encoder-fit",
        choices=["synthetic", "pooled"],
        default="synthetic",
        help="Fit encoder statistics on the synthetic rows only, or on all rows (default: %(default)s)"
    )
    parser.add_argument(
        "--seed", type=int, default=0, help="Accepted for scripted pipelines; every attack is deterministic"
    )
    parser.add_argument("--pretty", action="store_true", help="Indent the JSON output")


def cmd_audit(args) -> int:
    attack = AttackId.parse(args.attack)
    info = attack_info(attack)
    if info.uses_reference and args.reference is None:
        raise UsageError(f"--reference is required for --attack {attack.label}")
    if not info.uses_reference and args.reference is not None:
        logging.warning(f"--attack {attack.label} uses the synthetic data only; ignoring --reference")

    paths = [args.synthetic, args.test] + ([args.reference] if info.uses_reference else [])
    _, datasets = load_csv_group(paths)
    synthetic, test = datasets[0], datasets[1]
    reference = datasets[2] if info.uses_reference else None

    strategy = EncodingStrategy.parse(args.encoding or info.default_encoding)
    pool = [d for d in (synthetic, reference, test) if d is not None]
    if args.encoder_fit == "pooled":
        encoder = fit_encoder(strategy, pool)
    else:
        encoder = fit_encoder(strategy, [synthetic], vocabulary_data=pool)
    logging.info(f"[audit] encoder {encoder.encoder_id}: {encoder.to_json()}")

    params = {}
    if "k" in info.parameters:
        params["k"] = args.k
    if "radius" in info.parameters and args.radius is not None:
        params["radius"] = args.radius
    if "bandwidth_mode" in info.parameters and args.bandwidth_mode is not None:
        params["bandwidth_mode"] = args.bandwidth_mode

    S = encode(encoder, synthetic)
    R = encode(encoder, reference) if reference is not None else None
    X = encode(encoder, test)
    scores = run_attack(attack, S, R, X, **params)
    _dump(scores.to_json(indent=2 if args.pretty else None))
    return EXIT_OK


def add_evaluate_args(parser):
    parser.add_argument("--scores", required=True, help="Scores JSON written by the audit command")
    parser.add_argument("--labels", required=True, help="CSV with a header and a single 0/1 column, 1 = member")
    parser.add_argument(
        "--fpr",
        type=_fpr_levels,
        default=DEFAULT_FPR_LEVELS,
        help="Comma-separated FPR levels (default: 0.001,0.01,0.1)"
    )
    parser.add_argument("--pretty", action="store_true", help="Indent the JSON output")


def _load_labels(path: str) -> np.ndarray:
    labels = load_csv(path)
    if len(labels.schema) != 1:
        raise UsageError(f"{path} must hold a single column, found {len(labels.schema)}")
    values = labels.column(labels.names[0])
    if labels.schema[0].is_numeric:
        values = values.astype(np.float64)
        if np.all(np.isin(values, (0.0, 1.0))):
            return values.astype(np.int8)
    raise UsageError(f"{path}: labels must be 0 or 1")


def cmd_evaluate(args) -> int:
    if not os.path.isfile(args.scores):
        raise UsageError(f"--scores: no such file: {args.scores}")
    with open(args.scores, "r", encoding="utf-8") as f:
        try:
            scores = AttackScores.from_dict(json.load(f))
        except json.JSONDecodeError as e:
            raise UsageError(f"--scores: not a JSON document: {e}") from e
    report = evaluate(scores, _load_labels(args.labels), args.fpr)
    _dump(report.to_json(indent=2 if args.pretty else None))
    return EXIT_OK


def add_benchmark_args(parser):
    parser.add_argument("--config", required=True, help="Experiment config (JSON)")
    parser.add_argument(
        "--out", default=os.environ.get(OUTPUT_DIR_ENV), help=f"Output directory (default: ${OUTPUT_DIR_ENV})"
    )
    parser.add_argument("--resume", action="store_true", help="Keep cells already present in the output directory")
    parser.add_argument("--workers", type=int, help="Worker processes, overriding the config")
    parser.add_argument("--json", action="store_true", help="Print the summary JSON instead of the table")


def cmd_benchmark(args) -> int:
    config = load_config(args.config)
    out = args.out or config.output_dir
    if out is None:
        raise UsageError(f"--out is required when neither ${OUTPUT_DIR_ENV} nor the config names an output directory")
    if args.workers is not None:
        if args.workers < 1:
            raise UsageError(f"--workers must be positive, got {args.workers}")
        config = replace(config, max_workers=args.workers)

    record = run_experiment(config, out, resume=args.resume)
    if args.json:
        _dump(json.dumps(record.summary_document(), sort_keys=True, indent=2))
    else:
        sys.stdout.write(record.summary_table())
    return EXIT_OK


COMMANDS = {
    "audit": (add_audit_args, cmd_audit, "Score test records against a synthetic dataset"),
    "evaluate": (add_evaluate_args, cmd_evaluate, "Compute AUC, TPR at fixed FPR and median accuracy of scores"),
    "benchmark": (add_benchmark_args, cmd_benchmark, "Run a benchmark experiment from a config"),
}


def main(cl_args=None) -> int:
    parser = argparse.ArgumentParser(prog="synthaudit", description="Membership inference audits of synthetic data")
    parser.add_argument("--verbose", action="store_true", help="Log debug diagnostics to stderr")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, (add_args, _, help_text) in COMMANDS.items():
        add_args(subparsers.add_parser(name, help=help_text))

    try:
        args = parser.parse_args(cl_args)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INPUT

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(message)s",
        force=True
    )
    try:
        return COMMANDS[args.command][1](args)
    except SynthAuditError as e:
        logging.error(f"{type(e).__name__}: {e}")
        return EXIT_INPUT
    except Exception:
        logging.exception("Internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
