#!/usr/bin/env python3
####################################################################################################
# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License. See LICENSE in the project root for license information.
####################################################################################################

import logging
import math
import os
import sys
import tempfile
import unittest

import numpy as np
from scipy import integrate

sys.path.insert(1, os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", ".."))

from synthaudit import (
    ColumnKind, ColumnSchema, ConfigError, DegenerateDimension, EmptyInputError, EncodingError, EncodingStrategy,
    EvalReport, GeneratorKind, GeneratorSpec, InsufficientRows, LabeledScores, MetricError, MissingFileError,
    ParseFailure, PopulationSpec, RaggedRowsError, TabularDataset, accuracy_at_median, aggregate, auc_roc, encode,
    fit_encoder, generate, identical_match_fraction, infer_schema, kde_fit, kde_logpdf, kde_logpdf_augmented, knn,
    knn_batch, load_csv, mann_whitney_u, nearest_distance, render_summary_table, sample_population,
    silverman_bandwidth, split_disjoint, tpr_at_fpr, write_csv
)
from synthaudit.Generators import sample_population_spec
from synthaudit.Parameter import create_parameter_grid
from synthaudit.Random import Stage, make_rng
from synthaudit.test import verifiers

logger = logging.getLogger()
logger.setLevel(logging.DEBUG)

NUMERIC = ColumnKind.NUMERIC
CATEGORICAL = ColumnKind.CATEGORICAL


def _write(folder: str, name: str, text: str) -> str:
    path = os.path.join(folder, name)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    return path


class DatasetTests(unittest.TestCase):
    def test_infer_schema(self) -> None:
        schema = infer_schema([["1", "a"], ["2.5", "b"], ["", "a"], ["-3e1", "a"]], ["x", "c"])
        self.assertEqual(schema[0], ColumnSchema("x", NUMERIC))
        self.assertEqual(schema[1], ColumnSchema("c", CATEGORICAL, ("a", "b")))

        # a single non-number makes the whole column categorical
        schema = infer_schema([["1"], ["inf"], ["2"]], ["x"])
        self.assertEqual(schema[0].kind, CATEGORICAL)
        self.assertEqual(schema[0].categories, ("1", "2", "inf"))

    def test_infer_schema_ragged(self) -> None:
        with self.assertRaises(RaggedRowsError):
            infer_schema([["1", "2"], ["3"]], ["a", "b"])

    def test_infer_schema_ignores_order(self) -> None:
        header = ["x", "c", "y"]
        rows = [["1", "a", "q"], ["2", "b", "3"], ["", "a", "4"], ["7", "c", "5"]]
        schema = infer_schema(rows, header)
        self.assertEqual(infer_schema(rows[::-1], header), schema)
        self.assertEqual(infer_schema([rows[i] for i in (2, 0, 3, 1)], header), schema)

        # permuting columns permutes the schema
        order = [2, 0, 1]
        permuted = infer_schema([[r[j] for j in order] for r in rows], [header[j] for j in order])
        self.assertEqual(permuted, [schema[j] for j in order])

    def test_load_csv(self) -> None:
        with tempfile.TemporaryDirectory() as folder:
            path = _write(folder, "data.csv", "age,city\n31,Oslo\n45.5,Lima\n27,Oslo\n")
            dataset = load_csv(path)
            self.assertEqual(dataset.names, ["age", "city"])
            self.assertEqual(dataset.schema[1].categories, ("Lima", "Oslo"))
            self.assertEqual(dataset.rows, [(31.0, "Oslo"), (45.5, "Lima"), (27.0, "Oslo")])

    def test_load_csv_errors(self) -> None:
        with tempfile.TemporaryDirectory() as folder:
            with self.assertRaises(MissingFileError):
                load_csv(os.path.join(folder, "absent.csv"))
            with self.assertRaises(EmptyInputError):
                load_csv(_write(folder, "empty.csv", ""))
            with self.assertRaises(RaggedRowsError):
                load_csv(_write(folder, "ragged.csv", "a,b\n1,2\n3,4,5\n"))
            schema = [ColumnSchema("a", NUMERIC), ColumnSchema("b", CATEGORICAL, ("x", "y"))]
            with self.assertRaises(ParseFailure):
                load_csv(_write(folder, "text.csv", "a,b\n1,x\nz,y\n"), schema)

    def test_load_csv_blank_lines(self) -> None:
        with tempfile.TemporaryDirectory() as folder:
            with self.assertRaises(RaggedRowsError):
                load_csv(_write(folder, "one.csv", "x\n1\n\n2\n"))
            with self.assertRaises(RaggedRowsError):
                load_csv(_write(folder, "two.csv", "a,b\n1,x\n\n2,y\n"))
            with self.assertRaises(RaggedRowsError):
                load_csv(_write(folder, "lead.csv", "\na,b\n1,x\n"))
            # a missing cell in a numeric column is not a blank line
            schema = [ColumnSchema("a", NUMERIC), ColumnSchema("b", CATEGORICAL, ("x", "y"))]
            with self.assertRaises(ParseFailure):
                load_csv(_write(folder, "cell.csv", "a,b\n1,x\n,y\n"), schema)

    def test_load_csv_header_only(self) -> None:
        with tempfile.TemporaryDirectory() as folder:
            dataset = load_csv(_write(folder, "header.csv", "a,b\n"))
            self.assertEqual(len(dataset), 0)
            self.assertEqual(dataset.names, ["a", "b"])
            self.assertEqual([c.kind for c in dataset.schema], [NUMERIC, NUMERIC])

    def test_write_then_load(self) -> None:
        dataset = sample_population(sample_population_spec("mixed_gaussian"), 40, seed=3)
        with tempfile.TemporaryDirectory() as folder:
            path = os.path.join(folder, "round.csv")
            write_csv(dataset, path)
            self.assertEqual(load_csv(path, dataset.schema).rows, dataset.rows)

    def test_split_disjoint(self) -> None:
        dataset = sample_population(sample_population_spec("gaussian"), 30, seed=0)
        split = split_disjoint(dataset, 10, seed=7)
        origins = [set(d.origin.tolist()) for d in (split.train, split.reference, split.holdout)]
        self.assertEqual(sum(len(o) for o in origins), 30)
        self.assertEqual(len(origins[0] | origins[1] | origins[2]), 30)

        again = split_disjoint(dataset, 10, seed=7)
        self.assertEqual(split.train.origin.tolist(), again.train.origin.tolist())
        self.assertNotEqual(split.train.origin.tolist(), split_disjoint(dataset, 10, seed=8).train.origin.tolist())

        with self.assertRaises(InsufficientRows):
            split_disjoint(dataset, 11, seed=0)

    def test_categories_enforced(self) -> None:
        schema = [ColumnSchema("c", CATEGORICAL, ("a", "b"))]
        with self.assertRaises(ValueError):
            TabularDataset.from_rows(schema, [("a", ), ("z", )])


class EncoderTests(unittest.TestCase):
    def _mixed(self):
        schema = [ColumnSchema("x", NUMERIC), ColumnSchema("c", CATEGORICAL, ("a", "b", "c"))]
        return TabularDataset.from_rows(schema, [(1.0, "b"), (3.0, "a"), (1.0, "c"), (3.0, "a")])

    def test_two_point_standardization(self) -> None:
        schema = [ColumnSchema("x", NUMERIC)]
        dataset = TabularDataset.from_rows(schema, [(1.0, ), (3.0, )])
        encoded = encode(fit_encoder(EncodingStrategy.ORDINAL_STANDARDIZE, [dataset]), dataset)
        np.testing.assert_allclose(encoded.values[:, 0], [-1.0, 1.0])

    def test_ordinal_codes(self) -> None:
        dataset = self._mixed()
        encoder = fit_encoder("ordinal_standardize", [dataset])
        self.assertEqual(encoder.vocabulary["c"], ("a", "b", "c"))
        codes = np.array([1.0, 0.0, 2.0, 0.0])
        np.testing.assert_allclose(encode(encoder, dataset).values[:, 1], (codes - codes.mean()) / codes.std())

    def test_one_hot(self) -> None:
        dataset = self._mixed()
        encoder = fit_encoder(EncodingStrategy.ONE_HOT_SCALE, [dataset])
        values = encode(encoder, dataset).values
        self.assertEqual(values.shape, (4, 4))
        np.testing.assert_array_equal(values[:, 1:], [[0, 1, 0], [1, 0, 0], [0, 0, 1], [1, 0, 0]])

    def test_unseen_category(self) -> None:
        schema = [ColumnSchema("x", NUMERIC), ColumnSchema("c", CATEGORICAL, ("a", "b"))]
        fitted = TabularDataset.from_rows(schema, [(1.0, "a"), (2.0, "a")])
        other = TabularDataset.from_rows(schema, [(1.0, "b")])
        encoder = fit_encoder(EncodingStrategy.ONE_HOT_SCALE, [fitted])
        with self.assertRaises(EncodingError):
            encode(encoder, other)

        # a vocabulary drawn from every input covers it
        encoder = fit_encoder(EncodingStrategy.ONE_HOT_SCALE, [fitted], vocabulary_data=[fitted, other])
        self.assertEqual(encode(encoder, other).shape, (1, 1))

    def test_constant_dimensions_dropped(self) -> None:
        dataset = self._mixed()
        dataset = dataset.replace_columns({"x": [5.0] * 4})
        encoder = fit_encoder(EncodingStrategy.ORDINAL_STANDARDIZE, [dataset])
        self.assertEqual(encoder.dropped, ["x"])
        self.assertEqual(encoder.output_dimension, 1)

    def test_pca_on_a_line(self) -> None:
        schema = [ColumnSchema("x", NUMERIC), ColumnSchema("y", NUMERIC)]
        dataset = TabularDataset.from_rows(schema, [(t, 2 * t + 1) for t in np.linspace(-1, 1, 9)])
        encoder = fit_encoder(EncodingStrategy.ORDINAL_STANDARDIZE_PCA, [dataset])
        self.assertEqual(encoder.output_dimension, 1)
        self.assertEqual(encode(encoder, dataset).shape, (9, 1))

    def test_pca_components(self) -> None:
        dataset = sample_population(sample_population_spec("mixed_gaussian"), 200, seed=2)
        encoder = fit_encoder(EncodingStrategy.ORDINAL_STANDARDIZE_PCA, [dataset])
        components = encoder.pca_components
        np.testing.assert_allclose(components @ components.T, np.eye(len(components)), rtol=0, atol=1e-9)

        standardized = encode(fit_encoder(EncodingStrategy.ORDINAL_STANDARDIZE, [dataset]), dataset).values
        centered = standardized - encoder.pca_mean
        residual = centered - centered @ components.T @ components
        total = np.sum(centered**2) / len(centered)
        self.assertLessEqual(np.sum(residual**2) / len(centered), (1 - 0.95) * total + 1e-9)

    def test_refit_is_idempotent(self) -> None:
        dataset = sample_population(sample_population_spec("gaussian"), 50, seed=4)
        encoded = encode(fit_encoder(EncodingStrategy.ORDINAL_STANDARDIZE, [dataset]), dataset)
        again = TabularDataset.from_columns(
            dataset.schema, {c.name: encoded.values[:, j] for j, c in enumerate(dataset.schema)}
        )
        encoder = fit_encoder(EncodingStrategy.ORDINAL_STANDARDIZE, [again])
        np.testing.assert_allclose(encoder.means, 0.0, rtol=0, atol=1e-9)
        np.testing.assert_allclose(encoder.scales, 1.0, rtol=0, atol=1e-9)

    def test_affine_invariance(self) -> None:
        dataset = sample_population(sample_population_spec("gaussian"), 20, seed=1)
        moved = dataset.replace_columns({
            "x0": 4.0 * dataset.column("x0") - 7.0,
            "x1": 0.5 * dataset.column("x1") + 2.0
        })
        before = encode(fit_encoder(EncodingStrategy.ORDINAL_STANDARDIZE, [dataset]), dataset)
        after = encode(fit_encoder(EncodingStrategy.ORDINAL_STANDARDIZE, [moved]), moved)
        np.testing.assert_allclose(before.values, after.values, atol=1e-12)

    def test_encoder_id(self) -> None:
        dataset = self._mixed()
        a = fit_encoder(EncodingStrategy.ONE_HOT_SCALE, [dataset])
        b = fit_encoder(EncodingStrategy.ONE_HOT_SCALE, [dataset])
        c = fit_encoder(EncodingStrategy.ORDINAL_STANDARDIZE, [dataset])
        self.assertEqual(a.encoder_id, b.encoder_id)
        self.assertNotEqual(a.encoder_id, c.encoder_id)
        self.assertEqual(type(a).from_json(a.to_json()).encoder_id, a.encoder_id)


class DensityTests(unittest.TestCase):
    def test_standard_normal_at_origin(self) -> None:
        model = kde_fit(np.zeros((1, 1)), bandwidth=1.0)
        self.assertAlmostEqual(kde_logpdf(model, [[0.0]])[0], -0.918939, places=6)

    def test_two_point_mixture(self) -> None:
        model = kde_fit([[-1.0], [1.0]], bandwidth=1.0)
        self.assertAlmostEqual(kde_logpdf(model, [[0.0]])[0], -1.418939, places=6)

    def test_silverman_one_dimension(self) -> None:
        data = make_rng(0).standard_normal((100, 1))
        expected = 1.0592 * data.std() * 100**(-0.2)
        self.assertAlmostEqual(silverman_bandwidth(data).values[0], expected, places=3)

    def test_degenerate_bandwidth(self) -> None:
        with self.assertRaises(DegenerateDimension):
            silverman_bandwidth([[1.0, 2.0], [1.0, 3.0]])
        with self.assertRaises(DegenerateDimension):
            silverman_bandwidth([[1.0, 2.0]])

    def test_matches_direct_sum(self) -> None:
        rng = make_rng(11)
        for d in (1, 2, 4):
            support = rng.standard_normal((25, d))
            queries = rng.standard_normal((8, d)) * 1.5
            model = kde_fit(support)
            expected = verifiers.direct_kde_logpdf(support, verifiers.silverman(support), queries)
            np.testing.assert_allclose(kde_logpdf(model, queries), expected, rtol=0, atol=1e-12)

    def test_integrates_to_one(self) -> None:
        model = kde_fit(make_rng(2).standard_normal((30, 1)))
        total, _ = integrate.quad(lambda t: math.exp(kde_logpdf(model, [[t]])[0]), -12, 12, limit=200)
        self.assertAlmostEqual(total, 1.0, delta=1e-3)

    def test_far_queries_stay_finite(self) -> None:
        model = kde_fit([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        self.assertTrue(np.isfinite(kde_logpdf(model, [[1e4, -1e4]])[0]))

    def test_augmented_matches_refit_on_shared_bandwidth(self) -> None:
        rng = make_rng(5)
        support = rng.standard_normal((20, 3))
        extra = rng.standard_normal(3)
        queries = rng.standard_normal((6, 3))
        model = kde_fit(support)
        refit = kde_fit(np.vstack([support, extra]), bandwidth=model.bandwidth)
        expected = kde_logpdf(refit, queries)
        np.testing.assert_allclose(kde_logpdf_augmented(model, extra, queries), expected, atol=1e-12)
        np.testing.assert_allclose(
            kde_logpdf_augmented(model, extra, queries, base_logpdf=kde_logpdf(model, queries)), expected, atol=1e-12
        )

    def test_augmented_mass_at_query(self) -> None:
        rng = make_rng(9)
        checked = 0
        for d in (1, 2, 3):
            model = kde_fit(rng.standard_normal((30, d)))
            peak = (2 * math.pi)**(-d / 2) / np.prod(model.bandwidth.values)
            for q in rng.uniform(-3.0, 3.0, size=(10, d)):
                before = kde_logpdf(model, [q])[0]
                if math.exp(before) < peak:
                    self.assertGreater(kde_logpdf_augmented(model, q, [q])[0], before)
                    checked += 1
        self.assertGreater(checked, 0)

    def test_augmented_far_point(self) -> None:
        model = kde_fit(make_rng(6).standard_normal((40, 2)))
        queries = [[0.0, 0.0], [0.5, -0.5]]
        shift = kde_logpdf_augmented(model, [1e3, 1e3], queries) - kde_logpdf(model, queries)
        np.testing.assert_allclose(shift, math.log(40 / 41), atol=1e-12)

    def test_augmented_refit_bandwidth(self) -> None:
        rng = make_rng(8)
        support = rng.standard_normal((20, 2))
        extra = np.array([3.0, 3.0])
        queries = rng.standard_normal((4, 2))
        expected = kde_logpdf(kde_fit(np.vstack([support, extra])), queries)
        np.testing.assert_allclose(
            kde_logpdf_augmented(kde_fit(support), extra, queries, refit_bandwidth=True), expected, atol=1e-12
        )


class NeighborTests(unittest.TestCase):
    def test_knn(self) -> None:
        data = [[0.0], [1.0], [2.0], [3.0]]
        result = knn([1.4], data, 2)
        self.assertEqual(result.indices.tolist(), [1, 2])
        np.testing.assert_allclose(result.distances, [0.4, 0.6])
        self.assertEqual(len(knn([0.0], data, 10)), 4)
        self.assertEqual(nearest_distance([2.5], data), 0.5)

    def test_ties_go_to_lower_index(self) -> None:
        self.assertEqual(knn([0.0], [[1.0], [-1.0], [0.0]], 2).indices.tolist(), [2, 0])
        self.assertEqual(knn([0.0], [[1.0], [-1.0], [1.0], [5.0]], 2).indices.tolist(), [0, 1])
        self.assertEqual(knn([0.0, 0.0], [[0, 3], [3, 0], [0, -3], [-3, 0]], 3).indices.tolist(), [0, 1, 2])

    def test_matches_full_scan(self) -> None:
        rng = make_rng(4)
        data = rng.standard_normal((50, 3))
        queries = rng.standard_normal((10, 3))
        for query, result in zip(queries, knn_batch(queries, data, 7)):
            indices, distances = verifiers.full_scan_knn(query, data, 7)
            self.assertEqual(result.indices.tolist(), indices)
            np.testing.assert_allclose(result.distances, distances, rtol=1e-12)

    def test_translation_invariance(self) -> None:
        rng = make_rng(9)
        data = rng.integers(-5, 5, size=(30, 2)).astype(float)
        query = np.array([0.0, 1.0])
        shift = np.array([17.0, -3.0])
        before = knn(query, data, 6)
        after = knn(query + shift, data + shift, 6)
        self.assertEqual(before.indices.tolist(), after.indices.tolist())
        np.testing.assert_allclose(before.distances, after.distances)

    def test_metrics(self) -> None:
        data = [[3.0, 4.0]]
        self.assertEqual(nearest_distance([0.0, 0.0], data), 5.0)
        self.assertEqual(nearest_distance([0.0, 0.0], data, "cityblock"), 7.0)
        self.assertEqual(nearest_distance([0.0, 0.0], data, "chebyshev"), 4.0)

    def test_invalid_k(self) -> None:
        with self.assertRaises(ValueError):
            knn([0.0], [[1.0]], 0)


class MetricTests(unittest.TestCase):
    def test_auc(self) -> None:
        self.assertEqual(auc_roc(LabeledScores([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1])), 0.75)
        self.assertEqual(auc_roc(LabeledScores([1, 2, 3, 4], [0, 0, 1, 1])), 1.0)
        self.assertEqual(auc_roc(LabeledScores([1, 1, 1, 1], [0, 1, 0, 1])), 0.5)

    def test_auc_matches_all_pairs(self) -> None:
        rng = make_rng(12)
        for trial in range(100):
            m = int(rng.integers(2, 500))
            # coarse scores on every other instance so that ties are common
            scores = rng.integers(0, 6, size=m).astype(float) if trial % 2 else rng.standard_normal(m)
            labels = rng.integers(0, 2, size=m)
            labels[:2] = (1, 0)
            data = LabeledScores(scores, labels)
            concordant, tied = verifiers.concordance(scores, labels)
            self.assertEqual(mann_whitney_u(data), concordant + tied / 2)
            self.assertEqual(auc_roc(data), verifiers.all_pairs_auc(scores, labels))

    def test_auc_complement(self) -> None:
        rng = make_rng(13)
        scores = rng.standard_normal(40)
        labels = np.array([1, 0] * 20)
        u = mann_whitney_u(LabeledScores(scores, labels))
        flipped = mann_whitney_u(LabeledScores(-scores, labels))
        self.assertEqual(u + flipped, 400)
        self.assertAlmostEqual(auc_roc(LabeledScores(scores, labels)) + auc_roc(LabeledScores(-scores, labels)), 1.0)

    def test_single_class(self) -> None:
        with self.assertRaises(MetricError):
            auc_roc(LabeledScores([1.0, 2.0], [1, 1]))
        with self.assertRaises(MetricError):
            LabeledScores([1.0, 2.0], [1, 2])

    def test_tpr_at_fpr(self) -> None:
        data = LabeledScores([1, 2, 3, 4], [0, 0, 1, 1])
        self.assertEqual(tpr_at_fpr(data, (0.1, )), {0.1: 1.0})
        data = LabeledScores([1, 5, 3, 4], [0, 0, 1, 1])
        self.assertEqual(tpr_at_fpr(data, (0.1, 0.5)), {0.1: 0.0, 0.5: 1.0})

    def test_tpr_matches_enumeration(self) -> None:
        rng = make_rng(14)
        scores = rng.integers(0, 20, size=200).astype(float)
        labels = rng.integers(0, 2, size=200)
        data = LabeledScores(scores, labels)
        levels = (0.001, 0.01, 0.05, 0.1, 0.3)
        result = tpr_at_fpr(data, levels)
        for alpha in levels:
            self.assertEqual(result[alpha], verifiers.enumerated_tpr_at_fpr(scores, labels, alpha))
        values = [result[a] for a in levels]
        self.assertEqual(values, sorted(values))

    def test_accuracy_at_median(self) -> None:
        self.assertEqual(accuracy_at_median(LabeledScores([1, 2, 3, 4], [0, 0, 1, 1])), 1.0)
        self.assertEqual(accuracy_at_median(LabeledScores([4, 3, 2, 1], [0, 0, 1, 1])), 0.0)

    def _report(self, attack, auc, seed):
        return EvalReport(
            attack_id=attack, auc=auc, tpr_at_fpr={0.1: auc / 2}, accuracy_median=0.5, seed=seed, generator="g", n=10
        )

    def test_aggregate(self) -> None:
        reports = [self._report("a", 0.7, s) for s in (0, 1)] + [self._report("b", 0.7, s) for s in (0, 1)]
        reports.append(self._report("c", 0.9, 0))
        summary = aggregate(reports)
        by_attack = {g["attack"]: g for g in summary["groups"]}
        self.assertEqual(by_attack["a"]["auc"], {"mean": 0.7, "std": 0.0})
        self.assertEqual(by_attack["a"]["seeds"], 2)
        self.assertEqual(by_attack["c"]["tpr_at_fpr"]["0.1"]["mean"], 0.45)
        self.assertEqual(summary["average_rank"], {"a": 2.5, "b": 2.5, "c": 1.0})

        table = render_summary_table(summary)
        self.assertIn("AUC-ROC", table)
        self.assertIn("Average Rank", table)
        self.assertIn("0.900 (0.00)", table)

    def test_report_json(self) -> None:
        report = self._report("gen_lra", 0.625, 3)
        self.assertEqual(EvalReport.from_json(report.to_json()), report)
        with self.assertRaises(MetricError):
            self._report("gen_lra", 1.5, 0)


class GeneratorTests(unittest.TestCase):
    def setUp(self) -> None:
        self.spec = sample_population_spec("mixed_gaussian")
        self.train = sample_population(self.spec, 50, seed=0)

    def test_population_is_seeded(self) -> None:
        self.assertEqual(sample_population(self.spec, 20, 4).rows, sample_population(self.spec, 20, 4).rows)
        self.assertNotEqual(sample_population(self.spec, 20, 4).rows, sample_population(self.spec, 20, 5).rows)

    def test_population_moments(self) -> None:
        n = 10000
        sample = sample_population(self.spec, n, seed=6)
        weights = self.spec.weights[:, None]
        mean = np.sum(weights * self.spec.means, axis=0)
        variance = np.sum(weights * (self.spec.variances + self.spec.means**2), axis=0) - mean**2
        for j, name in enumerate(self.spec.numeric):
            drawn = sample.column(name).astype(float).mean()
            self.assertLess(abs(drawn - mean[j]), 4 * math.sqrt(variance[j] / n), name)

    def test_single_category(self) -> None:
        spec = PopulationSpec.from_dict({
            "numeric": {"columns": ["x"], "components": [{"weight": 1.0, "mean": [0.0], "variance": [1.0]}]},
            "categorical": {"c": {"a": 1.0}}
        })
        self.assertEqual(set(sample_population(spec, 20, seed=0).column("c")), {"a"})

    def test_exact_memorizer(self) -> None:
        gen = GeneratorSpec(GeneratorKind.MEMORIZER, noise_fraction=0.0, resample_probability=0.0)
        synthetic = generate(gen, self.train, 120, seed=1)
        self.assertEqual(len(synthetic), 120)
        self.assertEqual(identical_match_fraction(synthetic, self.train), 1.0)
        # concatenated permutations: each row exactly twice in the first 100
        counts = {}
        for row in synthetic.rows[:100]:
            counts[row] = counts.get(row, 0) + 1
        self.assertEqual(set(counts.values()), {2})

    def test_noisy_memorizer(self) -> None:
        gen = GeneratorSpec(GeneratorKind.MEMORIZER, noise_fraction=0.5)
        self.assertEqual(identical_match_fraction(generate(gen, self.train, 50, seed=1), self.train), 0.0)

    def test_oracle_ignores_training_data(self) -> None:
        gen = GeneratorSpec(GeneratorKind.POPULATION_ORACLE, population=self.spec)
        other = sample_population(self.spec, 50, seed=9)
        self.assertEqual(generate(gen, self.train, 30, seed=2).rows, generate(gen, other, 30, seed=2).rows)

    def test_parametric_fit(self) -> None:
        gen = GeneratorSpec(GeneratorKind.PARAMETRIC_FIT)
        synthetic = generate(gen, self.train, 2000, seed=3)
        for name in self.spec.numeric:
            column = self.train.column(name).astype(float)
            bound = 5 * column.std() / math.sqrt(2000)
            self.assertLess(abs(synthetic.column(name).astype(float).mean() - column.mean()), bound)
        self.assertLessEqual(set(synthetic.column("color")), set(self.train.column("color")))

    def test_empty_training_data(self) -> None:
        with self.assertRaises(InsufficientRows):
            generate(GeneratorSpec(GeneratorKind.MEMORIZER), self.train.take([]), 10, seed=0)

    def test_population_document_errors(self) -> None:
        doc = self.spec.to_dict()
        del doc["numeric"]["components"][1]["variance"]
        with self.assertRaises(ConfigError) as context:
            PopulationSpec.from_dict(doc)
        self.assertEqual(context.exception.path, "$.numeric.components[1]")

        doc = self.spec.to_dict()
        doc["categorical"]["color"]["red"] = 0.9
        with self.assertRaises(ConfigError) as context:
            PopulationSpec.from_dict(doc)
        self.assertEqual(context.exception.path, "$.categorical.color")


class PackageTests(unittest.TestCase):
    def test_constants(self) -> None:
        import synthaudit
        from synthaudit import Constants

        public = [name for name in vars(Constants) if not name.startswith("_")]
        self.assertTrue(public)
        for name in public:
            self.assertTrue(name.isupper(), name)
            self.assertIs(getattr(synthaudit, name), getattr(Constants, name))
        self.assertEqual(synthaudit.K_ABLATION_GRID[-1], synthaudit.FULL_SYNTHETIC_K)


class ParameterGridTests(unittest.TestCase):
    def test_grid_order(self) -> None:
        grid = create_parameter_grid({"generator": ["m", "o"], "n": 10, "seed": range(2)})
        self.assertEqual(
            grid, [
                {"generator": "m", "n": 10, "seed": 0},
                {"generator": "m", "n": 10, "seed": 1},
                {"generator": "o", "n": 10, "seed": 0},
                {"generator": "o", "n": 10, "seed": 1},
            ]
        )

    def test_filter_and_sample(self) -> None:
        grid = create_parameter_grid({"a": range(4), "b": range(4)}, filter_func=lambda v: v[0] != v[1])
        self.assertEqual(len(grid), 12)
        sampled = create_parameter_grid({"a": range(4), "b": range(4)}, sample=5, seed=3)
        self.assertEqual(sampled, create_parameter_grid({"a": range(4), "b": range(4)}, sample=5, seed=3))
        self.assertEqual(len(sampled), 5)

    def test_streams_are_independent(self) -> None:
        a = make_rng(1, Stage.SPLIT).random(4)
        b = make_rng(1, Stage.GENERATE).random(4)
        self.assertFalse(np.allclose(a, b))
        np.testing.assert_array_equal(a, make_rng(1, Stage.SPLIT).random(4))


if __name__ == '__main__':
    unittest.main(verbosity=10)
