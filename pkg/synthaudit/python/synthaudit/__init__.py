####################################################################################################
# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License. See LICENSE in the project root for license information.
####################################################################################################

try:
    from ._version import __version__
except:
    # source checkouts without an installed build have no generated _version.py
    __version__ = None

from .Constants import *
from .Errors import *
from .Random import Stage, make_rng
from .Dataset import (
    ColumnKind, ColumnSchema, SplitTriple, TabularDataset, infer_schema, load_csv, load_csv_group, split_disjoint,
    write_csv
)
from .Encoders import EncodedMatrix, Encoder, EncodingStrategy, encode, fit_encoder
from .Density import Bandwidth, KdeModel, kde_fit, kde_logpdf, kde_logpdf_augmented, silverman_bandwidth
from .Neighbors import Metric, NeighborResult, knn, knn_batch, nearest_distance, nearest_distances
from .attacks import *
from .Generators import (
    GeneratorKind, GeneratorSpec, PopulationSpec, dcr_train_distance, generate, identical_match_fraction,
    sample_population
)
from .Metrics import (
    EvalReport, LabeledScores, accuracy_at_median, aggregate, auc_roc, evaluate, mann_whitney_u,
    render_summary_table, tpr_at_fpr
)
from .Harness import AttackConfig, ExperimentConfig, RunRecord, load_config, run_cell, run_experiment
