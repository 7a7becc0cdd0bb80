####################################################################################################
# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License. See LICENSE in the project root for license information.
####################################################################################################

#: Localization used by Gen-LRA unless overridden
DEFAULT_K = 10

#: Stands for k = |S| wherever a neighbor count is accepted
FULL_SYNTHETIC_K = "N"

#: Grid for the localization ablation
K_ABLATION_GRID = (1, 3, 5, 10, 15, 20, FULL_SYNTHETIC_K)

#: Low false-positive operating points reported for every attack
DEFAULT_FPR_LEVELS = (0.001, 0.01, 0.1)

#: Cumulative explained variance retained by the PCA encoding
PCA_VARIANCE_THRESHOLD = 0.95

#: Probability that the memorizer resamples a categorical cell from T's marginal
DEFAULT_CATEGORICAL_RESAMPLE = 0.1

# logistic regression used by LOGAN
LOGAN_ITERATIONS = 500
LOGAN_STEP = 0.1
LOGAN_L2 = 1e-3

OUTPUT_DIR_ENV = "SYNTHAUDIT_OUTPUT_DIR"
