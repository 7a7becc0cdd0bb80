####################################################################################################
# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License. See LICENSE in the project root for license information.
####################################################################################################

from .Scores import AttackId, AttackScores, MembershipPrediction, decide
from .GenLra import BandwidthMode, gen_lra
from .Baselines import dcr, dcr_diff, domias, dpi, mc
from .Logan import LoganConfig, fit_logistic, logan
from .Registry import ATTACKS, AttackInfo, attack_info, check_parameters, run_attack
