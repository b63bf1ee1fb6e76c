"""Minimax aggregation of adversarial-example detectors.

Given K pre-trained soft-detectors, each input's detector outputs form a
K x 2 channel. The aggregated detector mixes them with the weights that
maximise the mutual information between detector index and prediction,
which minimises the worst-case regret against every detector at once.

Modules
-------
core        domain types and validation
infotheory  KL divergence, mutual information, regret decomposition
capacity    weight optimisation (multiplicative updates) and a grid oracle
detector    mixture soft-detector and thresholded decision
losses      attacker objectives: ACE, KL, Fisher-Rao, Gini
mead        simultaneous-attack grouping, AUROC, FPR at 95% TPR
io          score files, group configs, synthetic scenarios, reports
cli         ``minimax-detect`` command line front-end
"""

from .capacity import (SolverConfig, SolverResult, TooManyDetectors, ZeroInitialWeight,
                       grid_oracle, solve_capacity, solve_capacity_batch)
from .core import (AttackGroup, AttackKey, Channel, EmptyCell, LengthMismatch,
                   MinimaxDetectError, NonStochasticRow, OutOfRangeEntry, ParseError, Role,
                   ScoreRecord, ValidationError, WeightVector, expand_group, validate_channel)
from .detector import (GammaOutOfRange, MixtureScore, aggregate, detect, score_matrix,
                       score_record, score_records)
from .infotheory import kl_divergence, marginal, mutual_information, regret_decomposition
from .losses import LOSSES, ace_loss, evaluate_loss, fr_loss, gini_loss, kl_loss
from .mead import (DuplicateRecord, EmptyClass, EvaluationReport, UnknownAttack, auroc,
                   build_groups, evaluate, fpr_at_tpr, roc_curve)

__version__ = "0.1.0"
