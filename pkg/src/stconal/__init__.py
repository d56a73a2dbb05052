"""Active learning with a temporal self-ensemble consistency criterion."""

from .acquisition import (Criterion, entropy_score, least_confidence_score,
                          sample_candidate_subset, score_candidates,
                          select_top_b, st_conal_score, variation_ratio_score)
from .core import (ema_update, entropy, kl_divergence, sharpen, softmax,
                   weight_average)
from .datasets import (Dataset, ImbalanceProfile, apply_longtail_imbalance,
                       apply_step_imbalance, gen_gaussian_blobs, load_csv,
                       save_csv, split_train_test)
from .ensemble import (StudentEnsemble, Teacher, build_teacher_ema,
                       build_teacher_ewa)
from .estimator import SnapshotEnsembleClassifier
from .exceptions import (BudgetExhaustedError, ConfigError, DatasetParseError,
                         GenerationError, InvalidInputError)
from .model import MlpSpec, Model, forward, init_model, loss_and_grad, predict_proba
from .pool import ALConfig, ALResult, ALState, Oracle, annotate, init_pools, run_active_learning
from .trainer import SnapshotSet, TrainConfig, learning_rate, snapshot_epochs, train

__version__ = "0.1.0"
