"""Skeleton-kinematics classification pipeline."""

__version__ = "0.1.0"

from .cleaning import CleaningConfig, RawBodyTrack, resample_uniform, select_participant
from .features import KinematicSeries, aggregate_groups, compute_feature_vector, derive_series, summarize
from .folds import FoldPlan, stratified_repeated_kfold
from .forest import ForestModel, forest_probability, train_random_forest
from .metrics import confusion_metrics, ensemble_vote, mean_roc_curve, roc_auc, window_vote
from .selection import rfecv_select, tune_depth
from .skeleton_io import (RawEntry, RawTrackingLog, SkeletonSequence,
                          parse_tracking_log, read_sequence, write_sequence)
from .stats import levene_test, welch_ttest
from .svm import LinearModel, Standardizer, svm_probability, train_linear_svm
from .synth import Cohort, CohortSpec, generate_cohort
from .volumes import (HeatmapVolume, RenderConfig, flip_horizontal, jitter_augment,
                      make_grid, render_frame, render_sequence, window_volume)

__all__ = [name for name in dir() if not name.startswith("_")]
