"""Class-aware active learning for semantic segmentation.

The engine scores unlabeled images by entropy weighted with per-class
performance gaps, thresholds the pool adaptively, and feeds top-ranked
samples to a simulated oracle or a human annotation service, retraining
between cycles.
"""

from .acquisition import (
    DcauScore,
    SelectionResult,
    ThresholdStats,
    WeightVector,
    adaptive_threshold,
    baseline_coreset_select,
    baseline_entropy_score,
    baseline_random_select,
    dcau_score,
    dynamic_pixel_uncertainty,
    dynamic_weights,
    pixel_entropy,
    select,
)
from .dataset_io import load_dataset, write_dataset
from .learner import LearnerConfig, LearnerState, fit, predict_proba
from .loop import (
    CycleRecord,
    ExperimentConfig,
    ExperimentSession,
    run_experiment,
    run_sweep,
)
from .metrics import ClassIouReport, ConfusionCounts, accumulate, iou_report
from .pool import PoolState, commit_labels, init_pool
from .report import emit_comparison, emit_cycle_csv
from .synth import SynthConfig, generate
from .types import Dataset, Image, Mask, ProbMap

__version__ = "0.1.0"

__all__ = [
    "ClassIouReport",
    "ConfusionCounts",
    "CycleRecord",
    "Dataset",
    "DcauScore",
    "ExperimentConfig",
    "ExperimentSession",
    "Image",
    "LearnerConfig",
    "LearnerState",
    "Mask",
    "PoolState",
    "ProbMap",
    "SelectionResult",
    "SynthConfig",
    "ThresholdStats",
    "WeightVector",
    "accumulate",
    "adaptive_threshold",
    "baseline_coreset_select",
    "baseline_entropy_score",
    "baseline_random_select",
    "commit_labels",
    "dcau_score",
    "dynamic_pixel_uncertainty",
    "dynamic_weights",
    "emit_comparison",
    "emit_cycle_csv",
    "fit",
    "generate",
    "init_pool",
    "iou_report",
    "load_dataset",
    "pixel_entropy",
    "predict_proba",
    "run_experiment",
    "run_sweep",
    "select",
    "write_dataset",
]
