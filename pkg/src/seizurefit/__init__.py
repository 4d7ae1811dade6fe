"""Seizure detection from curve-fit statistics of filtered EEG.

Pipeline: EDF ingest -> 1-second segmentation -> two-point central-difference
filtering -> quadratic linear-parabolic least squares -> four goodness-of-fit
features -> random-forest classification with repeated k-fold evaluation.
"""

__version__ = "0.1.0"

from .central_diff import (
    FirKernel,
    apply_filter,
    frequency_response,
    kernel_for_rate,
    make_kernel,
    skip_factor,
)
from .edf import (
    EegRecording,
    LabeledInterval,
    RecordingHeader,
    load_annotations,
    parse_edf_header,
    read_recording,
    write_annotations,
    write_edf,
)
from .evaluation import (
    EvalReport,
    ForestConfig,
    Metrics,
    confusion_metrics,
    cross_validate,
    kfold_split,
)
from .forest import (
    Dataset,
    ForestModel,
    Tree,
    backend,
    best_split,
    bootstrap_sample,
    train_forest,
    train_tree,
)
from .gof import FeatureScaler, FeatureVector, apply_scaler, fit_scaler, gof
from .parabolic import FitResult, QuadraticPairs, design_row, fit_model, quadratic_pairs
from .pipeline import PipelineConfig, extract_features, run_pipeline
from .segmentation import Segment, label_segments, segment
from .synthetic import SyntheticSpec, demo_corpus_spec, synthesize_recording

__all__ = [
    "__version__",
    "FirKernel", "apply_filter", "frequency_response", "kernel_for_rate",
    "make_kernel", "skip_factor",
    "EegRecording", "LabeledInterval", "RecordingHeader", "load_annotations",
    "parse_edf_header", "read_recording", "write_annotations", "write_edf",
    "EvalReport", "ForestConfig", "Metrics", "confusion_metrics",
    "cross_validate", "kfold_split",
    "Dataset", "ForestModel", "Tree", "backend", "best_split",
    "bootstrap_sample", "train_forest", "train_tree",
    "FeatureScaler", "FeatureVector", "apply_scaler", "fit_scaler", "gof",
    "FitResult", "QuadraticPairs", "design_row", "fit_model", "quadratic_pairs",
    "PipelineConfig", "extract_features", "run_pipeline",
    "Segment", "label_segments", "segment",
    "SyntheticSpec", "demo_corpus_spec", "synthesize_recording",
]
