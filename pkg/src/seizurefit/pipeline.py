"""End-to-end orchestration: ingest -> segment -> filter -> fit -> features
-> train/evaluate, plus the CSV/JSON artifact formats shared by the CLI
stages.

All CSV output uses '.' decimals, LF line endings and a header row; floats are
written with repr so reruns are byte-identical. A pipeline run with a
synthetic spec first writes the recording to EDF and reads it back, so the
monolithic run and the stage-by-stage run see exactly the same (quantized)
samples.
"""

from __future__ import annotations

import csv
import json
import logging
import os
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .central_diff import apply_filter, frequency_response, kernel_for_rate
from .edf import (
    EegRecording,
    LabeledInterval,
    load_annotations,
    read_recording,
    write_annotations,
    write_edf,
)
from .errors import ConfigError, NumericalError
from .evaluation import ForestConfig, cross_validate
from .forest import Dataset, train_forest
from .gof import FeatureVector, fit_scaler, gof
from .parabolic import FitResult, fit_model, predict, quadratic_pairs
from .segmentation import label_segments, segment
from .synthetic import SyntheticSpec, epoch_intervals, synthesize_recording

logger = logging.getLogger(__name__)

OUT_DIR_ENV = "SEIZUREFIT_OUT_DIR"


@dataclass
class FitRecord:
    epoch: int
    channel: str
    segment: int
    fit: FitResult


@dataclass
class ExtractionResult:
    features: list[FeatureVector]
    fits: list[FitRecord]
    skipped: int = 0


def extract_features(recording: EegRecording,
                     intervals: list[LabeledInterval], *,
                     window_seconds: float = 1.0,
                     skip_factor: int | None = None,
                     fit_scope: str = "segment",
                     variance_weights: bool = False,
                     annotated_only: bool = False,
                     epoch_offset: int = 0) -> ExtractionResult:
    """Run stages 1-4 on one recording.

    fit_scope="segment" produces one fit per (segment, channel), the
    granularity the classifier consumes. fit_scope="epoch" concatenates each
    annotated interval's filtered segments per channel and fits once per
    (epoch, channel). Segments whose fit degenerates are skipped and counted.
    """
    if fit_scope not in ("segment", "epoch"):
        raise ConfigError(f"fit_scope must be 'segment' or 'epoch', got {fit_scope!r}")
    kernel = kernel_for_rate(recording.sampling_rate_hz, skip_factor)
    segments = label_segments(segment(recording, window_seconds), intervals,
                              window_seconds)

    filtered = [apply_filter(seg.samples, kernel) for seg in segments]
    labels = recording.channel_labels
    result = ExtractionResult(features=[], fits=[])

    def one_fit(x: np.ndarray, epoch: int, channel: str, seg_index: int,
                label: int | None):
        pairs = quadratic_pairs(x, variance_weights=variance_weights)
        fit = fit_model(pairs)
        yhat = predict(fit, pairs.x)
        fv = gof(pairs.y, yhat, pairs.weights, epoch=epoch, channel=channel,
                 segment=seg_index, label=label)
        result.features.append(fv)
        result.fits.append(FitRecord(epoch=epoch, channel=channel,
                                     segment=seg_index, fit=fit))

    if fit_scope == "segment":
        for seg, filt in zip(segments, filtered):
            if annotated_only and seg.epoch < 0:
                continue
            epoch = seg.epoch + epoch_offset if seg.epoch >= 0 else -1
            for c, channel in enumerate(labels):
                try:
                    one_fit(filt[:, c], epoch, channel, seg.index, seg.label)
                except NumericalError as exc:
                    result.skipped += 1
                    logger.warning("skipping segment %d channel %s: %s",
                                   seg.index, channel, exc)
    else:
        by_epoch: dict[int, list[int]] = {}
        for i, seg in enumerate(segments):
            if seg.epoch >= 0:
                by_epoch.setdefault(seg.epoch, []).append(i)
        for epoch in sorted(by_epoch):
            idxs = by_epoch[epoch]
            label = segments[idxs[0]].label
            for c, channel in enumerate(labels):
                x = np.concatenate([filtered[i][:, c] for i in idxs])
                try:
                    one_fit(x, epoch + epoch_offset, channel, -1, label)
                except NumericalError as exc:
                    result.skipped += 1
                    logger.warning("skipping epoch %d channel %s: %s",
                                   epoch, channel, exc)

    if result.skipped:
        logger.warning("%d degenerate fits skipped", result.skipped)
    return result


# --- artifact formats --------------------------------------------------------

def _r(value: float) -> str:
    return repr(float(value))


def write_features_csv(features: list[FeatureVector], path) -> None:
    with open(path, "w", newline="\n") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["epoch", "channel", "segment", "label",
                    "zeta", "phi", "sigma_adj", "psi"])
        for v in features:
            w.writerow([v.epoch, v.channel, v.segment,
                        "" if v.label is None else v.label,
                        _r(v.zeta), _r(v.phi), _r(v.sigma_adj), _r(v.psi)])


def read_features_csv(path) -> list[FeatureVector]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:8] != ["epoch", "channel", "segment", "label",
                                   "zeta", "phi", "sigma_adj", "psi"]:
        raise ConfigError(f"{path} is not a features CSV")
    out = []
    for r in rows[1:]:
        out.append(FeatureVector(
            zeta=float(r[4]), phi=float(r[5]), sigma_adj=float(r[6]),
            psi=float(r[7]), epoch=int(r[0]), channel=r[1],
            segment=int(r[2]), label=None if r[3] == "" else int(r[3])))
    return out


def write_fits_csv(fits: list[FitRecord], path) -> None:
    with open(path, "w", newline="\n") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["epoch", "channel", "segment", "a", "b", "c",
                    "a_lo", "a_hi", "b_lo", "b_hi", "c_lo", "c_hi"])
        for rec in fits:
            f = rec.fit
            bounds = [x for pair in f.cb95 for x in pair]
            w.writerow([rec.epoch, rec.channel, rec.segment,
                        _r(f.a), _r(f.b), _r(f.c)] + [_r(x) for x in bounds])


def write_response_csv(kernel, fs: float, path, n_points: int = 1024) -> None:
    freqs = np.linspace(0.0, fs / 2.0, n_points)
    mags = np.abs(frequency_response(kernel, freqs, fs))
    with open(path, "w", newline="\n") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["freq_hz", "magnitude"])
        for f, m in zip(freqs, mags):
            w.writerow([_r(f), _r(m)])


# --- pipeline ----------------------------------------------------------------

@dataclass
class PipelineConfig:
    """Everything a pipeline run needs; exactly one input source allowed."""

    edf: str | None = None
    annotations: str | None = None
    synthetic: str | None = None
    channels: list[str] | None = None
    window_seconds: float = 1.0
    skip_factor: int | None = None
    fit_scope: str = "segment"
    variance_weights: bool = False
    annotated_only: bool = False
    trees: int = 100
    mtry: int = 2
    min_node: int = 1
    max_depth: int | None = None
    folds: int = 20
    repeats: int = 25
    group_by_epoch: bool = False
    seed: int = 0
    out_dir: str = field(default_factory=lambda: os.environ.get(OUT_DIR_ENV, "."))
    dump_response: bool = False
    dump_fits: bool = False

    def validate(self) -> None:
        if (self.edf is None) == (self.synthetic is None):
            raise ConfigError("exactly one of --in/--synthetic is required")
        if self.synthetic is not None and self.annotations is not None:
            raise ConfigError("--ann only applies to recorded input")
        for path in (self.edf, self.annotations, self.synthetic):
            if path is not None and not Path(path).exists():
                raise ConfigError(f"input path does not exist: {path}")
        if self.fit_scope not in ("segment", "epoch"):
            raise ConfigError(f"bad fit_scope {self.fit_scope!r}")

    @classmethod
    def from_json(cls, path) -> "PipelineConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def run_pipeline(config: PipelineConfig) -> dict:
    """Run the five stages end to end and write all artifacts to out_dir.

    Writes features.csv, features_normalized.csv, scaler.json, model.json,
    report.json, report_repeats.csv (plus recording.edf/annotations.csv for
    synthetic input and the optional response/fits dumps). A `.incomplete`
    marker exists while the run is in flight and stays behind on failure.
    Returns the report summary.
    """
    config.validate()
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    marker = out / ".incomplete"
    marker.write_text("pipeline in progress\n")

    if config.synthetic is not None:
        spec = SyntheticSpec.load(config.synthetic)
        recording, _ = synthesize_recording(spec)
        intervals = epoch_intervals(spec)
        # round-trip through EDF so staged runs see identical samples
        write_edf(recording, out / "recording.edf")
        write_annotations(intervals, out / "annotations.csv")
        recording = read_recording(out / "recording.edf", config.channels)
        intervals = load_annotations(out / "annotations.csv")
    else:
        recording = read_recording(config.edf, config.channels)
        intervals = (load_annotations(config.annotations)
                     if config.annotations else [])

    if config.dump_response:
        kernel = kernel_for_rate(recording.sampling_rate_hz, config.skip_factor)
        write_response_csv(kernel, recording.sampling_rate_hz,
                           out / "response.csv")

    extraction = extract_features(
        recording, intervals, window_seconds=config.window_seconds,
        skip_factor=config.skip_factor, fit_scope="segment",
        variance_weights=config.variance_weights,
        annotated_only=config.annotated_only)
    features = extraction.features
    write_features_csv(features, out / "features.csv")

    if config.dump_fits:
        if config.fit_scope == "segment":
            fits = extraction.fits
        else:
            fits = extract_features(
                recording, intervals, window_seconds=config.window_seconds,
                skip_factor=config.skip_factor, fit_scope="epoch",
                variance_weights=config.variance_weights).fits
        write_fits_csv(fits, out / "fits.csv")

    scaler = fit_scaler(features)
    scaler.save(out / "scaler.json")
    X = np.array([v.as_array() for v in features])
    normalized = scaler.transform_array(X)
    write_features_csv([v.replace_values(row) for v, row in zip(features, normalized)],
                       out / "features_normalized.csv")

    dataset = Dataset(normalized, np.array([v.label for v in features]))
    model = train_forest(dataset, n_trees=config.trees, m_try=config.mtry,
                         seed=config.seed, min_node_size=config.min_node,
                         max_depth=config.max_depth)
    model.save(out / "model.json")

    report = cross_validate(
        features, k=config.folds, repeats=config.repeats,
        forest=ForestConfig(n_trees=config.trees, m_try=config.mtry,
                            min_node_size=config.min_node,
                            max_depth=config.max_depth),
        seed=config.seed, group_by_epoch=config.group_by_epoch)
    report.save(out / "report.json")
    report.save_repeats_csv(out / "report_repeats.csv")

    marker.unlink()
    summary = report.summary()
    summary["oob_error"] = model.oob_error
    summary["skipped_fits"] = extraction.skipped
    return summary


def format_summary(summary: dict) -> str:
    """One metrics line for the console."""
    parts = []
    for name in ("accuracy", "tpr", "tnr", "fpr"):
        s = summary[name]
        if s["mean"] is None:
            parts.append(f"{name}=undefined")
        else:
            parts.append(f"{name}={s['mean']:.4f}+-{s['sd']:.4f}")
    if summary.get("oob_error") is not None:
        parts.append(f"oob_error={summary['oob_error']:.4f}")
    return " ".join(parts)
