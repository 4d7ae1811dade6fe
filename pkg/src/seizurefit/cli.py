"""`detect` command-line interface.

Subcommands mirror the pipeline stages (ingest, synth, filter, fit, features,
train, evaluate) plus the monolithic `pipeline`; intermediate artifacts are
plain CSV/JSON so stages compose. Exit codes: 0 success, 2 configuration
error, 3 data error, 4 numerical degeneracy.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys

import numpy as np

from . import __version__
from .central_diff import apply_filter, kernel_for_rate
from .edf import load_annotations, read_recording, write_annotations, write_edf
from .errors import ConfigError, DataError, NumericalError, SeizureFitError
from .evaluation import ForestConfig, cross_validate
from .forest import Dataset, backend, train_forest
from .gof import fit_scaler, pointwise_r_square
from .parabolic import predict as predict_curve
from .parabolic import quadratic_pairs
from .pipeline import (
    OUT_DIR_ENV,
    PipelineConfig,
    extract_features,
    format_summary,
    read_features_csv,
    run_pipeline,
    write_features_csv,
    write_fits_csv,
    write_response_csv,
)
from .synthetic import SyntheticSpec, demo_corpus_spec, epoch_intervals, synthesize_recording


def _add_input_args(p, ann_help="seizure interval CSV (onset_s,offset_s,label)"):
    p.add_argument("--in", dest="edf", required=True, help="EDF recording")
    p.add_argument("--ann", help=ann_help)
    p.add_argument("--channels", help="comma-separated channel labels to keep")


def _add_extract_args(p):
    p.add_argument("--window-seconds", type=float, default=1.0)
    p.add_argument("--skip-factor", type=int, help="override L (default Fs/5 rounded)")
    p.add_argument("--weights", choices=["uniform", "inverse-variance"],
                   default="uniform")
    p.add_argument("--annotated-only", action="store_true",
                   help="keep only segments inside annotated intervals")
    p.add_argument("--epoch-offset", type=int, default=0,
                   help="shift epoch ids (for merging per-recording CSVs)")


def _add_forest_args(p):
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--mtry", type=int, default=2)
    p.add_argument("--min-node", type=int, default=1)
    p.add_argument("--max-depth", type=int)
    p.add_argument("--seed", type=int, default=0)


def _channels(args):
    return args.channels.split(",") if args.channels else None


def _load_input(args):
    recording = read_recording(args.edf, _channels(args))
    intervals = load_annotations(args.ann) if args.ann else []
    return recording, intervals


def cmd_ingest(args) -> int:
    recording, intervals = _load_input(args)
    print(f"channels: {len(recording.channel_labels)} "
          f"({', '.join(recording.channel_labels)})")
    print(f"sampling_rate_hz: {recording.sampling_rate_hz}")
    print(f"samples: {recording.n_samples} ({recording.duration_s:.1f} s)")
    print(f"intervals: {len(intervals)}")
    if args.dump_samples:
        with open(args.dump_samples, "w", newline="\n") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t_s"] + recording.channel_labels)
            t = np.arange(recording.n_samples) / recording.sampling_rate_hz
            for i in range(recording.n_samples):
                w.writerow([repr(float(t[i]))] +
                           [repr(float(v)) for v in recording.samples[i]])
        print(f"wrote {args.dump_samples}")
    return 0


def cmd_synth(args) -> int:
    if args.write_demo_spec:
        spec = demo_corpus_spec(seed=args.seed)
        spec.save(args.write_demo_spec)
        print(f"wrote {args.write_demo_spec}")
        return 0
    if not (args.spec and args.edf and args.ann):
        raise ConfigError("synth needs --spec, --edf and --ann "
                          "(or --write-demo-spec)")
    spec = SyntheticSpec.load(args.spec)
    recording, _ = synthesize_recording(spec)
    write_edf(recording, args.edf)
    # gaps between seizure bursts are non-seizure by construction
    write_annotations(epoch_intervals(spec), args.ann)
    print(f"wrote {args.edf} ({recording.n_samples} samples x "
          f"{recording.n_channels} channels) and {args.ann}")
    return 0


def cmd_filter(args) -> int:
    if args.dump_response:
        kernel = kernel_for_rate(args.fs, args.skip_factor)
        write_response_csv(kernel, args.fs, args.dump_response)
        print(f"wrote {args.dump_response} (L={kernel.skip_factor})")
        return 0
    if not (args.edf and args.out):
        raise ConfigError("filter needs --dump-response or --in with --out")
    recording = read_recording(args.edf, _channels(args))
    kernel = kernel_for_rate(recording.sampling_rate_hz, args.skip_factor)
    filtered = apply_filter(recording.samples, kernel)
    with open(args.out, "w", newline="\n") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t_s"] + recording.channel_labels)
        t = np.arange(recording.n_samples) / recording.sampling_rate_hz
        for i in range(filtered.shape[0]):
            w.writerow([repr(float(t[i]))] +
                       [repr(float(v)) for v in filtered[i]])
    print(f"wrote {args.out} (L={kernel.skip_factor})")
    return 0


def cmd_fit(args) -> int:
    recording, intervals = _load_input(args)
    result = extract_features(
        recording, intervals, window_seconds=args.window_seconds,
        skip_factor=args.skip_factor, fit_scope=args.fit_scope,
        variance_weights=args.weights == "inverse-variance",
        annotated_only=args.annotated_only, epoch_offset=args.epoch_offset)
    write_fits_csv(result.fits, args.out)
    print(f"wrote {args.out} ({len(result.fits)} fits, "
          f"{result.skipped} skipped)")
    return 0


def cmd_features(args) -> int:
    recording, intervals = _load_input(args)
    result = extract_features(
        recording, intervals, window_seconds=args.window_seconds,
        skip_factor=args.skip_factor, fit_scope=args.fit_scope,
        variance_weights=args.weights == "inverse-variance",
        annotated_only=args.annotated_only, epoch_offset=args.epoch_offset)
    write_features_csv(result.features, args.out)
    if args.pointwise_r2:
        _report_pointwise_r2(recording, intervals, args)
    print(f"wrote {args.out} ({len(result.features)} rows, "
          f"{result.skipped} skipped)")
    return 0


def _report_pointwise_r2(recording, intervals, args) -> None:
    # debug comparison of the per-point-ratio R-square against phi
    from .parabolic import fit_model
    from .segmentation import label_segments, segment
    kernel = kernel_for_rate(recording.sampling_rate_hz, args.skip_factor)
    segs = label_segments(segment(recording, args.window_seconds), intervals,
                          args.window_seconds)
    diffs, diverged = [], 0
    for seg in segs[:50]:
        filtered = apply_filter(seg.samples, kernel)
        for c in range(filtered.shape[1]):
            pairs = quadratic_pairs(filtered[:, c])
            fit = fit_model(pairs)
            yhat = predict_curve(fit, pairs.x)
            resid = pairs.y - yhat
            sst = np.sum((pairs.y - pairs.y.mean()) ** 2)
            phi = 1.0 - float(np.sum(resid * resid)) / float(sst)
            try:
                lit = pointwise_r_square(pairs.y, yhat)
                diffs.append(abs(lit - phi))
            except NumericalError:
                diverged += 1
    msg = (f"pointwise-r2 check over {len(diffs) + diverged} fits: "
           f"{diverged} diverged")
    if diffs:
        msg += f", max |literal - phi| = {max(diffs):.3g}"
    print(msg, file=sys.stderr)


def cmd_train(args) -> int:
    features = read_features_csv(args.features)
    scaler = fit_scaler(features)
    X = scaler.transform_array(np.array([v.as_array() for v in features]))
    dataset = Dataset(X, np.array([v.label for v in features]))
    model = train_forest(dataset, n_trees=args.trees, m_try=args.mtry,
                         seed=args.seed, min_node_size=args.min_node,
                         max_depth=args.max_depth)
    model.save(args.model)
    scaler.save(args.scaler)
    oob = "n/a" if model.oob_error is None else f"{model.oob_error:.4f}"
    print(f"wrote {args.model} and {args.scaler} (J={model.n_trees}, "
          f"oob_error={oob})")
    return 0


def cmd_evaluate(args) -> int:
    features = read_features_csv(args.features)
    report = cross_validate(
        features, k=args.folds, repeats=args.repeats,
        forest=ForestConfig(n_trees=args.trees, m_try=args.mtry,
                            min_node_size=args.min_node,
                            max_depth=args.max_depth),
        seed=args.seed, group_by_epoch=args.group_by_epoch)
    report.save(args.report)
    if args.repeats_csv:
        report.save_repeats_csv(args.repeats_csv)
    print(format_summary(report.summary()))
    return 0


def cmd_pipeline(args) -> int:
    if args.config:
        config = PipelineConfig.from_json(args.config)
    else:
        config = PipelineConfig()
    # flags override the config file; booleans only when actually given
    for name in ("edf", "annotations", "synthetic", "window_seconds",
                 "skip_factor", "fit_scope", "trees", "mtry", "min_node",
                 "max_depth", "folds", "repeats", "seed", "out_dir"):
        value = getattr(args, name)
        if value is not None:
            setattr(config, name, value)
    if args.channels:
        config.channels = args.channels.split(",")
    if args.weights:
        config.variance_weights = args.weights == "inverse-variance"
    for flag in ("annotated_only", "group_by_epoch", "dump_response", "dump_fits"):
        if getattr(args, flag):
            setattr(config, flag, True)
    summary = run_pipeline(config)
    print(format_summary(summary))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="detect",
        description="EEG seizure detection via central-difference filtering, "
                    "parabolic curve fitting and a random forest over the "
                    "fit statistics.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__} (kernel: {backend()})")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse an EDF recording and annotations")
    _add_input_args(p)
    p.add_argument("--dump-samples", help="write samples to CSV")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("synth", help="generate a synthetic labeled recording")
    p.add_argument("--spec", help="synthetic spec JSON")
    p.add_argument("--edf", help="output EDF path")
    p.add_argument("--ann", help="output annotation CSV path")
    p.add_argument("--write-demo-spec", metavar="PATH",
                   help="write the 33+33 epoch demo corpus spec and exit")
    p.add_argument("--seed", type=int, default=7,
                   help="seed for --write-demo-spec")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("filter", help="apply the differentiator / dump its response")
    p.add_argument("--in", dest="edf", help="EDF recording to filter")
    p.add_argument("--channels")
    p.add_argument("--out", help="filtered samples CSV")
    p.add_argument("--fs", type=float, default=256.0,
                   help="sampling rate for --dump-response without --in")
    p.add_argument("--skip-factor", type=int)
    p.add_argument("--dump-response", metavar="CSV",
                   help="write freq_hz,magnitude rows")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("fit", help="export parabolic fits with confidence bounds")
    _add_input_args(p)
    _add_extract_args(p)
    p.add_argument("--fit-scope", choices=["segment", "epoch"], default="segment")
    p.add_argument("--out", required=True, help="fits CSV path")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("features", help="extract the four fit statistics")
    _add_input_args(p)
    _add_extract_args(p)
    p.add_argument("--fit-scope", choices=["segment", "epoch"], default="segment")
    p.add_argument("--out", required=True, help="features CSV path")
    p.add_argument("--pointwise-r2", action="store_true",
                   help="debug: compare the per-point-ratio R-square to phi")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("train", help="train a forest on a features CSV")
    p.add_argument("--features", required=True)
    p.add_argument("--model", required=True, help="model JSON path")
    p.add_argument("--scaler", required=True, help="scaler JSON path")
    _add_forest_args(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="repeated k-fold cross-validation")
    p.add_argument("--features", required=True)
    p.add_argument("--report", required=True, help="report JSON path")
    p.add_argument("--repeats-csv", help="per-repeat metrics CSV")
    p.add_argument("--folds", type=int, default=20)
    p.add_argument("--repeats", type=int, default=25)
    p.add_argument("--group-by-epoch", action="store_true")
    _add_forest_args(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("pipeline", help="run every stage end to end")
    p.add_argument("--config", help="pipeline config JSON")
    p.add_argument("--in", dest="edf", help="EDF recording")
    p.add_argument("--ann", dest="annotations")
    p.add_argument("--synthetic", help="synthetic spec JSON")
    p.add_argument("--channels")
    p.add_argument("--window-seconds", type=float)
    p.add_argument("--skip-factor", type=int)
    p.add_argument("--fit-scope", choices=["segment", "epoch"])
    p.add_argument("--weights", choices=["uniform", "inverse-variance"])
    p.add_argument("--annotated-only", action="store_true")
    p.add_argument("--trees", type=int)
    p.add_argument("--mtry", type=int)
    p.add_argument("--min-node", type=int)
    p.add_argument("--max-depth", type=int)
    p.add_argument("--folds", type=int)
    p.add_argument("--repeats", type=int)
    p.add_argument("--group-by-epoch", action="store_true")
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir",
                   help=f"output directory (default: ${OUT_DIR_ENV} or .)")
    p.add_argument("--dump-response", action="store_true")
    p.add_argument("--dump-fits", action="store_true")
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error (config): {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"error (numerical): {exc}", file=sys.stderr)
        return 4
    except DataError as exc:
        print(f"error (data): {exc}", file=sys.stderr)
        return 3
    except SeizureFitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"error (config): {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
