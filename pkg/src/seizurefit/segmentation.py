"""Non-overlapping rectangular windowing and segment labeling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .edf import SEIZURE_LABEL, EegRecording, LabeledInterval
from .errors import WindowTooLong

NON_SEIZURE = 0
SEIZURE = 1


@dataclass
class Segment:
    """One window of samples (window_len x channels), copied verbatim."""

    samples: np.ndarray
    start_s: float
    index: int
    label: int | None = None
    epoch: int = -1  # index of the annotated interval containing the midpoint

    @property
    def window_len(self) -> int:
        return self.samples.shape[0]


def segment(recording: EegRecording, window_s: float = 1.0) -> list[Segment]:
    """Split into consecutive disjoint windows; a trailing partial window is
    discarded rather than zero-padded."""
    if window_s <= 0:
        raise ValueError("window_s must be positive")
    window_len = int(round(recording.sampling_rate_hz * window_s))
    n = recording.n_samples
    if window_len > n:
        raise WindowTooLong(
            f"window of {window_len} samples exceeds recording of {n}")
    count = n // window_len
    return [
        Segment(
            samples=recording.samples[i * window_len:(i + 1) * window_len].copy(),
            start_s=i * window_s,
            index=i,
        )
        for i in range(count)
    ]


def label_segments(segments: list[Segment],
                   intervals: list[LabeledInterval],
                   window_s: float = 1.0) -> list[Segment]:
    """Assign labels in place: a segment is seizure iff its midpoint falls in
    a seizure interval. The epoch field records which annotated interval (of
    any label) contains the midpoint, -1 if none."""
    ordered = sorted(intervals, key=lambda iv: iv.onset_s)
    for seg in segments:
        mid = seg.start_s + window_s / 2.0
        seg.label = NON_SEIZURE
        seg.epoch = -1
        for k, iv in enumerate(ordered):
            if iv.contains(mid):
                seg.epoch = k
                if iv.label == SEIZURE_LABEL:
                    seg.label = SEIZURE
                break
    return segments
