"""Labeled surrogate EEG so the pipeline runs without clinical data.

Background activity is spectrally shaped Gaussian noise (1/f^alpha), scaled
per channel to an exact sample standard deviation. Seizure stretches add a
fixed-frequency sinusoidal burst with a random phase per (channel, interval).
Everything is driven by one numpy Generator, so a spec + seed is bitwise
reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .edf import (
    NON_SEIZURE_LABEL,
    SEIZURE_LABEL,
    EegRecording,
    LabeledInterval,
    complement_intervals,
)
from .errors import ConfigError


@dataclass
class BackgroundSpec:
    amplitude_uv: float = 20.0
    spectral_alpha: float = 1.0  # 0 = white, 1 = pink, 2 = brown


@dataclass
class SeizureSpec:
    # 3-5 Hz high-amplitude oscillation sits inside the filter's pass region;
    # defaults are 4 Hz at 10x the background scale.
    frequency_hz: float = 4.0
    amplitude_uv: float = 200.0


@dataclass
class SyntheticSpec:
    duration_s: float = 60.0
    sampling_rate_hz: float = 256.0
    num_channels: int = 2
    background: BackgroundSpec = field(default_factory=BackgroundSpec)
    seizure: SeizureSpec = field(default_factory=SeizureSpec)
    seizure_intervals: list[LabeledInterval] = field(default_factory=list)
    rng_seed: int = 0

    def __post_init__(self):
        if self.duration_s <= 0 or self.sampling_rate_hz <= 0:
            raise ConfigError("duration and sampling rate must be positive")
        if self.num_channels < 1:
            raise ConfigError("need at least one channel")
        ivs = sorted(self.seizure_intervals, key=lambda iv: iv.onset_s)
        for iv in ivs:
            if iv.offset_s > self.duration_s:
                raise ConfigError(f"interval {iv} ends after {self.duration_s}s")
        for prev, cur in zip(ivs, ivs[1:]):
            if cur.onset_s < prev.offset_s:
                raise ConfigError(f"seizure intervals overlap: {prev} / {cur}")
        self.seizure_intervals = ivs

    def to_dict(self) -> dict:
        return {
            "duration_s": self.duration_s,
            "sampling_rate_hz": self.sampling_rate_hz,
            "num_channels": self.num_channels,
            "background": {
                "amplitude_uv": self.background.amplitude_uv,
                "spectral_alpha": self.background.spectral_alpha,
            },
            "seizure": {
                "frequency_hz": self.seizure.frequency_hz,
                "amplitude_uv": self.seizure.amplitude_uv,
            },
            "seizure_intervals": [
                {"onset_s": iv.onset_s, "offset_s": iv.offset_s}
                for iv in self.seizure_intervals
            ],
            "rng_seed": self.rng_seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SyntheticSpec":
        try:
            return cls(
                duration_s=d["duration_s"],
                sampling_rate_hz=d["sampling_rate_hz"],
                num_channels=d["num_channels"],
                background=BackgroundSpec(**d.get("background", {})),
                seizure=SeizureSpec(**d.get("seizure", {})),
                seizure_intervals=[
                    LabeledInterval(iv["onset_s"], iv["offset_s"], SEIZURE_LABEL)
                    for iv in d.get("seizure_intervals", [])
                ],
                rng_seed=d.get("rng_seed", 0),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"bad synthetic spec: {exc}") from exc

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n",
                              newline="\n")

    @classmethod
    def load(cls, path) -> "SyntheticSpec":
        try:
            return cls.from_dict(json.loads(Path(path).read_text()))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad synthetic spec JSON: {exc}") from exc


def _shaped_noise(rng: np.random.Generator, n: int, alpha: float) -> np.ndarray:
    """Zero-mean unit-std noise with a 1/f^(alpha/2) amplitude spectrum."""
    white = rng.standard_normal(n)
    if alpha == 0.0:
        shaped = white
    else:
        spectrum = np.fft.rfft(white)
        freqs = np.fft.rfftfreq(n)
        scale = np.ones_like(freqs)
        nonzero = freqs > 0
        scale[nonzero] = freqs[nonzero] ** (-alpha / 2.0)
        scale[0] = 0.0  # drop DC
        shaped = np.fft.irfft(spectrum * scale, n)
    shaped = shaped - shaped.mean()
    std = shaped.std()
    return shaped / std if std > 0 else shaped


def synthesize_recording(spec: SyntheticSpec) -> tuple[EegRecording, list[LabeledInterval]]:
    """Generate a recording per spec; returns it with the seizure intervals.

    Deterministic for a fixed spec: two calls yield bitwise-identical
    matrices.
    """
    fs = spec.sampling_rate_hz
    n = int(round(spec.duration_s * fs))
    m = spec.num_channels
    rng = np.random.default_rng(spec.rng_seed)

    samples = np.empty((n, m), dtype=np.float64)
    for ch in range(m):
        samples[:, ch] = spec.background.amplitude_uv * _shaped_noise(
            rng, n, spec.background.spectral_alpha)

    t = np.arange(n) / fs
    omega = 2.0 * np.pi * spec.seizure.frequency_hz
    for ch in range(m):
        for iv in spec.seizure_intervals:
            phase = rng.uniform(0.0, 2.0 * np.pi)
            mask = (t >= iv.onset_s) & (t < iv.offset_s)
            samples[mask, ch] += spec.seizure.amplitude_uv * np.sin(
                omega * (t[mask] - iv.onset_s) + phase)

    labels = [f"CH{c + 1}" for c in range(m)]
    recording = EegRecording(samples=samples, sampling_rate_hz=fs,
                             channel_labels=labels)
    return recording, list(spec.seizure_intervals)


def epoch_intervals(spec: SyntheticSpec) -> list[LabeledInterval]:
    """Full epoch labeling: seizure intervals plus their non-seizure gaps."""
    gaps = complement_intervals(spec.seizure_intervals, spec.duration_s,
                                NON_SEIZURE_LABEL)
    return sorted(spec.seizure_intervals + gaps, key=lambda iv: iv.onset_s)


def demo_corpus_spec(*, epochs_per_class: int = 33, epoch_s: float = 8.0,
                     num_channels: int = 2, sampling_rate_hz: float = 256.0,
                     seed: int = 7) -> SyntheticSpec:
    """Spec for the balanced demo corpus: alternating background / burst
    epochs of equal length, 4 Hz bursts at 10x the background scale."""
    intervals = [
        LabeledInterval((2 * i + 1) * epoch_s, (2 * i + 2) * epoch_s, SEIZURE_LABEL)
        for i in range(epochs_per_class)
    ]
    return SyntheticSpec(
        duration_s=2 * epochs_per_class * epoch_s,
        sampling_rate_hz=sampling_rate_hz,
        num_channels=num_channels,
        background=BackgroundSpec(amplitude_uv=20.0, spectral_alpha=1.0),
        seizure=SeizureSpec(frequency_hz=4.0, amplitude_uv=200.0),
        seizure_intervals=intervals,
        rng_seed=seed,
    )
