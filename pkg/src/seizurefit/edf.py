"""EDF parsing/writing and seizure-interval annotations.

Implements the classic EDF layout: a 256-byte ASCII main header, 256 bytes of
ASCII per signal, then data records of 16-bit little-endian two's-complement
samples. Annotations live in a CSV sidecar `onset_s,offset_s,label` (header
row required) because free-text onset summaries parse ambiguously.

EDF+ TALs, BDF and montage handling are out of scope.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

import numpy as np

from .errors import (
    DataError,
    InvalidRange,
    MixedSamplingRates,
    NonNumericField,
    OrderError,
    OverlapError,
    TruncatedHeader,
    TruncatedRecord,
    UnknownChannelLabel,
)

SEIZURE_LABEL = "seizure"
NON_SEIZURE_LABEL = "non_seizure"

# main header field widths: version, patient, recording, date, time,
# header bytes, reserved, num records, record duration, num signals
_MAIN_FIELDS = (8, 80, 80, 8, 8, 8, 44, 8, 8, 4)
# per-signal field widths: label, transducer, dimension, phys min/max,
# dig min/max, prefilter, samples per record, reserved
_SIGNAL_FIELDS = (16, 80, 8, 8, 8, 8, 8, 80, 8, 32)


@dataclass
class SignalHeader:
    label: str
    physical_dimension: str
    physical_min: float
    physical_max: float
    digital_min: int
    digital_max: int
    samples_per_record: int

    @property
    def gain(self) -> float:
        return (self.physical_max - self.physical_min) / (self.digital_max - self.digital_min)

    def to_physical(self, digital: np.ndarray) -> np.ndarray:
        return self.physical_min + (digital - self.digital_min) * self.gain


@dataclass
class RecordingHeader:
    version_tag: str
    patient_id: str
    recording_id: str
    start_datetime: datetime
    num_records: int
    record_duration_s: float
    num_signals: int
    signals: list[SignalHeader]

    @property
    def header_bytes(self) -> int:
        return 256 * (1 + self.num_signals)


@dataclass
class EegRecording:
    """Physical-unit sample matrix, N time steps x M channels (microvolts
    unless the EDF dimension field says otherwise)."""

    samples: np.ndarray
    sampling_rate_hz: float
    channel_labels: list[str]

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 2:
            raise ValueError("samples must be 2-D (time x channels)")
        if self.samples.shape[0] < 1 or self.samples.shape[1] < 1:
            raise ValueError("empty recording")
        if self.samples.shape[1] != len(self.channel_labels):
            raise ValueError("channel label count does not match sample columns")
        if self.sampling_rate_hz <= 0:
            raise ValueError("sampling rate must be positive")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("non-finite sample value")

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def n_channels(self) -> int:
        return self.samples.shape[1]

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.sampling_rate_hz


@dataclass(frozen=True)
class LabeledInterval:
    """Half-open [onset_s, offset_s) interval with a class label."""

    onset_s: float
    offset_s: float
    label: str = SEIZURE_LABEL

    def __post_init__(self):
        if self.offset_s <= self.onset_s:
            raise OrderError(f"offset {self.offset_s} <= onset {self.onset_s}")
        if self.onset_s < 0:
            raise OrderError(f"negative onset {self.onset_s}")
        if self.label not in (SEIZURE_LABEL, NON_SEIZURE_LABEL):
            raise DataError(f"unknown interval label {self.label!r}")

    def contains(self, t: float) -> bool:
        return self.onset_s <= t < self.offset_s


def _field(raw: bytes, start: int, width: int) -> str:
    return raw[start:start + width].decode("ascii", errors="replace").strip()


def _int_field(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise NonNumericField(f"{what}: {text!r}") from None


def _float_field(text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise NonNumericField(f"{what}: {text!r}") from None


def parse_edf_header(data: bytes) -> RecordingHeader:
    """Decode the fixed-width ASCII header (main block + one per signal)."""
    if len(data) < 256:
        raise TruncatedHeader(f"need 256 bytes for the main header, got {len(data)}")

    pos = 0
    fields = []
    for width in _MAIN_FIELDS:
        fields.append(_field(data, pos, width))
        pos += width
    (version, patient, recording, date_s, time_s, _hdr_bytes, _reserved,
     nrec_s, dur_s, ns_s) = fields

    num_signals = _int_field(ns_s, "number of signals")
    if num_signals < 1:
        raise NonNumericField(f"number of signals must be >= 1, got {num_signals}")
    needed = 256 * (1 + num_signals)
    if len(data) < needed:
        raise TruncatedHeader(f"need {needed} header bytes for {num_signals} signals, got {len(data)}")

    num_records = _int_field(nrec_s, "number of records")
    if num_records < 1 and num_records != -1:
        raise NonNumericField(f"number of records must be >= 1 or -1, got {num_records}")
    record_duration = _float_field(dur_s, "record duration")

    start = _parse_start(date_s, time_s)

    # per-signal values are stored as ns consecutive fields per column
    def column(col: int, width: int):
        base = 256 + sum(w * num_signals for w in _SIGNAL_FIELDS[:col])
        return [_field(data, base + i * width, width) for i in range(num_signals)]

    labels = column(0, 16)
    dims = column(2, 8)
    pmins = column(3, 8)
    pmaxs = column(4, 8)
    dmins = column(5, 8)
    dmaxs = column(6, 8)
    sprs = column(8, 8)

    signals = []
    for i in range(num_signals):
        dmin = _int_field(dmins[i], f"digital min of signal {i}")
        dmax = _int_field(dmaxs[i], f"digital max of signal {i}")
        if dmin >= dmax:
            raise InvalidRange(f"signal {i}: digital_min {dmin} >= digital_max {dmax}")
        signals.append(SignalHeader(
            label=labels[i],
            physical_dimension=dims[i] or "uV",
            physical_min=_float_field(pmins[i], f"physical min of signal {i}"),
            physical_max=_float_field(pmaxs[i], f"physical max of signal {i}"),
            digital_min=dmin,
            digital_max=dmax,
            samples_per_record=_int_field(sprs[i], f"samples per record of signal {i}"),
        ))

    return RecordingHeader(
        version_tag=version,
        patient_id=patient,
        recording_id=recording,
        start_datetime=start,
        num_records=num_records,
        record_duration_s=record_duration,
        num_signals=num_signals,
        signals=signals,
    )


def _parse_start(date_s: str, time_s: str) -> datetime:
    try:
        day, month, yy = (int(p) for p in date_s.split("."))
        hour, minute, second = (int(p) for p in time_s.split("."))
    except ValueError:
        raise NonNumericField(f"start date/time: {date_s!r} {time_s!r}") from None
    year = yy + (2000 if yy < 85 else 1900)  # EDF clipping-date pivot
    return datetime(year, month, day, hour, minute, second)


def read_recording(source, channels: list[str] | None = None) -> EegRecording:
    """Read an EDF file into physical units.

    `source` is a path, bytes, or a binary file object. `channels` optionally
    selects (and orders) channels by label. All signals in the file must share
    one sampling rate; multi-rate files are rejected, not resampled.
    """
    data = _read_bytes(source)
    header = parse_edf_header(data)

    rates = {s.samples_per_record / header.record_duration_s for s in header.signals}
    if len(rates) != 1:
        raise MixedSamplingRates(f"signals disagree on sampling rate: {sorted(rates)}")
    fs = rates.pop()

    if channels is None:
        selected = list(range(header.num_signals))
    else:
        by_label = {s.label: i for i, s in enumerate(header.signals)}
        missing = [c for c in channels if c not in by_label]
        if missing:
            raise UnknownChannelLabel(f"channel(s) {missing} not in {sorted(by_label)}")
        selected = [by_label[c] for c in channels]

    body = data[header.header_bytes:]
    spr = [s.samples_per_record for s in header.signals]
    record_values = sum(spr)
    record_bytes = record_values * 2
    num_records = header.num_records
    if num_records == -1:
        if record_bytes == 0 or len(body) % record_bytes:
            raise TruncatedRecord("data length is not a whole number of records")
        num_records = len(body) // record_bytes
    if len(body) < num_records * record_bytes:
        raise TruncatedRecord(
            f"expected {num_records * record_bytes} data bytes, got {len(body)}")

    raw = np.frombuffer(body, dtype="<i2", count=num_records * record_values)
    raw = raw.reshape(num_records, record_values)
    offsets = np.cumsum([0] + spr)

    cols = []
    labels = []
    for i in selected:
        sig = header.signals[i]
        digital = raw[:, offsets[i]:offsets[i + 1]].reshape(-1).astype(np.float64)
        cols.append(sig.to_physical(digital))
        labels.append(sig.label)
    return EegRecording(samples=np.column_stack(cols), sampling_rate_hz=fs,
                        channel_labels=labels)


def _read_bytes(source) -> bytes:
    if isinstance(source, (bytes, bytearray)):
        return bytes(source)
    if isinstance(source, (str, Path)):
        return Path(source).read_bytes()
    return source.read()


def _format_float8(value: float) -> str:
    """Render a float into <= 8 ASCII chars, EDF-style."""
    for fmt in ("%g", "%.5g", "%.4g", "%.3g", "%.2g"):
        text = fmt % value
        if len(text) <= 8:
            return text
    raise ValueError(f"cannot encode {value} in 8 chars")


def write_edf(recording: EegRecording, target, *, patient_id: str = "X",
              recording_id: str = "synthetic",
              start: datetime = datetime(2000, 1, 1, 0, 0, 0)) -> None:
    """Write a recording as 16-bit EDF with 1-second data records.

    The sampling rate must be a whole number and the sample count a whole
    number of records. Physical ranges are written to the header first and
    the parsed-back values drive quantization, so a round trip reproduces
    every sample within one digital step.
    """
    fs = recording.sampling_rate_hz
    if fs != int(fs):
        raise ValueError("EDF writer requires an integer sampling rate")
    spr = int(fs)
    n, m = recording.samples.shape
    if n % spr:
        raise ValueError("sample count must be a whole number of 1-second records")
    num_records = n // spr

    dig_min, dig_max = -32768, 32767
    ranges = []
    for c in range(m):
        col = recording.samples[:, c]
        lo, hi = float(col.min()), float(col.max())
        if lo == hi:
            lo, hi = lo - 1.0, hi + 1.0
        # round outward through the 8-char header encoding, then reparse:
        # quantization must use exactly what a reader will see
        lo_s = _format_float8(lo)
        hi_s = _format_float8(hi)
        lo_w, hi_w = float(lo_s), float(hi_s)
        while lo_w > lo:
            lo_s = _format_float8(lo_w - max(abs(lo_w) * 1e-4, 1e-4))
            lo_w = float(lo_s)
        while hi_w < hi:
            hi_s = _format_float8(hi_w + max(abs(hi_w) * 1e-4, 1e-4))
            hi_w = float(hi_s)
        ranges.append((lo_s, hi_s, lo_w, hi_w))

    out = io.BytesIO()

    def put(text: str, width: int):
        enc = text.encode("ascii")
        if len(enc) > width:
            raise ValueError(f"field {text!r} exceeds {width} bytes")
        out.write(enc.ljust(width))

    put("0", 8)
    put(patient_id, 80)
    put(recording_id, 80)
    put(start.strftime("%d.%m.%y"), 8)
    put(start.strftime("%H.%M.%S"), 8)
    put(str(256 * (1 + m)), 8)
    put("", 44)
    put(str(num_records), 8)
    put("1", 8)
    put(str(m), 4)

    for label in recording.channel_labels:
        put(label, 16)
    for _ in range(m):
        put("", 80)  # transducer
    for _ in range(m):
        put("uV", 8)
    for lo_s, _, _, _ in ranges:
        put(lo_s, 8)
    for _, hi_s, _, _ in ranges:
        put(hi_s, 8)
    for _ in range(m):
        put(str(dig_min), 8)
    for _ in range(m):
        put(str(dig_max), 8)
    for _ in range(m):
        put("", 80)  # prefiltering
    for _ in range(m):
        put(str(spr), 8)
    for _ in range(m):
        put("", 32)  # reserved

    digital = np.empty((n, m), dtype=np.int16)
    for c, (_, _, lo_w, hi_w) in enumerate(ranges):
        gain = (hi_w - lo_w) / (dig_max - dig_min)
        d = np.rint((recording.samples[:, c] - lo_w) / gain) + dig_min
        digital[:, c] = np.clip(d, dig_min, dig_max).astype(np.int16)

    for r in range(num_records):
        block = digital[r * spr:(r + 1) * spr]
        for c in range(m):
            out.write(block[:, c].astype("<i2").tobytes())

    payload = out.getvalue()
    if isinstance(target, (str, Path)):
        Path(target).write_bytes(payload)
    else:
        target.write(payload)


def load_annotations(source) -> list[LabeledInterval]:
    """Load the CSV sidecar (`onset_s,offset_s,label`, header row required).

    Returns intervals sorted by onset; overlapping intervals raise.
    """
    if isinstance(source, (str, Path)):
        text = Path(source).read_text()
    else:
        text = source.read()
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if not rows:
        return []
    header = [c.strip().lower() for c in rows[0]]
    if header[:3] != ["onset_s", "offset_s", "label"]:
        raise DataError(f"expected header onset_s,offset_s,label, got {rows[0]}")

    intervals = []
    for r in rows[1:]:
        if len(r) < 3:
            raise DataError(f"malformed annotation row: {r}")
        try:
            onset, offset = float(r[0]), float(r[1])
        except ValueError:
            raise DataError(f"non-numeric onset/offset in row {r}") from None
        intervals.append(LabeledInterval(onset, offset, r[2].strip()))

    intervals.sort(key=lambda iv: iv.onset_s)
    for prev, cur in zip(intervals, intervals[1:]):
        if cur.onset_s < prev.offset_s:
            raise OverlapError(f"intervals overlap: {prev} / {cur}")
    return intervals


def write_annotations(intervals: list[LabeledInterval], target) -> None:
    """Write intervals back out in the CSV sidecar format."""
    rows = ["onset_s,offset_s,label"]
    for iv in sorted(intervals, key=lambda iv: iv.onset_s):
        rows.append(f"{iv.onset_s},{iv.offset_s},{iv.label}")
    text = "\n".join(rows) + "\n"
    if isinstance(target, (str, Path)):
        Path(target).write_text(text, newline="\n")
    else:
        target.write(text)


def complement_intervals(intervals: list[LabeledInterval], duration_s: float,
                         label: str = NON_SEIZURE_LABEL) -> list[LabeledInterval]:
    """Intervals covering the gaps of a sorted, non-overlapping interval list.

    Used to label the background stretches of synthetic recordings, where the
    gaps are non-seizure by construction.
    """
    out = []
    cursor = 0.0
    for iv in sorted(intervals, key=lambda iv: iv.onset_s):
        if iv.onset_s > cursor:
            out.append(LabeledInterval(cursor, iv.onset_s, label))
        cursor = max(cursor, iv.offset_s)
    if duration_s > cursor:
        out.append(LabeledInterval(cursor, duration_s, label))
    return out
