import numpy as np
import pytest

from seizurefit.edf import EegRecording, LabeledInterval
from seizurefit.errors import WindowTooLong
from seizurefit.segmentation import NON_SEIZURE, SEIZURE, label_segments, segment


def recording(n, fs=256.0, channels=2, seed=0):
    rng = np.random.default_rng(seed)
    return EegRecording(samples=rng.normal(size=(n, channels)),
                        sampling_rate_hz=fs,
                        channel_labels=[f"CH{i+1}" for i in range(channels)])


def test_exact_multiple_gives_full_segments():
    segs = segment(recording(2560), window_s=1.0)
    assert len(segs) == 10
    assert all(s.window_len == 256 for s in segs)
    assert [s.index for s in segs] == list(range(10))
    assert [s.start_s for s in segs] == [float(i) for i in range(10)]


def test_trailing_partial_window_dropped():
    segs = segment(recording(2570), window_s=1.0)
    assert len(segs) == 10


def test_window_longer_than_recording():
    with pytest.raises(WindowTooLong):
        segment(recording(100), window_s=1.0)


def test_concatenation_reproduces_leading_samples():
    rec = recording(2570)
    segs = segment(rec, window_s=1.0)
    stacked = np.vstack([s.samples for s in segs])
    np.testing.assert_array_equal(stacked, rec.samples[:2560])


def test_segment_count_invariant_under_channel_permutation():
    rec = recording(2570, channels=3)
    permuted = EegRecording(samples=rec.samples[:, [2, 0, 1]],
                            sampling_rate_hz=rec.sampling_rate_hz,
                            channel_labels=["CH3", "CH1", "CH2"])
    assert len(segment(rec)) == len(segment(permuted))


def test_non_integer_window():
    segs = segment(recording(2560), window_s=0.5)
    assert len(segs) == 20
    assert segs[1].start_s == 0.5


class TestLabeling:
    def test_onset_boundary_uses_midpoint(self):
        rec = recording(256 * 200)
        segs = label_segments(segment(rec), [LabeledInterval(81.0, 162.0)])
        by_start = {s.start_s: s for s in segs}
        assert by_start[80.0].label == NON_SEIZURE
        assert by_start[81.0].label == SEIZURE
        assert by_start[161.0].label == SEIZURE
        assert by_start[162.0].label == NON_SEIZURE

    def test_no_intervals_all_non_seizure(self):
        segs = label_segments(segment(recording(2560)), [])
        assert all(s.label == NON_SEIZURE for s in segs)
        assert all(s.epoch == -1 for s in segs)

    def test_full_cover_all_seizure(self):
        segs = label_segments(segment(recording(2560)),
                              [LabeledInterval(0.0, 10.0)])
        assert all(s.label == SEIZURE for s in segs)

    def test_epoch_index_follows_interval_order(self):
        intervals = [LabeledInterval(0.0, 3.0, "non_seizure"),
                     LabeledInterval(3.0, 6.0, "seizure"),
                     LabeledInterval(6.0, 10.0, "non_seizure")]
        segs = label_segments(segment(recording(2560)), intervals)
        assert [s.epoch for s in segs] == [0, 0, 0, 1, 1, 1, 2, 2, 2, 2]
        assert [s.label for s in segs] == [0, 0, 0, 1, 1, 1, 0, 0, 0, 0]

    def test_straddling_window_goes_by_midpoint(self):
        rec = recording(256 * 8)
        segs = label_segments(segment(rec, window_s=0.5),
                              [LabeledInterval(4.3, 8.0)], window_s=0.5)
        by_start = {round(s.start_s, 2): s for s in segs}
        # window [4.0, 4.5) straddles the onset; its midpoint 4.25 is outside
        assert by_start[4.0].label == NON_SEIZURE
        assert by_start[4.5].label == SEIZURE

    def test_midpoint_exactly_at_onset_is_inside(self):
        rec = recording(256 * 8)
        segs = label_segments(segment(rec, window_s=0.5),
                              [LabeledInterval(4.25, 8.0)], window_s=0.5)
        by_start = {round(s.start_s, 2): s for s in segs}
        assert by_start[4.0].label == SEIZURE  # half-open interval includes onset
