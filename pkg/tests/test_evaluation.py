import math

import numpy as np
import pytest

from core.errors import EvaluationError, SignalError
from core.signal import Signal
from evaluation.detector import detect_r_peaks, integrated_energy
from evaluation.metrics import SNR_OUT_CAP_DB, asci, interval_mask, snr_out
from evaluation.report import REPORT_COLUMNS, EvaluationReport, evaluate
from evaluation.segmentation import segment_beats, tq_lengths

ALTERNATING = (-1.0) ** np.arange(1000)


class TestSnrOut:
    def test_identical_records_hit_the_cap(self, sine):
        tone = sine(5.0)
        assert snr_out(tone, tone) == SNR_OUT_CAP_DB

    def test_twenty_db(self):
        assert snr_out(Signal(np.full(100, 0.9), 1000), Signal(np.ones(100), 1000)) == pytest.approx(20.0)

    def test_zero_db(self):
        assert snr_out(Signal(np.zeros(100), 1000), Signal(np.ones(100), 1000)) == pytest.approx(0.0)

    def test_silent_output(self):
        with pytest.raises(EvaluationError):
            snr_out(Signal(np.ones(100), 1000), Signal(np.zeros(100), 1000))


class TestAsci:
    def test_extremes(self):
        reference = Signal(ALTERNATING, 1000)
        assert asci(reference, reference) == 100.0
        assert asci(reference, reference.with_samples(ALTERNATING + 1.0)) == -100.0

    def test_half_agreement(self):
        shifted = ALTERNATING.copy()
        shifted[500:] += 1.0
        assert asci(Signal(ALTERNATING, 1000), Signal(shifted, 1000)) == 0.0

    def test_not_symmetric(self):
        wide = Signal(10.0 * ALTERNATING, 1000)
        narrow = Signal(9.51 * ALTERNATING, 1000)
        assert asci(wide, narrow) == 100.0
        assert asci(narrow, wide) == -100.0

    def test_intervals_and_beta_scope(self):
        reference = np.zeros(1000)
        reference[:100] = 10.0
        test = reference.copy()
        test[500:600] += 0.01
        x, x_hat = Signal(reference, 1000), Signal(test, 1000)
        assert asci(x, x_hat, intervals=[(500, 600)]) == 100.0
        assert asci(x, x_hat, intervals=[(500, 600)], beta_scope="interval") == -100.0
        assert asci(x, x_hat, intervals=[(0, 100), (600, 700)], beta_scope="interval") == 100.0

    def test_empty_interval_set(self):
        signal = Signal(ALTERNATING, 1000)
        with pytest.raises(EvaluationError):
            asci(signal, signal, intervals=[])

    def test_unknown_scope(self):
        signal = Signal(ALTERNATING, 1000)
        with pytest.raises(EvaluationError):
            asci(signal, signal, beta_scope="beat")

    def test_interval_mask_clips(self):
        mask = interval_mask(10, [(-5, 2), (8, 20)])
        assert mask.tolist() == [True, True] + [False] * 6 + [True, True]


class TestSegmentation:
    def test_regular_one_second_rhythm(self):
        segmentation = segment_beats([500, 1500, 2500, 3500, 4500], 1000.0, 5000)
        assert segmentation.reference_points.tolist() == [450, 1450, 2450, 3450, 4450]
        assert segmentation.tq.tolist() == [[200, 450], [1200, 1450], [2200, 2450], [3200, 3450], [4200, 4450]]
        assert segmentation.qrst[:4].tolist() == [[450, 1200], [1450, 2200], [2450, 3200], [3450, 4200]]
        assert segmentation.qrst[4].tolist() == [4450, 5000]

    def test_750_ms_rhythm(self):
        peaks = np.arange(400, 7000, 750)
        segmentation = segment_beats(peaks, 1000.0, 7500)
        assert np.all(np.diff(segmentation.tq[1:-1], axis=1) == 187)
        assert np.all(np.diff(segmentation.qrst[1:-1], axis=1) == 750 - 187)

    def test_last_beat_is_capped(self):
        segmentation = segment_beats([500, 1500], 1000.0, 10000)
        assert segmentation.qrst[-1].tolist() == [1450, 2050]

    def test_edge_beats(self):
        segmentation = segment_beats([500, 1500, 2500, 3500, 4500], 1000.0, 5000)
        assert len(segmentation.intervals("tq")) == 3
        assert len(segmentation.intervals("qrst", drop_edge_beats=False)) == 5
        with pytest.raises(EvaluationError):
            segmentation.intervals("st")

    def test_history_window(self):
        assert tq_lengths(np.array([0, 1000, 2000, 2600])).tolist() == [250, 250, 250, 216]

    def test_intervals_never_overlap(self):
        peaks = [300, 900, 1700, 2200, 3100, 3500]
        segmentation = segment_beats(peaks, 1000.0, 4000)
        intervals = sorted(
            segmentation.intervals("tq", False) + segmentation.intervals("qrst", False)
        )
        for (_, end), (start, _) in zip(intervals, intervals[1:]):
            assert end <= start
        for start, end in intervals:
            assert 0 <= start < end <= 4000

    def test_early_first_peak_gives_an_empty_tq(self):
        segmentation = segment_beats([20, 1020, 2020], 1000.0, 3000)
        assert segmentation.tq[0].tolist() == [0, 0]
        assert len(segmentation.intervals("tq", drop_edge_beats=False)) == 2

    def test_needs_two_peaks(self):
        with pytest.raises(EvaluationError):
            segment_beats([500], 1000.0, 1000)

    def test_peaks_inside_the_record(self):
        with pytest.raises(EvaluationError):
            segment_beats([500, 1500], 1000.0, 1200)


class TestDetector:
    def test_finds_the_synthetic_beats(self, af_record):
        unannotated = Signal(af_record.composite.samples, af_record.sample_rate_hz)
        detected = detect_r_peaks(unannotated)
        assert detected.size == af_record.r_peaks.size
        assert np.max(np.abs(detected - af_record.r_peaks)) <= 20

    def test_energy_has_the_record_length(self, af_record):
        assert integrated_energy(af_record.composite).size == len(af_record)

    def test_record_too_short(self):
        with pytest.raises(EvaluationError):
            detect_r_peaks(Signal(np.zeros(1500), 1000))

    def test_flat_record(self):
        with pytest.raises(EvaluationError):
            detect_r_peaks(Signal(np.zeros(5000), 1000))


class TestEvaluate:
    def test_identity(self, af_record):
        report = evaluate(af_record.composite, af_record.composite, method="none", snr_in="inf")
        assert report.snr_out_db == SNR_OUT_CAP_DB
        assert (report.asci_global_pct, report.asci_tq_pct, report.asci_qrst_pct) == (100.0, 100.0, 100.0)
        assert report.beat_count == af_record.r_peaks.size
        assert report.snr_in_db == math.inf

    def test_falls_back_to_the_detector(self, af_record):
        unannotated = Signal(af_record.composite.samples, af_record.sample_rate_hz)
        report = evaluate(unannotated, unannotated)
        assert report.beat_count == af_record.r_peaks.size
        assert math.isnan(report.snr_in_db)

    def test_row_layout(self, af_record):
        row = evaluate(af_record.composite, af_record.composite, method="m", scenario="common", snr_in=0).as_row()
        assert tuple(row) == REPORT_COLUMNS
        assert row["method"] == "m" and row["snr_in_db"] == 0.0

    def test_misaligned_records(self, af_record):
        with pytest.raises(SignalError):
            evaluate(af_record.composite, Signal(np.zeros(10), af_record.sample_rate_hz))

    def test_index_bounds(self):
        with pytest.raises(EvaluationError):
            EvaluationReport("m", "common", 0.0, 10.0, 150.0, 0.0, 0.0, 3)

    def test_two_beats_leave_no_interior_interval(self, sine):
        record = sine(1.0, duration_s=2.0)
        report = evaluate(record, record, r_peaks=[500, 1500])
        assert report.asci_global_pct == 100.0
        assert math.isnan(report.asci_tq_pct) and math.isnan(report.asci_qrst_pct)
        assert report.beat_count == 0

    def test_two_beats_scored_with_edge_beats_kept(self, sine):
        record = sine(1.0, duration_s=2.0)
        report = evaluate(record, record, r_peaks=[500, 1500], drop_edge_beats=False)
        assert report.asci_tq_pct == 100.0
        assert report.beat_count == 2
