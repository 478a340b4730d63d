import logging
import math

import numpy as np
import pytest

from core.errors import DataError, SignalError
from core.io import read_annotations, read_csv_columns, read_signal, write_columns, write_signal
from core.signal import Signal, SnrDb, mix_at_snr, pad_symmetric, power, resample, snr_db, trim


class TestSignal:
    def test_samples_are_read_only(self):
        signal = Signal([1.0, 2.0, 3.0], 1000)
        with pytest.raises(ValueError):
            signal.samples[0] = 5.0

    def test_rejects_bad_rate(self):
        with pytest.raises(SignalError):
            Signal([1.0], 0)

    def test_rejects_annotation_outside_record(self):
        with pytest.raises(SignalError):
            Signal(np.zeros(10), 1000, [3, 10])

    def test_subtraction_requires_alignment(self):
        with pytest.raises(SignalError):
            Signal(np.zeros(10), 1000) - Signal(np.zeros(11), 1000)


class TestPower:
    def test_constant_and_alternating(self):
        assert power(np.array([1.0, -1.0, 1.0, -1.0])) == 1.0
        assert power(np.array([2.0, 2.0])) == 4.0

    def test_empty_signal(self):
        with pytest.raises(SignalError):
            power(np.array([]))

    def test_unit_sine_has_half_power(self, sine):
        assert power(sine(50.0, duration_s=1.0)) == pytest.approx(0.5, abs=1e-12)


class TestMixAtSnr:
    def test_zero_db_scales_noise_to_clean_power(self, rng):
        clean = Signal(rng.standard_normal(4000), 1000)
        noise = Signal(5.0 * rng.standard_normal(4000), 1000)
        noisy, scaled = mix_at_snr(clean, noise, 0.0)
        assert snr_db(clean, scaled) == pytest.approx(0.0, abs=1e-9)
        assert np.allclose(noisy.samples, clean.samples + scaled.samples)

    def test_gain_for_unit_powers_at_10_db(self):
        clean = Signal(np.ones(100), 1000)
        noise = Signal(np.tile([1.0, -1.0], 50), 1000)
        _, scaled = mix_at_snr(clean, noise, 10.0)
        assert np.max(np.abs(scaled.samples)) == pytest.approx(10 ** (-0.5), rel=1e-12)

    def test_infinite_snr_leaves_clean(self, rng):
        clean = Signal(rng.standard_normal(500), 1000, [10, 200])
        noisy, scaled = mix_at_snr(clean, Signal(rng.standard_normal(500), 1000), "inf")
        assert np.array_equal(noisy.samples, clean.samples)
        assert np.array_equal(noisy.annotations, clean.annotations)
        assert not scaled.samples.any()

    def test_zero_noise_cannot_reach_finite_snr(self):
        with pytest.raises(SignalError):
            mix_at_snr(Signal(np.ones(10), 1000), Signal(np.zeros(10), 1000), 0.0)

    def test_calibration_window(self, rng):
        clean = Signal(rng.standard_normal(2000), 1000)
        noise = np.zeros(2000)
        noise[1000:] = rng.standard_normal(1000)
        window = slice(1000, None)
        _, scaled = mix_at_snr(clean, Signal(noise, 1000), -5.0, window)
        assert snr_db(clean.samples[window], scaled.samples[window]) == pytest.approx(-5.0, abs=1e-9)

    def test_scaling_the_noise_does_not_change_the_mix(self, rng):
        clean = Signal(rng.standard_normal(1000), 1000)
        noise = Signal(rng.standard_normal(1000), 1000)
        first, _ = mix_at_snr(clean, noise, 3.0)
        second, _ = mix_at_snr(clean, noise.scaled(7.5), 3.0)
        assert np.allclose(first.samples, second.samples, atol=1e-12)


class TestSnrDb:
    def test_coerce(self):
        assert SnrDb.coerce("inf").is_infinite
        assert SnrDb.coerce("-10").value == -10.0
        assert str(SnrDb(5.0)) == "5"

    @pytest.mark.parametrize("value", [math.nan, -math.inf, 61.0, -75.0])
    def test_rejects_out_of_range(self, value):
        with pytest.raises(SignalError):
            SnrDb(value)


class TestResample:
    def test_same_rate_is_identity(self, sine):
        signal = sine(5.0)
        assert resample(signal, 1000.0) is signal

    def test_dc_is_preserved(self):
        resampled = resample(Signal(np.full(3600, 0.7), 360), 1000)
        assert len(resampled) == 10000
        assert np.allclose(resampled.samples[200:-200], 0.7, atol=1e-9)

    def test_low_frequency_sine_survives(self, sine):
        resampled = resample(sine(5.0, duration_s=4.0, sample_rate_hz=360), 1000)
        expected = np.sin(2 * np.pi * 5.0 * resampled.time_s)
        interior = slice(500, len(resampled) - 500)
        assert np.max(np.abs(resampled.samples[interior] - expected[interior])) < 1e-3

    def test_annotations_follow_the_rate(self):
        signal = Signal(np.zeros(3600), 360, [360, 3600 - 1])
        resampled = resample(signal, 1000)
        assert resampled.annotations[0] == 1000

    def test_exact_ratio_keeps_the_target_rate(self, sine, caplog):
        with caplog.at_level(logging.WARNING, logger="core.signal"):
            resampled = resample(sine(5.0, sample_rate_hz=360), 1000)
        assert resampled.sample_rate_hz == 1000.0
        assert not caplog.records

    def test_inexact_ratio_is_reported(self, sine, caplog):
        with caplog.at_level(logging.WARNING, logger="core.signal"):
            resampled = resample(sine(5.0), 1001.3)
        assert "no exact up/down form" in caplog.text
        assert resampled.sample_rate_hz != 1001.3
        assert resampled.sample_rate_hz == pytest.approx(1001.3, rel=1e-5)


class TestPadTrim:
    def test_symmetric_tail(self):
        padded, length = pad_symmetric(Signal([1.0, 2.0, 3.0, 4.0, 5.0], 1000), 4)
        assert length == 5
        assert padded.samples.tolist() == [1.0, 2.0, 3.0, 4.0, 5.0, 5.0, 4.0, 3.0]

    def test_exact_multiple_is_untouched(self):
        signal = Signal(np.arange(16.0), 1000)
        padded, length = pad_symmetric(signal, 16)
        assert padded is signal and length == 16

    def test_trim_restores_length(self, rng):
        signal = Signal(rng.standard_normal(1001), 1000, [5, 1000])
        padded, length = pad_symmetric(signal, 16)
        restored = trim(padded, length)
        assert np.array_equal(restored.samples, signal.samples)
        assert np.array_equal(restored.annotations, signal.annotations)

    def test_trim_cannot_grow(self):
        with pytest.raises(SignalError):
            trim(Signal(np.zeros(4), 1000), 5)


class TestRecordIo:
    def test_semicolon_with_header_and_time(self, tmp_path):
        path = tmp_path / "record.csv"
        path.write_text("time;ECG\n0.000;0.5\n0.001;0.25\n0.002;-0.125\n")
        columns = read_csv_columns(path)
        assert list(columns) == ["ecg"]
        assert columns["ecg"].tolist() == [0.5, 0.25, -0.125]

    def test_headerless_time_axis_is_dropped(self, tmp_path):
        path = tmp_path / "record.csv"
        path.write_text("0.0,1.5\n0.5,2.5\n1.0,3.5\n1.5,4.5\n")
        columns = read_csv_columns(path)
        assert len(columns) == 1
        assert next(iter(columns.values())).tolist() == [1.5, 2.5, 3.5, 4.5]

    def test_comment_lines_are_skipped(self, tmp_path):
        path = tmp_path / "record.csv"
        path.write_text("# exported\namplitude\n1\n2\n")
        assert read_csv_columns(path)["amplitude"].tolist() == [1.0, 2.0]

    def test_non_numeric_sample(self, tmp_path):
        path = tmp_path / "record.csv"
        path.write_text("amplitude\n1\nabc\n")
        with pytest.raises(DataError):
            read_csv_columns(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            read_csv_columns(tmp_path / "absent.csv")

    def test_bad_annotation_line(self, tmp_path):
        path = tmp_path / "record.ann"
        path.write_text("10\nR\n")
        with pytest.raises(DataError):
            read_annotations(path)

    def test_written_signal_reads_back(self, tmp_path, rng):
        signal = Signal(np.round(rng.standard_normal(200), 6), 250, [10, 120])
        path, sidecar = write_signal(tmp_path / "out" / "x.csv", signal, echo={"method": "test"})
        assert path.read_text().startswith("# method = test\n")
        loaded = read_signal(path, 250)
        assert np.allclose(loaded.samples, signal.samples, atol=1e-9)
        assert loaded.annotations.tolist() == [10, 120]
        assert sidecar.name == "x.ann"

    def test_write_columns_adds_time(self, tmp_path):
        path = write_columns(tmp_path / "c.csv", {"a": np.array([1.0, 2.0])}, 2.0)
        assert path.read_text().splitlines() == ["time,a", "0,1", "0.5,2"]
