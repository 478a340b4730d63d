import numpy as np
import pytest
from scipy.signal import hilbert, welch

from core.errors import ConfigurationError
from core.io import read_annotations, read_csv_columns, read_signal
from core.signal import power, snr_db
from synthesis.atrial import fwave_fundamental, synth_fwaves
from synthesis.config import AfEcgConfig, PliConfig, PliScenario
from synthesis.pli import random_walk, realize_pli, synth_pli
from synthesis.records import synth_af_ecg, synth_noise_free_pair, write_record
from synthesis.ventricular import draw_rr_intervals, load_model, synth_ventricular


class TestConfig:
    @pytest.mark.parametrize("mapping", [
        {"heart_rate_bpm": "250"},
        {"rr_variability_fraction": "0.3"},
        {"fwave_amplitude_uV": "-1"},
        {"duration_s": "0"},
        {"seed": "-1"},
    ])
    def test_invalid_ecg_config(self, mapping):
        with pytest.raises(ConfigurationError):
            AfEcgConfig.from_mapping(mapping)

    def test_blank_and_auto_fall_back_to_defaults(self):
        config = AfEcgConfig.from_mapping({"fwave_fundamental_hz": "auto", "heart-rate-bpm": "95"}, seed=3)
        assert config.fwave_fundamental_hz is None
        assert config.heart_rate_bpm == 95.0
        assert config.seed == 3

    def test_pli_fractions_from_text(self):
        config = PliConfig.from_mapping({"harmonic_power_fractions": "0.1, 0.2", "scenario": "freq-dev"})
        assert config.harmonic_power_fractions == (0.1, 0.2)
        assert config.scenario is PliScenario.FREQ_DEV

    @pytest.mark.parametrize("mapping", [
        {"harmonic_power_fractions": "0.1, 1.5"},
        {"am_rate_min_hz": "3", "am_rate_max_hz": "2"},
        {"scenario": "burst"},
    ])
    def test_invalid_pli_config(self, mapping):
        with pytest.raises(ConfigurationError):
            PliConfig.from_mapping(mapping)

    def test_interharmonic_rate(self):
        assert PliConfig().interharmonic_rate_hz == pytest.approx(0.5 / np.sqrt(0.004))


class TestVentricular:
    def test_model_file(self):
        model = load_model()
        assert [event.name for event in model.events] == ["Q", "R", "S", "T"]
        assert (model.output_min_mv, model.output_max_mv) == (-0.4, 1.2)

    def test_constant_rate_gives_equal_intervals(self):
        track, r_peaks = synth_ventricular(AfEcgConfig(heart_rate_bpm=60.0, duration_s=60.0))
        assert abs(r_peaks.size - 60) <= 1
        assert np.all(np.abs(np.diff(r_peaks) - 1000) <= 2)
        assert track.annotations.tolist() == r_peaks.tolist()

    def test_mean_interval_at_80_bpm(self):
        _, r_peaks = synth_ventricular(AfEcgConfig(heart_rate_bpm=80.0, duration_s=30.0))
        assert np.mean(np.diff(r_peaks)) == pytest.approx(750.0, abs=1.0)

    def test_irregular_intervals_stay_inside_the_variability_band(self):
        config = AfEcgConfig(heart_rate_bpm=100.0, rr_variability_fraction=0.25, duration_s=60.0, seed=11)
        _, r_peaks = synth_ventricular(config)
        intervals = np.diff(r_peaks)
        assert intervals.min() >= 450 - 5
        assert intervals.max() <= 750 + 5
        assert intervals.std() > 20

    def test_rr_draws(self):
        rr = draw_rr_intervals(AfEcgConfig(heart_rate_bpm=60.0, rr_variability_fraction=0.1, seed=4), 500)
        assert rr.min() >= 0.9 and rr.max() <= 1.1
        assert rr.mean() == pytest.approx(1.0, abs=0.01)

    def test_output_range_and_peaks(self):
        track, r_peaks = synth_ventricular(AfEcgConfig(duration_s=20.0))
        assert track.samples.min() == pytest.approx(-0.4)
        assert track.samples.max() == pytest.approx(1.2)
        assert np.all(track.samples[r_peaks[1:]] > 0.8)


class TestAtrial:
    def test_zero_amplitude(self):
        assert not synth_fwaves(AfEcgConfig(fwave_amplitude_uV=0.0, duration_s=5.0)).samples.any()

    def test_peak_to_peak_matches_amplitude(self):
        fwaves = synth_fwaves(AfEcgConfig(fwave_amplitude_uV=75.0, duration_s=10.0))
        assert np.ptp(fwaves.samples) == pytest.approx(0.150, rel=1e-9)

    def test_configured_fundamental_dominates_the_spectrum(self):
        config = AfEcgConfig(fwave_fundamental_hz=6.0, fm_deviation_hz=0.0, duration_s=20.0)
        samples = synth_fwaves(config).samples
        spectrum = np.abs(np.fft.rfft(samples))
        frequencies = np.fft.rfftfreq(samples.size, 1.0 / config.sample_rate_hz)
        assert frequencies[np.argmax(spectrum)] == pytest.approx(6.0, abs=0.1)

    def test_drawn_fundamentals_stay_in_the_atrial_band(self):
        fundamentals = np.array([fwave_fundamental(AfEcgConfig(seed=seed)) for seed in range(200)])
        assert fundamentals.min() >= 3.2 and fundamentals.max() <= 8.8
        assert fundamentals.mean() == pytest.approx(6.0, abs=0.4)

    def test_fundamental_is_clipped(self):
        assert fwave_fundamental(AfEcgConfig(fwave_fundamental_hz=12.0)) == pytest.approx(8.8)


class TestRecords:
    def test_deterministic(self, af_config):
        first, second = synth_af_ecg(af_config), synth_af_ecg(af_config)
        assert np.array_equal(first.composite.samples, second.composite.samples)
        assert np.array_equal(first.r_peaks, second.r_peaks)

    def test_seed_changes_irregular_rhythm(self):
        base = AfEcgConfig(duration_s=10.0, rr_variability_fraction=0.2)
        first = synth_af_ecg(base)
        second = synth_af_ecg(base.model_copy(update={"seed": 1}))
        assert not np.array_equal(first.composite.samples, second.composite.samples)

    def test_components_add_up(self, af_record):
        total = sum(af_record.components[name] for name in ("ventricular", "atrial", "noise"))
        assert np.allclose(af_record.composite.samples, total, atol=1e-15)
        assert not af_record.components["noise"].any()
        assert af_record.composite.annotations.tolist() == af_record.r_peaks.tolist()
        assert "ecg.fwave_fundamental_effective_hz" in af_record.config_echo

    def test_write_record(self, af_record, tmp_path):
        path, sidecar = write_record(af_record, tmp_path / "af.csv")
        columns = read_csv_columns(path)
        assert list(columns) == ["composite"]
        assert read_annotations(sidecar).tolist() == af_record.r_peaks.tolist()
        loaded = read_signal(path, af_record.sample_rate_hz)
        assert np.allclose(loaded.samples, af_record.composite.samples, atol=1e-9)
        header = path.read_text().splitlines()
        assert header[0].startswith("# ecg.seed = 7")
        assert "time,composite,ventricular,atrial,noise" in header


class TestPli:
    def test_quiet_common_is_a_pure_tone(self):
        samples = synth_pli(PliConfig().quiet(), duration_s=60.0)
        spectrum = np.abs(np.fft.rfft(samples.samples))
        frequencies = np.fft.rfftfreq(len(samples), 1.0 / 1000.0)
        assert frequencies[np.argmax(spectrum)] == pytest.approx(50.0, abs=0.02)
        assert power(samples) == pytest.approx(0.5, abs=1e-6)

    def test_frequency_track_stays_within_one_percent(self):
        realization = realize_pli(PliConfig(seed=5), duration_s=60.0)
        track = realization.frequency_track.samples
        assert track.min() >= 49.5 and track.max() <= 50.5
        assert np.ptp(track) > 0

    def test_frequency_deviation_scenario(self):
        for seed in range(6):
            realization = realize_pli(PliConfig(seed=seed, scenario=PliScenario.FREQ_DEV), duration_s=20.0)
            assert abs(realization.frequency_offset_hz) == 3.0
            offset = np.mean(realization.frequency_track.samples) - 50.0
            assert np.sign(offset) == np.sign(realization.frequency_offset_hz)
            assert 2.4 <= abs(offset) <= 3.6

    def test_amplitude_varying_scenario(self):
        config = PliConfig(seed=2, scenario=PliScenario.AMP_VARYING).quiet()
        realization = realize_pli(config, duration_s=60.0)
        samples = realization.signal.samples
        assert realization.onset_sample == 10000
        assert not samples[:10000].any()
        assert 0.5 <= realization.am_rate_hz <= 2.0

        t = np.arange(samples.size) / 1000.0
        expected = 1.0 + 0.5 * np.sin(2 * np.pi * realization.am_rate_hz * t)
        envelope = np.abs(hilbert(samples[10000:]))
        interior = slice(1000, -1000)
        assert np.allclose(envelope[interior], expected[10000:][interior], atol=0.02)

    def test_onset_must_precede_the_end(self):
        with pytest.raises(ConfigurationError):
            realize_pli(PliConfig(scenario=PliScenario.AMP_VARYING, onset_s=10.0), duration_s=5.0)

    def test_harmonic_power_ratios(self):
        fractions = PliConfig().harmonic_power_fractions
        band_powers = []
        for seed in range(20):
            samples = synth_pli(PliConfig(seed=seed), duration_s=60.0).samples
            frequencies, density = welch(samples, fs=1000.0, nperseg=4096)
            band_powers.append([
                density[np.abs(frequencies - 50.0 * m) <= 4.0].sum() for m in range(1, 6)
            ])
        mean_powers = np.mean(band_powers, axis=0)
        ratios = mean_powers[1:] / mean_powers[0]
        assert np.allclose(ratios, fractions, rtol=0.25)

    def test_same_seed_same_interference(self):
        first = synth_pli(PliConfig(seed=9), duration_s=5.0).samples
        second = synth_pli(PliConfig(seed=9), duration_s=5.0).samples
        assert np.array_equal(first, second)

    def test_random_walk_is_bounded(self, rng):
        t = np.arange(60000) / 1000.0
        walk = random_walk(rng, 0.1, 60.0, 1.0, 0.5, t)
        assert np.max(np.abs(walk)) <= 0.1
        assert not random_walk(rng, 0.0, 60.0, 1.0, 0.5, t).any()


class TestNoiseFreePair:
    def test_infinite_snr(self, af_config, af_record):
        clean, noisy = synth_noise_free_pair(af_config, PliConfig(), "inf", clean=af_record)
        assert np.array_equal(noisy.composite.samples, clean.composite.samples)
        assert noisy.config_echo["snr_in_db"] == "inf"

    def test_common_scenario_hits_the_target(self, af_config, af_record):
        clean, noisy = synth_noise_free_pair(af_config, PliConfig(seed=1), 0.0, clean=af_record)
        assert snr_db(clean.composite, noisy.components["noise"]) == pytest.approx(0.0, abs=1e-9)
        assert noisy.r_peaks is clean.r_peaks

    def test_amplitude_varying_calibrates_after_onset(self, af_config, af_record):
        pli = PliConfig(seed=1, scenario=PliScenario.AMP_VARYING)
        clean, noisy = synth_noise_free_pair(af_config, pli, -5.0, clean=af_record)
        after = slice(10000, None)
        measured = snr_db(clean.composite.samples[after], noisy.components["noise"][after])
        assert measured == pytest.approx(-5.0, abs=1e-9)
