import numpy as np
import pytest

from core.signal import Signal
from synthesis.config import AfEcgConfig
from synthesis.records import synth_af_ecg


def fit_amplitude(samples, frequency_hz, sample_rate_hz):
    """Least-squares amplitude of one sinusoid in samples"""
    t = np.arange(len(samples)) / sample_rate_hz
    basis = np.column_stack([np.cos(2 * np.pi * frequency_hz * t), np.sin(2 * np.pi * frequency_hz * t)])
    coefficients, *_ = np.linalg.lstsq(basis, np.asarray(samples, dtype=float), rcond=None)
    return float(np.hypot(*coefficients))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def sine():
    def make(frequency_hz, duration_s=1.0, sample_rate_hz=1000.0, amplitude=1.0, phase=0.0):
        t = np.arange(int(round(duration_s * sample_rate_hz))) / sample_rate_hz
        return Signal(amplitude * np.sin(2 * np.pi * frequency_hz * t + phase), sample_rate_hz)
    return make


@pytest.fixture
def amplitude_of():
    return fit_amplitude


@pytest.fixture(scope="session")
def af_config():
    return AfEcgConfig(seed=7, duration_s=20.0, heart_rate_bpm=80.0, rr_variability_fraction=0.0)


@pytest.fixture(scope="session")
def af_record(af_config):
    return synth_af_ecg(af_config)
