"""
Toolkit Exception Hierarchy
Every error raised by the toolkit derives from PliToolkitError
"""


class PliToolkitError(ValueError):
    """Base class for all toolkit errors"""


class SignalError(PliToolkitError):
    """Invalid signal shape, length, rate or alignment"""


class ConfigurationError(PliToolkitError):
    """Invalid generator, denoiser or plan configuration"""


class TransformError(PliToolkitError):
    """Invalid wavelet decomposition request or coefficient layout"""


class ThresholdError(PliToolkitError):
    """Invalid threshold, window or gate input"""


class EvaluationError(PliToolkitError):
    """Metric cannot be computed on the given records"""


class SynthesisError(PliToolkitError):
    """Generator produced a non-finite state"""


class DataError(PliToolkitError):
    """Malformed input file or unwritable output location"""
