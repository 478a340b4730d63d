"""
Pointwise Shrinkage Rules
Hybrid hard/soft rule plus hard, soft and hyperbolic baselines.
All rules accept scalars or arrays (broadcast) and return float arrays.
"""

import numpy as np

from core.errors import ThresholdError

DEFAULT_GATE_FACTOR = 1.5


def _prepare(w, lam):
    w = np.asarray(w, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0):
        raise ThresholdError("threshold must be non-negative")
    return w, lam


def hybrid_shrink(w, lam, gate_factor: float = DEFAULT_GATE_FACTOR):
    """
    Zero below the threshold, soft-shrink up to gate_factor times it,
    keep larger (QRS) coefficients unchanged

    |w| <= lam            -> 0
    lam < |w| <= g * lam  -> w - sign(w) * lam
    |w| > g * lam         -> w
    """
    if not gate_factor > 1:
        raise ThresholdError(f"gate factor must exceed 1, got {gate_factor}")
    w, lam = _prepare(w, lam)
    magnitude = np.abs(w)
    soft = w - np.sign(w) * lam
    return np.where(magnitude <= lam, 0.0, np.where(magnitude <= gate_factor * lam, soft, w))


def hard_shrink(w, lam):
    w, lam = _prepare(w, lam)
    return np.where(np.abs(w) > lam, w, 0.0)


def soft_shrink(w, lam):
    w, lam = _prepare(w, lam)
    return np.sign(w) * np.maximum(np.abs(w) - lam, 0.0)


def hyperbolic_shrink(w, lam):
    """sign(w) * sqrt(w^2 - lam^2) above the threshold, 0 otherwise"""
    w, lam = _prepare(w, lam)
    above = np.abs(w) > lam
    radicand = np.where(above, np.square(w) - np.square(lam), 0.0)
    return np.where(above, np.sign(w) * np.sqrt(np.maximum(radicand, 0.0)), 0.0)


RULES = {
    "hard": hard_shrink,
    "soft": soft_shrink,
    "hyperbolic": hyperbolic_shrink,
}
