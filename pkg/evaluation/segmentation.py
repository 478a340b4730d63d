"""
Beat Segmentation
Per-beat TQ and QRST intervals around a reference point 50 ms before each R-peak
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from core.errors import EvaluationError

REFERENCE_OFFSET_MS = 50.0
TQ_FRACTION = 0.25
RR_HISTORY = 5
LAST_BEAT_MS = 600.0


@dataclass(frozen=True)
class BeatSegmentation:
    """
    Per-beat [start, end) intervals

    Attributes:
        reference_points: R-peak minus the reference offset, clipped at 0
        tq: (beats, 2) TQ intervals; each ends at its reference point
        qrst: (beats, 2) QRST intervals; each starts at its reference point
        record_length: Samples in the segmented record
    """

    reference_points: np.ndarray
    tq: np.ndarray
    qrst: np.ndarray
    record_length: int

    @property
    def beat_count(self) -> int:
        return int(self.reference_points.size)

    def intervals(self, kind: str, drop_edge_beats: bool = True) -> List[Tuple[int, int]]:
        """
        Non-empty intervals of one kind (tq or qrst)

        With drop_edge_beats the first beat (history-less TQ) and the last
        beat (capped QRST) are left out.
        """
        if kind not in ("tq", "qrst"):
            raise EvaluationError(f"unknown interval kind {kind!r}")
        rows = self.tq if kind == "tq" else self.qrst
        beats = range(self.beat_count)
        if drop_edge_beats:
            beats = range(1, self.beat_count - 1)
        return [(int(rows[b, 0]), int(rows[b, 1])) for b in beats if rows[b, 1] > rows[b, 0]]


def tq_lengths(r_peaks: np.ndarray) -> np.ndarray:
    """
    L(b) = floor(0.25 * mean of up to five RR intervals preceding beat b)

    The first beat has no history and uses the RR interval that follows it.
    """
    rr = np.diff(r_peaks).astype(float)
    lengths = np.empty(r_peaks.size, dtype=np.int64)
    lengths[0] = max(1, int(np.floor(TQ_FRACTION * rr[0])))
    for beat in range(1, r_peaks.size):
        history = rr[max(0, beat - RR_HISTORY):beat]
        lengths[beat] = max(1, int(np.floor(TQ_FRACTION * history.mean())))
    return lengths


def segment_beats(
    r_peaks: Sequence[int],
    sample_rate_hz: float,
    record_length: int,
    last_beat_ms: float = LAST_BEAT_MS,
) -> BeatSegmentation:
    """
    TQ(b) = [ref(b) - L(b), ref(b)); QRST(b) = [ref(b), ref(b+1) - L(b+1))

    The last QRST ends at min(ref + last_beat_ms, record end). Intervals are
    clipped to the record and never overlap the previous beat.
    """
    peaks = np.unique(np.asarray(r_peaks, dtype=np.int64))
    if peaks.size < 2:
        raise EvaluationError(f"segmentation needs at least 2 R-peaks, got {peaks.size}")
    if peaks[0] < 0 or peaks[-1] >= record_length:
        raise EvaluationError(f"R-peaks outside the record of {record_length} samples")

    offset = int(np.floor(REFERENCE_OFFSET_MS * sample_rate_hz / 1000.0))
    last_span = int(np.floor(last_beat_ms * sample_rate_hz / 1000.0))
    references = np.maximum(peaks - offset, 0)
    lengths = tq_lengths(peaks)

    beats = peaks.size
    tq = np.zeros((beats, 2), dtype=np.int64)
    qrst = np.zeros((beats, 2), dtype=np.int64)
    for beat in range(beats):
        reference = references[beat]
        floor = 0 if beat == 0 else qrst[beat - 1, 1]
        tq[beat] = (min(reference, max(reference - lengths[beat], floor)), reference)
        if beat + 1 < beats:
            end = max(reference, references[beat + 1] - lengths[beat + 1])
        else:
            end = min(reference + last_span, record_length)
        qrst[beat] = (reference, end)

    return BeatSegmentation(references, tq, qrst, int(record_length))
