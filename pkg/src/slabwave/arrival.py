"""Arrival-time estimation, TDOA assembly, and spectrograms.

Onsets are picked with a plain threshold: the time of the first sample
whose magnitude exceeds the level.  The level is given either as an
absolute amplitude or, by default, as a fraction of the waveform's own
peak.  Pairwise time differences follow the same canonical pair order as
the region codewords, so the sign of a TDOA vector is directly comparable
to a geometric characteristic vector.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientSamplesError, LengthMismatchError, NoOnsetError
from .regions import (
    CharacteristicVector,
    pair_index_arrays,
    sign_with_tie,
)
from .synth import Waveform

DEFAULT_PEAK_FRACTION = 0.1


class ToaMethod(enum.Enum):
    THRESHOLD = "threshold"
    ENVELOPE_MAX = "envelope_max"


@dataclass(frozen=True)
class ToaEstimate:
    time: float  # s, relative to the waveform's time origin
    method: ToaMethod
    threshold_used: float | None = None


def detect_toa(waveform: Waveform, delta: float | None = None, *,
               fraction: float = DEFAULT_PEAK_FRACTION) -> ToaEstimate:
    """Time of the first sample with |amplitude| > threshold.

    With `delta` the threshold is absolute; otherwise it is `fraction`
    of the waveform's own peak magnitude.
    """
    if delta is not None:
        if delta <= 0:
            raise ValueError(f"delta must be > 0, got {delta}")
        level = float(delta)
    else:
        if not 0 < fraction < 1:
            raise ValueError(f"fraction must be in (0, 1), got {fraction}")
        level = fraction * float(np.max(np.abs(waveform.samples)))
        if level == 0:
            raise NoOnsetError("waveform is identically zero")
    hits = np.flatnonzero(np.abs(waveform.samples) > level)
    if hits.size == 0:
        raise NoOnsetError(f"no sample exceeds threshold {level:.6g}")
    time = waveform.t0 + hits[0] / waveform.sample_rate
    return ToaEstimate(time=float(time), method=ToaMethod.THRESHOLD,
                       threshold_used=level)


def detect_toa_envelope_max(waveform: Waveform) -> ToaEstimate:
    """Time of the global magnitude maximum of the trace."""
    idx = int(np.argmax(np.abs(waveform.samples)))
    return ToaEstimate(time=float(waveform.t0 + idx / waveform.sample_rate),
                       method=ToaMethod.ENVELOPE_MAX, threshold_used=None)


@dataclass(frozen=True)
class TdoaVector:
    """Pairwise arrival-time differences tau(l) = t_i - t_j in canonical
    pair order."""

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        n = n_sensors_for_pairs(len(vals))
        if n * (n - 1) // 2 != len(vals):
            raise LengthMismatchError(
                f"{len(vals)} entries do not form a full pair set")
        object.__setattr__(self, "values", vals)

    @property
    def n_sensors(self) -> int:
        return n_sensors_for_pairs(len(self.values))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def __len__(self) -> int:
        return len(self.values)


def n_sensors_for_pairs(n_pairs: int) -> int:
    """Invert L = n (n - 1) / 2; raises if L is not a valid pair count."""
    n = int(round((1 + np.sqrt(1 + 8 * n_pairs)) / 2))
    if n * (n - 1) // 2 != n_pairs:
        raise LengthMismatchError(f"{n_pairs} is not n(n-1)/2 for integer n")
    return n


def tdoa_from_toas(toas) -> TdoaVector:
    """Assemble the TDOA vector from per-sensor arrival times."""
    toas = np.asarray(toas, dtype=float)
    if toas.ndim != 1 or toas.size < 2:
        raise LengthMismatchError("need at least two arrival times")
    ii, jj = pair_index_arrays(toas.size)
    return TdoaVector(values=tuple(toas[ii] - toas[jj]))


def sign_vector(tau: TdoaVector) -> CharacteristicVector:
    """Sign pattern of the TDOA vector with ties mapped to +1."""
    bits = sign_with_tie(tau.as_array())
    return CharacteristicVector(bits=tuple(int(b) for b in bits))


@dataclass(frozen=True, eq=False)
class Spectrogram:
    magnitudes: np.ndarray   # (freq bins, frames), >= 0
    frame_times: np.ndarray  # s, window centers
    bin_freqs: np.ndarray    # Hz


def stft(waveform: Waveform, window_len: int = 128, overlap: int = 126,
         fft_len: int = 128) -> Spectrogram:
    """Magnitude short-time Fourier transform with a Hamming window.

    Frame hop is window_len - overlap; windows that would overrun the
    signal end are dropped.
    """
    if not 0 <= overlap < window_len <= fft_len:
        raise ValueError(
            f"need overlap < window_len <= fft_len, got "
            f"{overlap}/{window_len}/{fft_len}")
    samples = waveform.samples
    if samples.size < window_len:
        raise InsufficientSamplesError(
            f"{samples.size} samples < window length {window_len}")
    hop = window_len - overlap
    n_frames = (samples.size - window_len) // hop + 1
    window = np.hamming(window_len)
    starts = np.arange(n_frames) * hop
    frames = np.lib.stride_tricks.sliding_window_view(
        samples, window_len)[starts]
    mags = np.abs(np.fft.rfft(frames * window, n=fft_len, axis=1)).T
    frame_times = waveform.t0 + (starts + window_len / 2) / waveform.sample_rate
    bin_freqs = np.fft.rfftfreq(fft_len, d=1.0 / waveform.sample_rate)
    return Spectrogram(magnitudes=mags, frame_times=frame_times,
                       bin_freqs=bin_freqs)


def spectrogram_to_csv(spec: Spectrogram, path) -> None:
    """CSV matrix: first row = frame times, first column = bin frequencies."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("freq_hz\\time_s," + ",".join(f"{t:.17g}"
                                               for t in spec.frame_times) + "\n")
        for f, row in zip(spec.bin_freqs, spec.magnitudes):
            fh.write(f"{f:.17g}," + ",".join(f"{v:.17g}" for v in row) + "\n")


def toa_table_to_csv(estimates, path) -> None:
    """Write (sensor_id, toa_s, method) rows for a list of estimates."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("sensor_id,toa_s,method\n")
        for k, est in enumerate(estimates):
            fh.write(f"{k},{est.time:.17g},{est.method.value}\n")


def toa_table_from_csv(path) -> list[float]:
    """Read arrival times (seconds) ordered by sensor id."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if header[:2] != ["sensor_id", "toa_s"]:
            raise ValueError(f"unexpected TOA table header {header} in {path}")
        for line in fh:
            if not line.strip():
                continue
            parts = line.strip().split(",")
            rows.append((int(parts[0]), float(parts[1])))
    rows.sort()
    return [t for _, t in rows]
