"""Numerical synthesis of propagated bending-wave packets.

The free-field waveform at distance d is the truncated spectral sum

    u(d, t) = (w_m / n) * sum_i  W(w_i) e^{-k_I(w_i) d}
                                 cos(k_R(w_i) d - w_i t + pi/4),

with w_i = i w_m / n, w_m = 2 pi f_max, and a selectable spectral weight
W.  A bounded rectangular plate is handled by mirror (image) sources: the
sensor signal is the superposition of sign-weighted, 1/sqrt(d) scaled
free-field contributions from every image position.
"""

from __future__ import annotations

import enum
import struct
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    NonUniformGridError,
    ShortDistanceWarning,
    SourceOutsideRoomError,
)
from .plate import PlateConstants, Pulse, PulseKind, pulse_spectrum, wavenumber

# below this source-sensor distance the truncated sum misses the dominant
# high-frequency content
MIN_VALID_DISTANCE = 3.0

_BINARY_MAGIC = b"SLABWAV1"


@dataclass(frozen=True, eq=False)
class Waveform:
    """Uniformly sampled transversal-displacement trace."""

    sample_rate: float  # Hz
    t0: float           # s, time of first sample
    samples: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "samples",
                           np.asarray(self.samples, dtype=float))
        if not self.sample_rate > 0:
            raise ValueError(f"sample_rate must be > 0, got {self.sample_rate}")
        if self.samples.size == 0:
            raise ValueError("waveform must hold at least one sample")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("waveform samples must be finite")

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.samples.size) / self.sample_rate

    def __len__(self) -> int:
        return self.samples.size


class SpectralWeight(enum.Enum):
    """Spectral weight W(w) applied inside the synthesis sum."""

    SQRT_OMEGA = "sqrt_omega"  # |alpha| w^(1/2), impulsive far-field drive
    FLAT = "flat"              # 1, plain spectral superposition
    BURST_RATE = "burst_rate"  # |alpha| w^(-3/2) |spectrum of the rate pulse|


@dataclass(frozen=True)
class SynthesisParams:
    f_max: float = 10e3     # Hz
    n_terms: int = 2048
    spectral_weight: SpectralWeight = SpectralWeight.SQRT_OMEGA
    pulse: Pulse = field(
        default_factory=lambda: Pulse(PulseKind.BURST_RATE, 1e-3))

    def __post_init__(self):
        if not self.f_max > 0:
            raise ValueError(f"f_max must be > 0, got {self.f_max}")
        if self.n_terms < 16:
            raise ValueError(f"n_terms must be >= 16, got {self.n_terms}")


@dataclass(frozen=True)
class RoomGeometry:
    lx: float  # m
    ly: float  # m

    def __post_init__(self):
        if not (self.lx > 0 and self.ly > 0):
            raise ValueError(f"room sides must be > 0, got {self.lx}x{self.ly}")

    def contains(self, point, strict: bool = False) -> bool:
        x, y = point
        if strict:
            return 0 < x < self.lx and 0 < y < self.ly
        return 0 <= x <= self.lx and 0 <= y <= self.ly


@dataclass(frozen=True)
class ImageSource:
    position: tuple[float, float]
    sign: int  # +1 even number of bounces on the axis pair, -1 odd
    distance_to_sensor: float | None = None


@dataclass(frozen=True)
class ImageSourceSet:
    entries: tuple[ImageSource, ...]

    def __len__(self) -> int:
        return len(self.entries)


def _check_uniform_grid(t_grid: np.ndarray) -> float:
    """Validate uniform sampling, return the sample rate."""
    if t_grid.size == 0:
        raise ValueError("t_grid must not be empty")
    if t_grid.size < 2:
        raise ValueError("t_grid needs at least two samples")
    steps = np.diff(t_grid)
    dt = steps[0]
    if dt <= 0 or not np.allclose(steps, dt, rtol=1e-9, atol=0):
        raise NonUniformGridError("t_grid must be uniformly increasing")
    return 1.0 / dt


def _spectral_weights(omegas: np.ndarray, constants: PlateConstants,
                      params: SynthesisParams) -> np.ndarray:
    alpha = constants.amplitude_coeff
    if params.spectral_weight is SpectralWeight.SQRT_OMEGA:
        return alpha * np.sqrt(omegas)
    if params.spectral_weight is SpectralWeight.FLAT:
        return np.ones_like(omegas)
    # rate-pulse drive: |alpha| w^(-3/2) * |(-j w) f_hat(w)|; the w = 0 term
    # has a removable zero and is set to 0 directly
    w = np.zeros_like(omegas)
    pos = omegas > 0
    spec = np.abs(pulse_spectrum(
        Pulse(PulseKind.BURST, params.pulse.duration), omegas[pos]))
    w[pos] = alpha * omegas[pos]**-0.5 * spec
    return w


def _sum_coefficients(distance: float, constants: PlateConstants,
                      theta: float, params: SynthesisParams):
    """Per-frequency amplitude and phase of the synthesis sum at one distance."""
    omega_m = 2.0 * np.pi * params.f_max
    omegas = np.arange(params.n_terms) * (omega_m / params.n_terms)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # loss-factor warning handled by caller
        k_r, k_i = wavenumber(omegas, constants, theta)
    amp = (omega_m / params.n_terms) * _spectral_weights(omegas, constants,
                                                         params)
    amp = amp * np.exp(-k_i * distance)
    phase = k_r * distance + np.pi / 4.0
    return omegas, amp, phase


def _evaluate_sum(coef_cos: np.ndarray, coef_sin: np.ndarray,
                  omegas: np.ndarray, t_grid: np.ndarray,
                  chunk: int = 4096) -> np.ndarray:
    """Evaluate sum_i c_i cos(w_i t) + s_i sin(w_i t) over a time grid."""
    out = np.empty(t_grid.size)
    for start in range(0, t_grid.size, chunk):
        block = t_grid[start:start + chunk, None] * omegas[None, :]
        out[start:start + chunk] = (np.cos(block) @ coef_cos
                                    + np.sin(block) @ coef_sin)
    return out


def synth_free(distance: float, t_grid, constants: PlateConstants,
               theta: float, params: SynthesisParams) -> Waveform:
    """Synthesize the free-field waveform received at one distance.

    Warns for distances below MIN_VALID_DISTANCE, where the truncated
    spectrum no longer carries the dominant short-wavelength content.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    sample_rate = _check_uniform_grid(t_grid)
    if distance <= 0:
        raise ValueError(f"distance must be > 0, got {distance}")
    if distance < MIN_VALID_DISTANCE:
        warnings.warn(
            f"d = {distance:.3g} m is below the {MIN_VALID_DISTANCE} m "
            "validity range of the truncated spectral sum",
            ShortDistanceWarning, stacklevel=2)
    omegas, amp, phase = _sum_coefficients(distance, constants, theta, params)
    # cos(phase - w t) = cos(phase) cos(w t) + sin(phase) sin(w t)
    samples = _evaluate_sum(amp * np.cos(phase), amp * np.sin(phase),
                            omegas, t_grid)
    return Waveform(sample_rate=sample_rate, t0=float(t_grid[0]),
                    samples=samples)


def image_positions(room: RoomGeometry, source, p_max: int, q_max: int,
                    sensor=None) -> ImageSourceSet:
    """Mirror-source positions of a source inside a rectangular plate.

    The x coordinates run over { x_e + 2 p lx } (even bounce count, +1) and
    { -x_e + 2 p lx } (odd bounce count, -1) for |p| <= p_max; y is handled
    the same way with q.  Each entry's sign is the product of its two axis
    signs.  When a sensor position is supplied, per-image distances are
    attached.
    """
    if p_max < 0 or q_max < 0:
        raise ValueError("p_max and q_max must be >= 0")
    xs, ys = float(source[0]), float(source[1])
    if not room.contains((xs, ys), strict=True):
        raise SourceOutsideRoomError(
            f"source {source} not strictly inside room "
            f"{room.lx} x {room.ly}")
    x_branches = []
    for p in range(-p_max, p_max + 1):
        x_branches.append((xs + 2 * p * room.lx, +1))
        x_branches.append((-xs + 2 * p * room.lx, -1))
    y_branches = []
    for q in range(-q_max, q_max + 1):
        y_branches.append((ys + 2 * q * room.ly, +1))
        y_branches.append((-ys + 2 * q * room.ly, -1))
    entries = []
    for x, sx in x_branches:
        for y, sy in y_branches:
            dist = None
            if sensor is not None:
                dist = float(np.hypot(x - sensor[0], y - sensor[1]))
            entries.append(ImageSource(position=(x, y), sign=sx * sy,
                                       distance_to_sensor=dist))
    return ImageSourceSet(entries=tuple(entries))


def superpose_images(images: ImageSourceSet, t_grid,
                     constants: PlateConstants, theta: float,
                     params: SynthesisParams) -> Waveform:
    """Superpose sign-weighted free-field terms, each scaled by 1/sqrt(d)."""
    t_grid = np.asarray(t_grid, dtype=float)
    sample_rate = _check_uniform_grid(t_grid)
    if len(images) == 0:
        raise ValueError("image set is empty")
    distances = [e.distance_to_sensor for e in images.entries]
    if any(d is None for d in distances):
        raise ValueError("image entries must carry distances to the sensor")
    if any(d <= 0 for d in distances):
        raise ValueError("image-to-sensor distances must be > 0")
    if min(distances) < MIN_VALID_DISTANCE:
        warnings.warn(
            f"shortest image path {min(distances):.3g} m is below the "
            f"{MIN_VALID_DISTANCE} m validity range",
            ShortDistanceWarning, stacklevel=2)
    omega_m = 2.0 * np.pi * params.f_max
    omegas = np.arange(params.n_terms) * (omega_m / params.n_terms)
    coef_cos = np.zeros(params.n_terms)
    coef_sin = np.zeros(params.n_terms)
    for entry in images.entries:
        d = entry.distance_to_sensor
        _, amp, phase = _sum_coefficients(d, constants, theta, params)
        gain = entry.sign / np.sqrt(d)
        coef_cos += gain * amp * np.cos(phase)
        coef_sin += gain * amp * np.sin(phase)
    samples = _evaluate_sum(coef_cos, coef_sin, omegas, t_grid)
    return Waveform(sample_rate=sample_rate, t0=float(t_grid[0]),
                    samples=samples)


def synth_bounded(room: RoomGeometry, source, sensor, t_grid,
                  constants: PlateConstants, theta: float,
                  params: SynthesisParams, p_max: int,
                  q_max: int) -> Waveform:
    """Waveform received inside a bounded rectangular plate."""
    if not room.contains(sensor):
        raise SourceOutsideRoomError(f"sensor {sensor} outside room")
    if np.hypot(sensor[0] - source[0], sensor[1] - source[1]) == 0:
        raise ValueError("sensor must differ from the source position")
    images = image_positions(room, source, p_max, q_max, sensor=sensor)
    return superpose_images(images, t_grid, constants, theta, params)


def waveform_to_csv(waveform: Waveform, path) -> None:
    times = waveform.times
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("time_s,amplitude\n")
        for t, v in zip(times, waveform.samples):
            fh.write(f"{t:.17g},{v:.17g}\n")


def waveform_from_csv(path) -> Waveform:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    data = np.atleast_2d(data)
    times, samples = data[:, 0], data[:, 1]
    if times.size < 2:
        raise ValueError("waveform CSV needs at least two samples")
    sample_rate = 1.0 / (times[1] - times[0])
    return Waveform(sample_rate=sample_rate, t0=float(times[0]),
                    samples=samples)


def waveform_to_binary(waveform: Waveform, path) -> None:
    """Little-endian binary: 8-byte magic, sample_rate f64, count u64, samples.

    The format carries no start-time field, so only traces beginning at
    t = 0 can be stored; use CSV for shifted traces.
    """
    if waveform.t0 != 0.0:
        raise ValueError("binary format only stores traces with t0 = 0")
    payload = struct.pack("<8sdQ", _BINARY_MAGIC, waveform.sample_rate,
                          waveform.samples.size)
    Path(path).write_bytes(payload
                           + waveform.samples.astype("<f8").tobytes())


def waveform_from_binary(path) -> Waveform:
    raw = Path(path).read_bytes()
    magic, sample_rate, count = struct.unpack_from("<8sdQ", raw, 0)
    if magic != _BINARY_MAGIC:
        raise ValueError(f"bad magic {magic!r} in {path}")
    samples = np.frombuffer(raw, dtype="<f8", count=count,
                            offset=struct.calcsize("<8sdQ"))
    return Waveform(sample_rate=sample_rate, t0=0.0, samples=samples.copy())
