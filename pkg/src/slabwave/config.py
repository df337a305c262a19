"""Run configuration: one YAML file, strict schema, canonical form.

Every key has a default taken from the reference slab scenario (20 cm
concrete, 10 m x 10 m room, nine sensors, 25 x 25 search grid), so an
empty file is a valid configuration.  Unknown keys and wrong types are
rejected with the full key path.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigError
from .montecarlo import ProfileKind, VelocityProfile
from .plate import PlateConstants, PlateMaterial, Pulse, PulseKind, derive_constants
from .regions import SensorArray
from .synth import RoomGeometry, SpectralWeight, SynthesisParams

_NINE_SENSOR_GRID = [[1.0, 1.0], [5.0, 1.0], [9.0, 1.0],
                     [1.0, 5.0], [5.0, 5.0], [9.0, 5.0],
                     [1.0, 9.0], [5.0, 9.0], [9.0, 9.0]]

DEFAULTS: dict = {
    "material": {
        "youngs_modulus_pa": 24.0e9,
        "density_kg_m3": 2500.0,
        "poisson": 0.2,
        "thickness_m": 0.2,
        "damping_theta_s": 1.0e-5,
    },
    "synthesis": {
        "f_max_hz": 10000.0,
        "n_terms": 2048,
        "spectral_weight": "sqrt_omega",
        "pulse_duration_s": 1.0e-3,
        "sample_rate_hz": 20000.0,
        "duration_s": 0.05,
    },
    "room": {"lx_m": 10.0, "ly_m": 10.0},
    "sensors": {"positions_m": _NINE_SENSOR_GRID},
    "profile": {
        "kind": "power_law",
        "c0_m_s": 1000.0,
        "c_near_m_s": 2000.0,
        "c_far_m_s": 500.0,
        "d_knee_m": 3.0,
        "dispersion_a_m2_s": None,   # None: derive from the material
        "theta_s": None,             # None: material damping time
    },
    "regions": {"grid": [200, 200]},
    "localization": {"grid": [25, 25], "c_hat_m_s": 1000.0},
    "montecarlo": {
        "source_m": [1.0, 3.0],
        "sigma_t_s": [0.0, 0.00025, 0.0005, 0.00075, 0.001],
        "runs": 500,
        "seed": 12345,
    },
    "bounded": {
        "room_lx_m": 3.6,
        "room_ly_m": 5.4,
        "source_m": [0.9, 1.35],
        "sensor_m": [0.2, 5.2],
        "p_max": 4,
        "q_max": 4,
    },
    "stft": {"window_len": 128, "overlap": 126, "fft_len": 128},
    "output_dir": "out",
}


def _merge(user, defaults, path=""):
    """Overlay user values on defaults, rejecting unknown keys and
    type-incompatible values."""
    if not isinstance(user, dict):
        raise ConfigError(f"expected a mapping at '{path or '<root>'}', "
                          f"got {type(user).__name__}")
    merged = copy.deepcopy(defaults)
    for key, value in user.items():
        here = f"{path}.{key}" if path else str(key)
        if key not in defaults:
            raise ConfigError(f"unknown key '{here}'")
        ref = defaults[key]
        if isinstance(ref, dict):
            merged[key] = _merge(value, ref, here)
        else:
            merged[key] = _coerce(value, ref, here)
    return merged


def _coerce(value, ref, path):
    if ref is None or value is None:
        if value is None or isinstance(value, (int, float)):
            return value
        raise ConfigError(f"'{path}' must be a number or null")
    if isinstance(ref, bool) or isinstance(value, bool):
        raise ConfigError(f"'{path}' has an unsupported boolean value")
    if isinstance(ref, int) and not isinstance(ref, bool):
        if not isinstance(value, int):
            raise ConfigError(f"'{path}' must be an integer, "
                              f"got {value!r}")
        return value
    if isinstance(ref, float):
        if not isinstance(value, (int, float)):
            raise ConfigError(f"'{path}' must be a number, got {value!r}")
        return float(value)
    if isinstance(ref, str):
        if not isinstance(value, str):
            raise ConfigError(f"'{path}' must be a string, got {value!r}")
        return value
    if isinstance(ref, list):
        if not isinstance(value, list):
            raise ConfigError(f"'{path}' must be a list, got {value!r}")
        return value
    raise ConfigError(f"'{path}' has an unsupported value {value!r}")


@dataclass(frozen=True)
class RunConfig:
    """Typed view of one canonical configuration."""

    material: PlateMaterial
    constants: PlateConstants
    synthesis: SynthesisParams
    sample_rate: float
    duration: float
    room: RoomGeometry
    sensors: SensorArray
    profile: VelocityProfile
    region_grid: tuple[int, int]
    localization_grid: tuple[int, int]
    c_hat: float
    mc_source: tuple[float, float]
    mc_sigma_t: tuple[float, ...]
    mc_runs: int
    mc_seed: int
    bounded_room: RoomGeometry
    bounded_source: tuple[float, float]
    bounded_sensor: tuple[float, float]
    bounded_p_max: int
    bounded_q_max: int
    stft_window: int
    stft_overlap: int
    stft_fft_len: int
    output_dir: Path
    canonical: dict


def _pair(raw, path) -> tuple[float, float]:
    try:
        x, y = float(raw[0]), float(raw[1])
    except (TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"'{path}' must be a pair of numbers") from exc
    if len(raw) != 2:
        raise ConfigError(f"'{path}' must be a pair of numbers")
    return x, y


def _int_pair(raw, path) -> tuple[int, int]:
    if (not isinstance(raw, list) or len(raw) != 2
            or not all(isinstance(v, int) for v in raw)):
        raise ConfigError(f"'{path}' must be a pair of integers")
    return int(raw[0]), int(raw[1])


def _build(merged: dict) -> RunConfig:
    try:
        mat = PlateMaterial(
            youngs_modulus=merged["material"]["youngs_modulus_pa"],
            density=merged["material"]["density_kg_m3"],
            poisson=merged["material"]["poisson"],
            thickness=merged["material"]["thickness_m"],
            damping_theta=merged["material"]["damping_theta_s"])
    except ValueError as exc:
        raise ConfigError(f"material: {exc}") from exc
    constants = derive_constants(mat)

    syn = merged["synthesis"]
    try:
        weight = SpectralWeight(syn["spectral_weight"])
    except ValueError as exc:
        allowed = ", ".join(w.value for w in SpectralWeight)
        raise ConfigError(
            f"'synthesis.spectral_weight' must be one of: {allowed}") from exc
    try:
        params = SynthesisParams(
            f_max=syn["f_max_hz"], n_terms=syn["n_terms"],
            spectral_weight=weight,
            pulse=Pulse(PulseKind.BURST_RATE, syn["pulse_duration_s"]))
    except ValueError as exc:
        raise ConfigError(f"synthesis: {exc}") from exc
    if syn["sample_rate_hz"] <= 0 or syn["duration_s"] <= 0:
        raise ConfigError("'synthesis.sample_rate_hz' and "
                          "'synthesis.duration_s' must be > 0")

    try:
        room = RoomGeometry(lx=merged["room"]["lx_m"],
                            ly=merged["room"]["ly_m"])
    except ValueError as exc:
        raise ConfigError(f"room: {exc}") from exc

    raw_pos = merged["sensors"]["positions_m"]
    try:
        sensors = SensorArray(positions=np.asarray(raw_pos, dtype=float))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"sensors.positions_m: {exc}") from exc
    for k, (x, y) in enumerate(sensors.positions):
        if not room.contains((x, y)):
            raise ConfigError(
                f"sensors.positions_m[{k}] = ({x}, {y}) outside the room")

    prof = merged["profile"]
    kind = prof["kind"]
    try:
        pkind = ProfileKind(kind)
    except ValueError as exc:
        allowed = ", ".join(k.value for k in ProfileKind)
        raise ConfigError(f"'profile.kind' must be one of: {allowed}") from exc
    try:
        if pkind is ProfileKind.CONSTANT:
            profile = VelocityProfile.constant(prof["c0_m_s"])
        elif pkind is ProfileKind.POWER_LAW:
            a = prof["dispersion_a_m2_s"]
            theta = prof["theta_s"]
            profile = VelocityProfile.power_law(
                constants.dispersion_coeff if a is None else float(a),
                mat.damping_theta if theta is None else float(theta))
        else:
            profile = VelocityProfile.clamped_decay(
                c_near=prof["c_near_m_s"], c_far=prof["c_far_m_s"],
                d_knee=prof["d_knee_m"])
    except ValueError as exc:
        raise ConfigError(f"profile: {exc}") from exc

    mc = merged["montecarlo"]
    source = _pair(mc["source_m"], "montecarlo.source_m")
    if not isinstance(mc["sigma_t_s"], list) or not mc["sigma_t_s"]:
        raise ConfigError("'montecarlo.sigma_t_s' must be a non-empty list")
    sigmas = []
    for k, s in enumerate(mc["sigma_t_s"]):
        if not isinstance(s, (int, float)) or s < 0:
            raise ConfigError(f"'montecarlo.sigma_t_s[{k}]' must be >= 0")
        sigmas.append(float(s))
    if mc["runs"] < 1:
        raise ConfigError("'montecarlo.runs' must be >= 1")
    if not room.contains(source):
        raise ConfigError(f"montecarlo source {source} outside the room")

    bnd = merged["bounded"]
    try:
        bounded_room = RoomGeometry(lx=bnd["room_lx_m"], ly=bnd["room_ly_m"])
    except ValueError as exc:
        raise ConfigError(f"bounded: {exc}") from exc
    b_source = _pair(bnd["source_m"], "bounded.source_m")
    b_sensor = _pair(bnd["sensor_m"], "bounded.sensor_m")
    if bnd["p_max"] < 0 or bnd["q_max"] < 0:
        raise ConfigError("'bounded.p_max' and 'bounded.q_max' must be >= 0")

    st = merged["stft"]
    if not 0 <= st["overlap"] < st["window_len"] <= st["fft_len"]:
        raise ConfigError("stft: need overlap < window_len <= fft_len")

    return RunConfig(
        material=mat,
        constants=constants,
        synthesis=params,
        sample_rate=float(syn["sample_rate_hz"]),
        duration=float(syn["duration_s"]),
        room=room,
        sensors=sensors,
        profile=profile,
        region_grid=_int_pair(merged["regions"]["grid"], "regions.grid"),
        localization_grid=_int_pair(merged["localization"]["grid"],
                                    "localization.grid"),
        c_hat=float(merged["localization"]["c_hat_m_s"]),
        mc_source=source,
        mc_sigma_t=tuple(sigmas),
        mc_runs=int(mc["runs"]),
        mc_seed=int(mc["seed"]),
        bounded_room=bounded_room,
        bounded_source=b_source,
        bounded_sensor=b_sensor,
        bounded_p_max=int(bnd["p_max"]),
        bounded_q_max=int(bnd["q_max"]),
        stft_window=int(st["window_len"]),
        stft_overlap=int(st["overlap"]),
        stft_fft_len=int(st["fft_len"]),
        output_dir=Path(merged["output_dir"]),
        canonical=merged,
    )


def config_from_dict(raw: dict | None) -> RunConfig:
    merged = _merge(raw or {}, DEFAULTS)
    return _build(merged)


def load_config(path: str | Path | None) -> RunConfig:
    """Load and validate a YAML configuration file (None: pure defaults)."""
    if path is None:
        return config_from_dict({})
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if raw is None:
        raw = {}
    try:
        return config_from_dict(raw)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def dump_canonical(cfg: RunConfig) -> str:
    """Serialize the fully defaulted configuration (canonical form)."""
    return yaml.safe_dump(cfg.canonical, sort_keys=True)
