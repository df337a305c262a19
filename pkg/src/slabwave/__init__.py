"""Flexural-wave synthesis and sign-only TDOA localization on damped slabs."""

from .arrival import (
    Spectrogram,
    TdoaVector,
    ToaEstimate,
    ToaMethod,
    detect_toa,
    detect_toa_envelope_max,
    sign_vector,
    stft,
    tdoa_from_toas,
)
from .localize import (
    Algorithm,
    LocalizationResult,
    localize_hyperbolic,
    localize_so_tdoa,
    localize_so_tdoa_grid,
    make_grid,
)
from .montecarlo import (
    MonteCarloConfig,
    MonteCarloReport,
    ProfileKind,
    VelocityProfile,
    add_toa_noise,
    grid_sensor_layout,
    profile_speed,
    run_monte_carlo,
    simulate_toas,
)
from .plate import (
    PlateConstants,
    PlateMaterial,
    Pulse,
    PulseKind,
    derive_constants,
    envelope,
    envelope_max_toa,
    envelope_peak_time,
    envelope_threshold_toa,
    group_velocity,
    perceived_velocity,
    pulse_spectrum,
    pulse_value,
    stationary_frequency,
    wavenumber,
)
from .regions import (
    CharacteristicVector,
    RegionMap,
    SensorArray,
    characteristic_vector,
    decode,
    enumerate_regions,
    hamming,
    load_region_map,
    pair_index,
    region_upper_bound,
    save_region_map,
)
from .synth import (
    ImageSource,
    ImageSourceSet,
    RoomGeometry,
    SpectralWeight,
    SynthesisParams,
    Waveform,
    image_positions,
    superpose_images,
    synth_bounded,
    synth_free,
    waveform_from_binary,
    waveform_from_csv,
    waveform_to_binary,
    waveform_to_csv,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
