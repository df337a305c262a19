"""Exception and warning types shared across the package."""


class SlabwaveError(Exception):
    """Base class for all package errors."""


class NonPhysicalError(SlabwaveError):
    """Derived plate constants are not finite / not physically meaningful."""


class ZeroDampingError(SlabwaveError):
    """Operation undefined for an undamped plate (envelope maximum degenerates)."""


class NonUniformGridError(SlabwaveError):
    """A time grid that must be uniformly sampled is not."""


class SourceOutsideRoomError(SlabwaveError):
    """Source position falls outside the room boundary."""


class SourceOnSensorError(SlabwaveError):
    """Source coincides with a sensor position; travel time undefined."""


class NoOnsetError(SlabwaveError):
    """No sample of the waveform exceeds the detection threshold."""


class LengthMismatchError(SlabwaveError):
    """Vector lengths are inconsistent with the sensor-pair layout."""


class InsufficientSamplesError(SlabwaveError):
    """Waveform too short for the requested analysis window."""


class BadPairError(SlabwaveError):
    """Sensor pair indices violate the canonical 1 <= i < j <= n ordering."""


class DegenerateGridError(SlabwaveError):
    """Classification grid is too coarse to enumerate regions."""


class EmptyMapError(SlabwaveError):
    """Region map holds no regions; decoding is impossible."""


class NonPositiveDistanceError(SlabwaveError):
    """Velocity profile evaluated at a non-positive distance."""


class ConfigError(SlabwaveError):
    """Configuration file is missing, malformed, or violates the schema."""


class LossFactorWarning(UserWarning):
    """Loss factor theta*omega reached the regime where the low-loss
    wavenumber expansion is no longer trustworthy."""


class ShortDistanceWarning(UserWarning):
    """Discrete-sum synthesis requested below the distance where the
    truncated spectrum still captures the dominant high-frequency content."""
