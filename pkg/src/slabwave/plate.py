"""Closed-form physics of a damped, dispersive thin plate.

Bending waves on a thin plate of stiffness D = E h^3 / (12 (1 - sigma^2))
obey the dispersion relation

    -omega^2 + a^2 (1 - j theta omega) k^4 = 0,      a = sqrt(D / (rho h)),

where theta is the Kelvin-Voigt damping time.  For a low loss factor
(theta * omega << 1) the wavenumber splits into a real part
k_R = sqrt(omega / a) and an attenuation part k_I = (theta * omega / 4) k_R,
giving the group velocity c_g = 2 sqrt(a omega).  A stationary-phase
evaluation of the propagated wave packet yields a closed-form envelope
A(d, t) whose maximum over distance traces the arrival of the packet; the
resulting "perceived propagation velocity" decreases with distance as
c_p(d) = (16 a^2 / (theta d))^(1/3).
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import LossFactorWarning, NonPhysicalError, ZeroDampingError

# theta*omega above this value voids the first-order wavenumber expansion
LOSS_FACTOR_LIMIT = 0.1


@dataclass(frozen=True)
class PlateMaterial:
    """Physical description of the slab.

    youngs_modulus : Pa
    density        : kg/m^3
    poisson        : dimensionless, in (0, 0.5)
    thickness      : m
    damping_theta  : s, Kelvin-Voigt damping time
    """

    youngs_modulus: float
    density: float
    poisson: float
    thickness: float
    damping_theta: float

    def __post_init__(self):
        for name in ("youngs_modulus", "density", "thickness", "damping_theta"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if not 0 <= self.poisson < 0.5:
            raise ValueError(
                f"poisson must lie in [0, 0.5), got {self.poisson}")

    def low_loss_valid(self, omega_max: float) -> bool:
        """True when the low-loss expansion holds up to omega_max (rad/s)."""
        return self.damping_theta * omega_max < LOSS_FACTOR_LIMIT


@dataclass(frozen=True)
class PlateConstants:
    """Derived propagation constants.

    bending_stiffness : N m,  D = E h^3 / (12 (1 - sigma^2))
    dispersion_coeff  : m^2/s,  a = sqrt(D / (rho h))
    loss_coeff        : gamma = theta / (4 sqrt(a)), attenuation exponent scale
    amplitude_coeff   : |alpha| = pi a^(3/2) / (2 D), spectral amplitude scale
    """

    bending_stiffness: float
    dispersion_coeff: float
    loss_coeff: float
    amplitude_coeff: float

    def __post_init__(self):
        vals = (self.bending_stiffness, self.dispersion_coeff,
                self.loss_coeff, self.amplitude_coeff)
        if not all(math.isfinite(v) and v > 0 for v in vals):
            raise NonPhysicalError(f"non-physical plate constants: {vals}")


def derive_constants(material: PlateMaterial) -> PlateConstants:
    """Compute the propagation constants of a plate material."""
    d = material.youngs_modulus * material.thickness**3 / (
        12.0 * (1.0 - material.poisson**2))
    a = math.sqrt(d / (material.density * material.thickness))
    gamma = material.damping_theta / (4.0 * math.sqrt(a))
    alpha = math.pi * a**1.5 / (2.0 * d)
    return PlateConstants(bending_stiffness=d, dispersion_coeff=a,
                          loss_coeff=gamma, amplitude_coeff=alpha)


def wavenumber(omega, constants: PlateConstants, theta: float):
    """Real and imaginary wavenumber parts (k_R, k_I) at omega (rad/s).

    Low-loss first-order expansion: k_R = sqrt(omega/a),
    k_I = (theta*omega/4) * k_R.  Warns when theta*omega leaves the
    low-loss regime.
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValueError("omega must be >= 0")
    eta = theta * np.max(omega, initial=0.0)
    if eta >= LOSS_FACTOR_LIMIT:
        warnings.warn(
            f"loss factor theta*omega = {eta:.3g} >= {LOSS_FACTOR_LIMIT}; "
            "first-order wavenumber expansion is unreliable",
            LossFactorWarning, stacklevel=2)
    k_r = np.sqrt(omega / constants.dispersion_coeff)
    k_i = 0.25 * theta * omega * k_r
    if omega.ndim == 0:
        return float(k_r), float(k_i)
    return k_r, k_i


def group_velocity(omega, constants: PlateConstants):
    """Group velocity c_g = 2 sqrt(a * omega) in m/s."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValueError("omega must be >= 0")
    c = 2.0 * np.sqrt(constants.dispersion_coeff * omega)
    return float(c) if c.ndim == 0 else c


def envelope(d, t, constants: PlateConstants, theta: float):
    """Stationary-phase envelope of the propagated packet (arbitrary units).

    A(d, t) = (|alpha| a / (2 sqrt 2)) * d^2 * t^(-5/2)
              * exp(-(theta / (32 a^2)) * d^4 / t^3)
    """
    d = np.asarray(d, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(d <= 0) or np.any(t <= 0):
        raise ValueError("envelope requires d > 0 and t > 0")
    a = constants.dispersion_coeff
    pref = constants.amplitude_coeff * a / (2.0 * math.sqrt(2.0))
    out = pref * d**2 * t**-2.5 * np.exp(-(theta / (32.0 * a**2)) * d**4 / t**3)
    return float(out) if out.ndim == 0 else out


def stationary_frequency(d, t, constants: PlateConstants):
    """Dominant (stationary-phase) frequency omega_0 = (d / (2 sqrt(a) t))^2."""
    d = np.asarray(d, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(d <= 0) or np.any(t <= 0):
        raise ValueError("stationary_frequency requires d > 0 and t > 0")
    out = (d / (2.0 * np.sqrt(constants.dispersion_coeff) * t))**2
    return float(out) if out.ndim == 0 else out


def envelope_max_toa(d, constants: PlateConstants, theta: float):
    """Time at which the envelope maximum passes distance d:
    t = (theta d^4 / (16 a^2))^(1/3)."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("envelope_max_toa requires d > 0")
    if theta <= 0:
        raise ZeroDampingError(
            "envelope maximum locus degenerates for theta <= 0")
    a = constants.dispersion_coeff
    out = (theta * d**4 / (16.0 * a**2))**(1.0 / 3.0)
    return float(out) if out.ndim == 0 else out


def perceived_velocity(d, constants: PlateConstants, theta: float):
    """Perceived propagation velocity c_p(d) = (16 a^2 / (theta d))^(1/3).

    Distance over envelope-max arrival time; decreases with distance as
    d^(-1/3).  Undefined for an undamped plate.
    """
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("perceived_velocity requires d > 0")
    if theta <= 0:
        raise ZeroDampingError("perceived velocity undefined for theta <= 0")
    a = constants.dispersion_coeff
    out = (16.0 * a**2 / (theta * d))**(1.0 / 3.0)
    return float(out) if out.ndim == 0 else out


def envelope_peak_time(d, constants: PlateConstants, theta: float):
    """Time maximizing the envelope at a fixed distance:
    t = (3 theta d^4 / (80 a^2))^(1/3).

    This is earlier than envelope_max_toa(d), which tracks the maximum
    over distance instead.
    """
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("envelope_peak_time requires d > 0")
    if theta <= 0:
        raise ZeroDampingError("envelope peak undefined for theta <= 0")
    a = constants.dispersion_coeff
    out = (3.0 * theta * d**4 / (80.0 * a**2))**(1.0 / 3.0)
    return float(out) if out.ndim == 0 else out


def envelope_threshold_toa(d: float, constants: PlateConstants, theta: float,
                           level: float) -> float:
    """First time the rising envelope at distance d crosses a level.

    The envelope grows from zero to its peak and decays; the root on the
    rising flank is bracketed and solved numerically.
    """
    from scipy.optimize import brentq

    if level <= 0:
        raise ValueError(f"level must be > 0, got {level}")
    t_peak = envelope_peak_time(d, constants, theta)
    peak = envelope(d, t_peak, constants, theta)
    if peak < level:
        raise ValueError(
            f"envelope at d = {d} m never reaches level {level:.6g}")
    t_lo = t_peak
    while envelope(d, t_lo, constants, theta) >= level:
        t_lo *= 0.5
        if t_lo < 1e-300:
            raise ValueError("failed to bracket the envelope crossing")
    return float(brentq(
        lambda t: envelope(d, t, constants, theta) - level, t_lo, t_peak,
        xtol=1e-15, rtol=1e-14))


class PulseKind(enum.Enum):
    """Excitation pulse shapes: a smooth two-harmonic burst and its rate."""

    BURST = "burst"                # sin(2 pi t/T) - 0.5 sin(4 pi t/T) on [0, T]
    BURST_RATE = "burst_rate"      # analytic time derivative of BURST


@dataclass(frozen=True)
class Pulse:
    kind: PulseKind
    duration: float  # s

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError(f"duration must be > 0, got {self.duration}")


def pulse_value(pulse: Pulse, t):
    """Pulse amplitude at time t (zero outside [0, T])."""
    t = np.asarray(t, dtype=float)
    T = pulse.duration
    inside = (t >= 0) & (t <= T)
    if pulse.kind is PulseKind.BURST:
        val = np.sin(2 * np.pi * t / T) - 0.5 * np.sin(4 * np.pi * t / T)
    else:
        val = (2 * np.pi / T) * (np.cos(2 * np.pi * t / T)
                                 - np.cos(4 * np.pi * t / T))
    out = np.where(inside, val, 0.0)
    return float(out) if out.ndim == 0 else out


def pulse_spectrum(pulse: Pulse, omega):
    """Closed-form spectrum of the pulse under f_hat(w) = int f(t) e^{+jwt} dt.

    For the burst:

        f_hat(w) = -3j T / (4 pi) * e^{j w T / 2} * sin(w T / 2)
                   / ((1 - (wT/2pi)^2) (1 - (wT/4pi)^2))

    with removable singularities at wT = +-2pi (value +-jT/2) and
    wT = +-4pi (value -+jT/4).  Vanishes linearly as wT -> 0.  The rate
    pulse has spectrum (-j w) f_hat(w).
    """
    omega = np.asarray(omega, dtype=float)
    T = pulse.duration
    wt = omega * T
    x = wt / (2 * np.pi)
    y = wt / (4 * np.pi)
    denom = (1.0 - x**2) * (1.0 - y**2)
    near_x = np.isclose(np.abs(x), 1.0, rtol=0, atol=1e-9)
    near_y = np.isclose(np.abs(y), 1.0, rtol=0, atol=1e-9)
    safe = np.where(near_x | near_y, 1.0, denom)
    base = (-3j * T / (4 * np.pi)) * np.exp(1j * wt / 2) * np.sin(wt / 2) / safe
    base = np.where(near_x, 0.5j * T * np.sign(omega), base)
    base = np.where(near_y, -0.25j * T * np.sign(omega), base)
    if pulse.kind is PulseKind.BURST_RATE:
        base = -1j * omega * base
    return complex(base) if base.ndim == 0 else base
