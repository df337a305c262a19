"""Plate physics: derived constants, dispersion, envelope, pulses."""

import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

import slabwave as sw
from slabwave.errors import LossFactorWarning, ZeroDampingError

CONCRETE = sw.PlateMaterial(youngs_modulus=24e9, density=2500.0, poisson=0.2,
                            thickness=0.2, damping_theta=1e-5)


def constants_for(a: float, theta: float = 1e-5,
                  bending_stiffness: float = 1.6666667e7) -> sw.PlateConstants:
    """Constants pinned to a given dispersion coefficient."""
    return sw.PlateConstants(
        bending_stiffness=bending_stiffness, dispersion_coeff=a,
        loss_coeff=theta / (4 * math.sqrt(a)),
        amplitude_coeff=math.pi * a**1.5 / (2 * bending_stiffness))


class TestDeriveConstants:
    def test_concrete_reference_values(self):
        c = sw.derive_constants(CONCRETE)
        # independent hand evaluation of the two formulas
        d_expected = 24e9 * 0.2**3 / (12 * (1 - 0.2**2))
        assert c.bending_stiffness == pytest.approx(d_expected, rel=1e-12)
        assert c.bending_stiffness == pytest.approx(1.667e7, rel=1e-3)
        assert c.dispersion_coeff == pytest.approx(
            math.sqrt(d_expected / 500.0), rel=1e-12)
        assert abs(c.dispersion_coeff - 183.0) < 1.0
        assert c.loss_coeff == pytest.approx(1.8502e-7, rel=1e-4)
        assert c.loss_coeff == pytest.approx(1.848e-7, rel=5e-3)
        assert c.amplitude_coeff == pytest.approx(
            math.pi * c.dispersion_coeff**1.5 / (2 * d_expected), rel=1e-12)

    def test_unit_normalizing_case(self):
        m = sw.PlateMaterial(youngs_modulus=12.0, density=1.0, poisson=0.0,
                             thickness=1.0, damping_theta=1e-5)
        c = sw.derive_constants(m)
        assert c.bending_stiffness == pytest.approx(1.0)
        assert c.dispersion_coeff == pytest.approx(1.0)

    def test_consistency_a_squared_rho_h_is_d(self):
        c = sw.derive_constants(CONCRETE)
        assert c.dispersion_coeff**2 * 2500.0 * 0.2 == pytest.approx(
            c.bending_stiffness, rel=1e-12)

    def test_invalid_material_rejected(self):
        with pytest.raises(ValueError):
            sw.PlateMaterial(youngs_modulus=-1, density=2500, poisson=0.2,
                             thickness=0.2, damping_theta=1e-5)
        with pytest.raises(ValueError):
            sw.PlateMaterial(youngs_modulus=24e9, density=2500, poisson=0.6,
                             thickness=0.2, damping_theta=1e-5)

    def test_low_loss_flag(self):
        assert CONCRETE.low_loss_valid(2 * math.pi * 1000)
        assert not CONCRETE.low_loss_valid(1e4 / 1e-5)


class TestWavenumber:
    def test_unit_wavenumber_at_omega_equal_a(self):
        c = constants_for(183.0)
        k_r, _ = sw.wavenumber(183.0, c, theta=1e-5)
        assert k_r == pytest.approx(1.0, rel=1e-12)

    def test_undamped_limit(self):
        c = constants_for(183.0)
        _, k_i = sw.wavenumber(500.0, c, theta=0.0)
        assert k_i == 0.0

    def test_against_exact_quartic_root(self):
        # oracle: imaginary part of the exact complex root of the
        # dispersion relation
        a, theta, omega = 183.0, 1e-5, 183.0
        c = constants_for(a)
        _, k_i = sw.wavenumber(omega, c, theta=theta)
        k_exact = math.sqrt(omega / a) * (1 - 1j * theta * omega)**-0.25
        assert k_i == pytest.approx(4.575e-4, rel=1e-3)
        assert k_i == pytest.approx(k_exact.imag, rel=1e-3)

    def test_attenuation_ratio_is_quarter_loss_factor(self):
        c = constants_for(183.0)
        omegas = np.linspace(10.0, 5000.0, 17)
        k_r, k_i = sw.wavenumber(omegas, c, theta=1e-5)
        np.testing.assert_allclose(k_i / k_r, 1e-5 * omegas / 4, rtol=1e-13)

    def test_loss_factor_warning(self):
        c = constants_for(183.0)
        with pytest.warns(LossFactorWarning):
            sw.wavenumber(2e4, c, theta=1e-5)


class TestGroupVelocity:
    def test_zero_at_zero_frequency(self):
        assert sw.group_velocity(0.0, constants_for(183.0)) == 0.0

    def test_reference_value(self):
        c = constants_for(183.0)
        cg = sw.group_velocity(2 * math.pi * 1000, c)
        assert cg == pytest.approx(2145.0, rel=2e-3)
        # oracle: centered finite difference of omega(k) = a k^2
        k = math.sqrt(2 * math.pi * 1000 / 183.0)
        h = 1e-6 * k
        cg_fd = (183.0 * (k + h)**2 - 183.0 * (k - h)**2) / (2 * h)
        assert cg == pytest.approx(cg_fd, rel=1e-9)

    def test_sqrt_scaling(self):
        c = constants_for(183.0)
        assert sw.group_velocity(4 * 700.0, c) == pytest.approx(
            2 * sw.group_velocity(700.0, c), rel=1e-12)

    def test_dispersion_consistency(self):
        # c_g * k_R = 2 omega for every omega
        c = constants_for(183.0)
        omegas = np.linspace(1.0, 6e4, 23)
        k_r, _ = sw.wavenumber(omegas, c, theta=0.0)
        np.testing.assert_allclose(sw.group_velocity(omegas, c) * k_r,
                                   2 * omegas, rtol=1e-12)


class TestEnvelope:
    def test_decays_at_large_time(self):
        c = constants_for(183.0)
        assert sw.envelope(10.0, 1e4, c, 1e-5) < 1e-6 * sw.envelope(
            10.0, 1.0, c, 1e-5)

    def test_argmax_over_distance_matches_locus(self):
        c = constants_for(183.0)
        t = 5.712e-3
        res = minimize_scalar(lambda d: -sw.envelope(d, t, c, 1e-5),
                              bounds=(1.0, 40.0), method="bounded",
                              options={"xatol": 1e-10})
        assert res.x == pytest.approx(10.0, rel=5e-3)

    def test_quadratic_distance_scaling_without_damping(self):
        c = constants_for(183.0)
        ratio = sw.envelope(20.0, 0.01, c, 0.0) / sw.envelope(10.0, 0.01, c, 0.0)
        assert ratio == pytest.approx(4.0, rel=1e-12)

    def test_locus_agreement_across_parameters(self):
        # numeric argmax over d of A(., t_a(d)) returns d within 0.5%
        for a in (90.0, 183.0, 400.0):
            for theta in (1e-5, 1e-4):
                c = constants_for(a, theta)
                for d in (5.0, 12.5, 20.0):
                    t_a = sw.envelope_max_toa(d, c, theta)
                    res = minimize_scalar(
                        lambda dd: -sw.envelope(dd, t_a, c, theta),
                        bounds=(0.3 * d, 3.0 * d), method="bounded",
                        options={"xatol": 1e-10})
                    assert res.x == pytest.approx(d, rel=5e-3)


class TestStationaryFrequency:
    def test_reference_value(self):
        c = constants_for(183.0)
        assert sw.stationary_frequency(10.0, 5.712e-3, c) == pytest.approx(
            4186.0, rel=1e-3)

    def test_oracle_phase_stationarity(self):
        # oracle: solve d/dw [k_R(w) d - w t] = 0 numerically
        c = constants_for(183.0)
        d, t = 10.0, 5.712e-3
        w0 = sw.stationary_frequency(d, t, c)
        phase_slope = lambda w: d / (2 * math.sqrt(183.0 * w)) - t
        h = 1e-6 * w0
        assert phase_slope(w0) == pytest.approx(0.0, abs=abs(phase_slope(w0 + 100 * h)))

    def test_time_scaling(self):
        c = constants_for(183.0)
        assert sw.stationary_frequency(10.0, 2 * 5e-3, c) == pytest.approx(
            sw.stationary_frequency(10.0, 5e-3, c) / 4, rel=1e-12)

    def test_vanishes_with_distance(self):
        c = constants_for(183.0)
        assert sw.stationary_frequency(1e-9, 5e-3, c) < 1e-12


class TestPerceivedVelocity:
    def test_reference_values(self):
        c = constants_for(183.0)
        assert sw.perceived_velocity(10.0, c, 1e-5) == pytest.approx(
            1751.0, rel=5e-3)
        assert sw.envelope_max_toa(10.0, c, 1e-5) == pytest.approx(
            5.71e-3, rel=2e-3)

    def test_two_dimensional_envelope_maximum(self):
        # oracle: at (d, t_a(d)) the envelope is maximal over distance
        c = constants_for(183.0)
        d = 10.0
        t_a = sw.envelope_max_toa(d, c, 1e-5)
        res = minimize_scalar(lambda dd: -sw.envelope(dd, t_a, c, 1e-5),
                              bounds=(3.0, 30.0), method="bounded",
                              options={"xatol": 1e-10})
        assert res.x == pytest.approx(d, rel=5e-3)
        assert sw.perceived_velocity(d, c, 1e-5) == pytest.approx(
            d / t_a, rel=1e-12)

    def test_cube_root_scaling(self):
        c = constants_for(183.0)
        assert sw.perceived_velocity(8 * 5.0, c, 1e-5) == pytest.approx(
            sw.perceived_velocity(5.0, c, 1e-5) / 2, rel=1e-12)

    def test_strictly_decreasing(self):
        c = constants_for(183.0)
        d = np.linspace(1.0, 100.0, 250)
        cp = sw.perceived_velocity(d, c, 1e-5)
        assert np.all(np.diff(cp) < 0)

    def test_zero_damping_rejected(self):
        c = constants_for(183.0)
        with pytest.raises(ZeroDampingError):
            sw.perceived_velocity(10.0, c, 0.0)
        with pytest.raises(ZeroDampingError):
            sw.envelope_max_toa(10.0, c, 0.0)

    def test_product_identity(self):
        c = constants_for(183.0)
        for d in (1.0, 7.3, 42.0):
            assert sw.perceived_velocity(d, c, 1e-5) * sw.envelope_max_toa(
                d, c, 1e-5) == pytest.approx(d, rel=1e-12)

    def test_arrival_time_strictly_increasing(self):
        c = constants_for(183.0)
        d = np.linspace(0.5, 60.0, 300)
        toa = sw.envelope_max_toa(d, c, 1e-5)
        assert np.all(np.diff(toa) > 0)


class TestEnvelopeTimeProfile:
    def test_peak_time_before_locus_time(self):
        c = constants_for(183.0)
        for d in (5.0, 10.0, 20.0):
            assert sw.envelope_peak_time(d, c, 1e-5) < sw.envelope_max_toa(
                d, c, 1e-5)

    def test_peak_time_maximizes_envelope(self):
        c = constants_for(183.0)
        d = 10.0
        t_pk = sw.envelope_peak_time(d, c, 1e-5)
        res = minimize_scalar(lambda t: -sw.envelope(d, t, c, 1e-5),
                              bounds=(t_pk / 10, t_pk * 10),
                              method="bounded", options={"xatol": 1e-12})
        assert res.x == pytest.approx(t_pk, rel=1e-5)

    def test_threshold_crossing_on_rising_flank(self):
        c = constants_for(183.0)
        d = 10.0
        t_pk = sw.envelope_peak_time(d, c, 1e-5)
        level = 0.25 * sw.envelope(d, t_pk, c, 1e-5)
        t_cross = sw.envelope_threshold_toa(d, c, 1e-5, level)
        assert t_cross < t_pk
        assert sw.envelope(d, t_cross, c, 1e-5) == pytest.approx(level,
                                                                 rel=1e-9)


class TestPulse:
    BURST = sw.Pulse(sw.PulseKind.BURST, duration=2e-3)
    RATE = sw.Pulse(sw.PulseKind.BURST_RATE, duration=2e-3)

    def test_burst_reference_points(self):
        T = self.BURST.duration
        assert sw.pulse_value(self.BURST, T / 4) == pytest.approx(1.0)
        assert sw.pulse_value(self.BURST, T / 2) == pytest.approx(0.0, abs=1e-15)
        assert sw.pulse_value(self.BURST, -0.1 * T) == 0.0
        assert sw.pulse_value(self.BURST, 1.1 * T) == 0.0

    def test_rate_matches_finite_difference(self):
        T = self.BURST.duration
        t = np.linspace(0.05 * T, 0.95 * T, 101)
        h = 1e-7 * T
        fd = (sw.pulse_value(self.BURST, t + h)
              - sw.pulse_value(self.BURST, t - h)) / (2 * h)
        np.testing.assert_allclose(sw.pulse_value(self.RATE, t), fd,
                                   rtol=1e-5, atol=1e-5)

    def test_spectrum_vanishes_linearly(self):
        T = self.BURST.duration
        s1 = abs(sw.pulse_spectrum(self.BURST, 1e-4 / T))
        s2 = abs(sw.pulse_spectrum(self.BURST, 1e-5 / T))
        assert s1 / s2 == pytest.approx(10.0, rel=1e-3)

    def test_spectrum_against_numeric_transform(self):
        # oracle: dense trapezoid integration of f(t) e^{+j w t}; points
        # near spectrum zeros (wT multiple of 4 pi beyond the first lobes)
        # are excluded because relative error is ill-posed there
        T = self.BURST.duration
        t = np.linspace(0.0, T, 200001)
        f = sw.pulse_value(self.BURST, t)
        wts = np.linspace(0.1, 20.0, 73)
        wts = wts[np.abs(np.sin(wts / 2)) > 0.05]
        for wt in wts:
            w = wt / T
            numeric = np.trapezoid(f * np.exp(1j * w * t), t)
            closed = sw.pulse_spectrum(self.BURST, w)
            assert abs(closed - numeric) / abs(numeric) < 1e-3

    def test_rate_spectrum_is_derivative_relation(self):
        T = self.BURST.duration
        w = np.array([0.7, 3.1, 9.9]) / T
        np.testing.assert_allclose(
            sw.pulse_spectrum(self.RATE, w),
            -1j * w * sw.pulse_spectrum(self.BURST, w), rtol=1e-12)

    def test_removable_singularities_are_continuous(self):
        T = self.BURST.duration
        for wt, expected in [(2 * np.pi, 0.5j * T), (4 * np.pi, -0.25j * T)]:
            at = sw.pulse_spectrum(self.BURST, wt / T)
            near = sw.pulse_spectrum(self.BURST, (wt + 1e-7) / T)
            assert at == pytest.approx(expected, rel=1e-9)
            assert near == pytest.approx(expected, rel=1e-5)
