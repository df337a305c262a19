"""Onset picking, TDOA assembly, sign vectors, spectrograms."""

import numpy as np
import pytest

import slabwave as sw
from slabwave.errors import InsufficientSamplesError, LengthMismatchError, NoOnsetError

MATERIAL = sw.PlateMaterial(youngs_modulus=24e9, density=2500.0, poisson=0.2,
                            thickness=0.2, damping_theta=1e-5)
CONSTANTS = sw.derive_constants(MATERIAL)


class TestDetectToa:
    def test_first_sample_above_absolute_threshold(self):
        w = sw.Waveform(sample_rate=20e3, t0=0.0,
                        samples=np.array([0.0, 0.0, 0.2, 2.0]))
        est = sw.detect_toa(w, 1.0)
        assert est.time == pytest.approx(1.5e-4)
        assert est.method is sw.ToaMethod.THRESHOLD
        assert est.threshold_used == 1.0

    def test_no_onset(self):
        w = sw.Waveform(sample_rate=20e3, t0=0.0,
                        samples=np.array([0.1, 0.2, 0.1]))
        with pytest.raises(NoOnsetError):
            sw.detect_toa(w, 5.0)

    def test_fraction_mode_is_default(self):
        w = sw.Waveform(sample_rate=1e3, t0=0.0,
                        samples=np.array([0.01, 0.02, 0.5, 1.0]))
        est = sw.detect_toa(w)  # 10% of peak = 0.1
        assert est.time == pytest.approx(2e-3)
        assert est.threshold_used == pytest.approx(0.1)

    def test_threshold_crossing_precedes_peak(self):
        # oracle: dense scan of the synthesized trace
        t = np.arange(int(0.05 * 20e3)) / 20e3
        w = sw.synth_free(10.0, t, CONSTANTS, 1e-5, sw.SynthesisParams())
        est = sw.detect_toa(w, fraction=0.1)
        scan_hits = [k for k, v in enumerate(np.abs(w.samples))
                     if v > 0.1 * np.max(np.abs(w.samples))]
        assert est.time == pytest.approx(t[scan_hits[0]])
        assert est.time < 5.71e-3
        peak = sw.detect_toa_envelope_max(w)
        assert est.time < peak.time

    def test_raising_threshold_never_earlier(self):
        t = np.arange(int(0.05 * 20e3)) / 20e3
        w = sw.synth_free(12.0, t, CONSTANTS, 1e-5, sw.SynthesisParams())
        times = [sw.detect_toa(w, fraction=f).time
                 for f in (0.05, 0.1, 0.2, 0.4, 0.8)]
        assert all(a <= b for a, b in zip(times, times[1:]))

    def test_negative_swing_triggers(self):
        w = sw.Waveform(sample_rate=1e3, t0=0.0,
                        samples=np.array([0.0, -2.0, 0.0]))
        assert sw.detect_toa(w, 1.0).time == pytest.approx(1e-3)


class TestTdoa:
    def test_ordered_arrivals(self):
        tau = sw.tdoa_from_toas([1e-3, 2e-3, 3e-3])
        np.testing.assert_allclose(tau.as_array(), [-1e-3, -2e-3, -1e-3])
        z = sw.sign_vector(tau)
        assert z.bits == (-1, -1, -1)

    def test_tie_maps_to_plus_one(self):
        tau = sw.tdoa_from_toas([2e-3, 2e-3, 2e-3])
        assert sw.sign_vector(tau).bits == (1, 1, 1)

    def test_canonical_pair_order(self):
        # pairs (1,2),(1,3),(2,3),(1,4),(2,4),(3,4) for four sensors
        toas = np.array([0.1, 0.2, 0.4, 0.8])
        tau = sw.tdoa_from_toas(toas)
        expected = [0.1 - 0.2, 0.1 - 0.4, 0.2 - 0.4,
                    0.1 - 0.8, 0.2 - 0.8, 0.4 - 0.8]
        np.testing.assert_allclose(tau.as_array(), expected)
        assert tau.n_sensors == 4

    def test_origin_shift_invariance(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            toas = rng.uniform(0, 5e-3, size=6)
            z1 = sw.sign_vector(sw.tdoa_from_toas(toas))
            z2 = sw.sign_vector(sw.tdoa_from_toas(toas + 0.123))
            assert z1.bits == z2.bits

    def test_too_few_toas_rejected(self):
        with pytest.raises(LengthMismatchError):
            sw.tdoa_from_toas([1.0])

    def test_bad_vector_length_rejected(self):
        with pytest.raises(LengthMismatchError):
            sw.TdoaVector(values=(1.0, 2.0, 3.0, 4.0))  # not n(n-1)/2


class TestStft:
    def test_pure_tone_bin(self):
        fs = 20e3
        t = np.arange(4000) / fs
        w = sw.Waveform(sample_rate=fs, t0=0.0,
                        samples=np.sin(2 * np.pi * 1000.0 * t))
        spec = sw.stft(w, window_len=128, overlap=126, fft_len=128)
        peak_bins = np.argmax(spec.magnitudes, axis=0)
        assert np.all(peak_bins == round(1000 / (fs / 128)))

    def test_default_frame_spacing(self):
        fs = 20e3
        w = sw.Waveform(sample_rate=fs, t0=0.0, samples=np.ones(1000))
        spec = sw.stft(w, 128, 126, 128)
        hops = np.diff(spec.frame_times)
        np.testing.assert_allclose(hops, 2 / fs)
        n_frames = (1000 - 128) // 2 + 1
        assert spec.magnitudes.shape == (65, n_frames)

    def test_white_noise_energy_parseval(self):
        # two-sided spectral energy per frame equals fft_len times the
        # windowed sample energy; aggregated over frames this ties the
        # spectrogram to the raw signal energy via the window gain
        rng = np.random.default_rng(42)
        fs = 20e3
        samples = rng.standard_normal(40000)
        w = sw.Waveform(sample_rate=fs, t0=0.0, samples=samples)
        win_len, overlap, fft_len = 128, 126, 128
        spec = sw.stft(w, win_len, overlap, fft_len)
        mags2 = spec.magnitudes**2
        two_sided = 2 * mags2.sum() - mags2[0].sum() - mags2[-1].sum()
        window = np.hamming(win_len)
        n_frames = spec.magnitudes.shape[1]
        expected = (fft_len * n_frames * np.sum(window**2)
                    * np.sum(samples**2) / samples.size)
        assert two_sided == pytest.approx(expected, rel=0.05)

    def test_insufficient_samples(self):
        w = sw.Waveform(sample_rate=1e3, t0=0.0, samples=np.ones(64))
        with pytest.raises(InsufficientSamplesError):
            sw.stft(w, 128, 126, 128)

    def test_bad_window_arguments(self):
        w = sw.Waveform(sample_rate=1e3, t0=0.0, samples=np.ones(512))
        with pytest.raises(ValueError):
            sw.stft(w, 128, 128, 128)
        with pytest.raises(ValueError):
            sw.stft(w, 128, 64, 64)

    def test_spectrogram_csv(self, tmp_path):
        fs = 20e3
        t = np.arange(1000) / fs
        w = sw.Waveform(sample_rate=fs, t0=0.0,
                        samples=np.sin(2 * np.pi * 500.0 * t))
        spec = sw.stft(w, 128, 126, 128)
        path = tmp_path / "spec.csv"
        sw.arrival.spectrogram_to_csv(spec, path)
        lines = path.read_text().splitlines()
        assert len(lines) == 1 + spec.bin_freqs.size
        assert lines[0].split(",")[0] == "freq_hz\\time_s"


class TestToaTable:
    def test_roundtrip(self, tmp_path):
        ests = [sw.ToaEstimate(time=1e-3 * k, method=sw.ToaMethod.THRESHOLD,
                               threshold_used=0.5) for k in range(5)]
        path = tmp_path / "toas.csv"
        sw.arrival.toa_table_to_csv(ests, path)
        toas = sw.arrival.toa_table_from_csv(path)
        np.testing.assert_allclose(toas, [0.0, 1e-3, 2e-3, 3e-3, 4e-3])
