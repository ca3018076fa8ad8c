import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from scipy.special import j0
from scipy.stats import kstest

from chirplink.channel import (
    ChannelRealization,
    DopplerSpec,
    NoiseSpec,
    TapProfile,
    apply_awgn,
    apply_channel,
    apply_tvfs,
    bits_per_symbol,
    ebn0_db_to_snr_db,
    ebn0_to_sigma2,
    flat_rayleigh,
    load_tap_profile,
    snr_db_to_ebn0_db,
    snr_to_sigma2,
    tvfs_realization,
    urban_12tap_profile,
)
from chirplink.chirp import raw_upchirp, spreading_gain_db

from oracles import linear_convolve_timevarying


class TestNoiseBookkeeping:
    def test_snr_at_zero_ebn0_equals_minus_gain(self):
        # with one bit of energy per noise-density unit, the per-sample SNR
        # sits exactly at the negative spreading gain
        snr_db = ebn0_db_to_snr_db(0.0, 7, "lora-noncoherent")
        assert_allclose(snr_db, -spreading_gain_db(7), rtol=1e-12)
        assert_allclose(snr_db, -12.62, atol=5e-3)

    def test_conversions_are_inverse(self):
        for scheme in ("lora-noncoherent", "iqcss"):
            for ebn0 in (-3.0, 0.0, 7.5):
                snr = ebn0_db_to_snr_db(ebn0, 8, scheme)
                assert_allclose(snr_db_to_ebn0_db(snr, 8, scheme), ebn0, atol=1e-12)

    def test_iq_scheme_shifts_snr_by_3db(self):
        # twice the bits per chirp at equal energy-per-bit means twice the
        # symbol energy, hence 3 dB more per-sample SNR
        delta = ebn0_db_to_snr_db(5.0, 7, "iqcss") - ebn0_db_to_snr_db(5.0, 7, "lora-coherent")
        assert_allclose(delta, 10 * np.log10(2), rtol=1e-12)

    def test_bits_per_symbol(self):
        assert bits_per_symbol(7, "lora-noncoherent") == 7
        assert bits_per_symbol(7, "lora-coherent") == 7
        assert bits_per_symbol(7, "iqcss") == 14

    def test_sigma2_consistency(self):
        es = 128.0
        spec = ebn0_to_sigma2(4.0, 7, "lora-coherent", es)
        # realized SNR must match the axis conversion
        snr_db = 10 * np.log10(es / (128 * spec.variance))
        assert_allclose(snr_db, ebn0_db_to_snr_db(4.0, 7, "lora-coherent"), rtol=1e-12)
        spec_snr = snr_to_sigma2(snr_db, 7, es)
        assert_allclose(spec_snr.variance, spec.variance, rtol=1e-12)

    def test_sigma2_monotone_in_ebn0(self):
        values = [ebn0_to_sigma2(db, 7, "iqcss", 128.0).variance for db in range(-5, 15)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_negative_variance_rejected(self):
        with pytest.raises(ValueError):
            NoiseSpec(-1.0)


class TestAwgn:
    def test_zero_variance_is_identity(self):
        x = raw_upchirp(7)
        out = apply_awgn(x, NoiseSpec(0.0), np.random.default_rng(0))
        assert_array_equal(out, x)
        assert out is not x

    def test_sample_variance(self):
        rng = np.random.default_rng(123)
        sigma2 = 3.7
        noise = apply_awgn(np.zeros(1_000_000, dtype=complex), sigma2, rng)
        assert_allclose(np.mean(np.abs(noise) ** 2), sigma2, rtol=0.01)

    def test_quadratures_uncorrelated(self):
        rng = np.random.default_rng(7)
        noise = apply_awgn(np.zeros(1_000_000, dtype=complex), 2.0, rng)
        corr = np.corrcoef(noise.real, noise.imag)[0, 1]
        assert abs(corr) < 0.01

    def test_deterministic_under_seed(self):
        x = raw_upchirp(7)
        a = apply_awgn(x, 1.0, np.random.default_rng(55))
        b = apply_awgn(x, 1.0, np.random.default_rng(55))
        assert_array_equal(a, b)


class TestDoppler:
    def test_tabulated_mobility(self):
        dop = DopplerSpec(speed_kmh=0.1, carrier_hz=863e6)
        assert_allclose(dop.max_doppler_hz, 0.0799627, atol=1e-6)

    def test_scales_linearly_with_speed(self):
        assert_allclose(
            DopplerSpec(1.0, 863e6).max_doppler_hz,
            10 * DopplerSpec(0.1, 863e6).max_doppler_hz,
            rtol=1e-12,
        )


class TestFlatRayleigh:
    def test_zero_doppler_gain_is_constant(self):
        rng = np.random.default_rng(3)
        real = flat_rayleigh(1000, None, 250e3, rng)
        assert np.all(real.gains[0] == real.gains[0, 0])

    def test_block_static_mode(self):
        rng = np.random.default_rng(3)
        real = flat_rayleigh(500, DopplerSpec(30.0, 863e6), 250e3, rng, block_static=True)
        assert np.all(real.gains[0] == real.gains[0, 0])

    def test_unit_average_power(self):
        rng = np.random.default_rng(17)
        draws = np.array(
            [flat_rayleigh(1, None, 250e3, rng).gains[0, 0] for _ in range(100_000)]
        )
        assert_allclose(np.mean(np.abs(draws) ** 2), 1.0, rtol=0.02)

    def test_magnitude_is_rayleigh(self):
        rng = np.random.default_rng(2718)
        draws = np.array(
            [flat_rayleigh(1, None, 250e3, rng).gains[0, 0] for _ in range(100_000)]
        )
        result = kstest(np.abs(draws), "rayleigh", args=(0, 1 / np.sqrt(2)))
        assert result.pvalue > 0.01

    def test_autocorrelation_tracks_bessel(self):
        # E[h[n] h*[n+m]] under the classical Doppler spectrum follows
        # J0(2 pi fd m Ts); check lags up to 0.1/fd
        fd = 100.0
        rate = 250e3
        ts = 1 / rate
        n = int(0.1 / fd / ts) + 1
        rng = np.random.default_rng(99)
        acc = np.zeros(n, dtype=complex)
        trials = 400
        for _ in range(trials):
            h = flat_rayleigh(n, fd, rate, rng).gains[0]
            acc += h * np.conj(h[0])
        acc /= trials
        lags = np.arange(n)
        assert np.max(np.abs(acc.real - j0(2 * np.pi * fd * lags * ts))) < 0.05

    def test_rejects_empty_frame(self):
        with pytest.raises(ValueError):
            flat_rayleigh(0, None, 250e3, np.random.default_rng(0))


class TestTapProfile:
    def test_bundled_urban_profile(self):
        profile = urban_12tap_profile()
        assert profile.n_taps == 12
        assert profile.delays_s[0] == 0.0
        assert np.all(np.diff(profile.delays_s) > 0)
        assert_allclose(profile.powers.sum(), 1.0, rtol=1e-9)
        assert_allclose(profile.delays_s[-1], 5.0e-6, rtol=1e-12)
        # longest delay fits easily inside a 16-sample prefix at 250 kHz
        assert profile.sample_delays(250e3).max() <= 16

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "prof.profile"
        path.write_text("# two taps\n0.0 0.0\n4.0 -3.0\n")
        profile = load_tap_profile(path)
        assert profile.n_taps == 2
        assert_allclose(profile.powers[0] / profile.powers[1], 10 ** 0.3, rtol=1e-9)
        assert_array_equal(profile.sample_delays(250e3), [0, 1])

    def test_malformed_file_rejected(self, tmp_path):
        path = tmp_path / "bad.profile"
        path.write_text("0.0 0.0 1.0\n")
        with pytest.raises(ValueError):
            load_tap_profile(path)

    def test_first_delay_must_be_zero(self):
        with pytest.raises(ValueError):
            TapProfile(np.array([1e-6, 2e-6]), np.array([0.5, 0.5]))

    def test_delays_strictly_increasing(self):
        with pytest.raises(ValueError):
            TapProfile(np.array([0.0, 2e-6, 2e-6]), np.array([0.3, 0.3, 0.4]))


class TestTvfs:
    def test_forced_identity(self):
        x = raw_upchirp(7)
        real = ChannelRealization(
            delays=np.zeros(1, dtype=np.int64), gains=np.ones((1, x.size), dtype=complex)
        )
        assert_allclose(apply_channel(x, real), x, atol=1e-15)

    def test_two_tap_spectral_nulls(self):
        # equal-gain taps at lags {0, d} null the response every N/d bins;
        # measure on the second of two chirp periods where the convolution
        # has settled and is effectively circular
        n, d = 128, 8
        x = np.tile(raw_upchirp(7), 2)
        gains = np.full((2, x.size), 1 / np.sqrt(2), dtype=complex)
        real = ChannelRealization(delays=np.array([0, d]), gains=gains)
        y = apply_channel(x, real)[n:]
        response = np.fft.fft(y) / np.fft.fft(raw_upchirp(7))
        expected = (1 + np.exp(-2j * np.pi * np.arange(n) * d / n)) / np.sqrt(2)
        assert_allclose(response, expected, atol=1e-9)
        nulls = np.arange(d) * (n // d) + n // (2 * d)
        assert np.max(np.abs(response[nulls])) < 1e-9
        peaks = np.arange(d) * (n // d)
        assert_allclose(np.abs(response[peaks]), np.sqrt(2), rtol=1e-9)

    def test_static_matches_direct_convolution(self):
        rng = np.random.default_rng(31)
        x = rng.standard_normal(512) + 1j * rng.standard_normal(512)
        profile = TapProfile.from_db([0.0, 4.0, 12.0], [0.0, -3.0, -6.0])
        real = tvfs_realization(x.size, profile, None, 250e3, np.random.default_rng(5))
        # zero doppler: every tap gain is constant in time
        assert np.all(real.gains == real.gains[:, :1])
        y = apply_channel(x, real)
        want = linear_convolve_timevarying(x, real.delays, real.gains)
        assert_allclose(y, want, rtol=1e-9, atol=1e-12)

    def test_timevarying_matches_direct_convolution(self):
        rng = np.random.default_rng(8)
        x = rng.standard_normal(300) + 1j * rng.standard_normal(300)
        profile = TapProfile.from_db([0.0, 8.0], [0.0, -2.0])
        real = tvfs_realization(x.size, profile, 500.0, 250e3, rng)
        assert not np.all(real.gains == real.gains[:, :1])
        assert_allclose(
            apply_channel(x, real),
            linear_convolve_timevarying(x, real.delays, real.gains),
            rtol=1e-9,
            atol=1e-12,
        )

    def test_energy_preserved_on_average(self):
        rng = np.random.default_rng(12)
        x = raw_upchirp(7)
        profile = urban_12tap_profile()
        total = 0.0
        trials = 10_000
        for _ in range(trials):
            y = apply_tvfs(x, profile, None, rng, 250e3)
            total += np.sum(np.abs(y) ** 2)
        # edge truncation loses a sliver of the delayed taps' energy
        assert abs(total / trials / np.sum(np.abs(x) ** 2) - 1.0) < 0.02

    def test_same_seed_reproduces_realization(self):
        profile = urban_12tap_profile()
        a = tvfs_realization(256, profile, 10.0, 250e3, np.random.default_rng(77))
        b = tvfs_realization(256, profile, 10.0, 250e3, np.random.default_rng(77))
        assert_array_equal(a.gains, b.gains)
        assert_array_equal(a.delays, b.delays)

    def test_length_mismatch_rejected(self):
        real = ChannelRealization(delays=np.zeros(1, dtype=np.int64), gains=np.ones((1, 10)))
        with pytest.raises(ValueError):
            apply_channel(np.ones(11, dtype=complex), real)
