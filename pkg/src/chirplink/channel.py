"""Channel models (AWGN, flat Rayleigh, multipath tapped delay line) and
SNR/Eb-N0 bookkeeping.

Noise level conventions, with ``es`` the energy per chirp symbol and
``n = 2**sf`` samples per chirp:

* per-sample SNR: ``snr = es / (n * sigma2)`` (signal power per sample over
  total complex noise variance per sample);
* energy per bit: ``ebn0 = snr * n / bits_per_symbol`` where a chirp carries
  ``sf`` bits (single-stream schemes) or ``2*sf`` bits (I/Q scheme).

Fading is synthesised with a sum-of-sinusoids generator: equally spaced
arrival angles, independent uniform phases per tap, classical Doppler
spectrum of maximum frequency ``v * fc / c``.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, field

import numpy as np

from . import _kernels

SPEED_OF_LIGHT_M_S = 299_792_458.0

# Sinusoids per fading process.  The envelope of a sum of K unit phasors only
# approaches Rayleigh as K grows; 64 keeps the empirical distribution within
# Kolmogorov-Smirnov tolerance at the sample sizes used for validation.
JAKES_SINUSOIDS = 64


@dataclass(frozen=True)
class NoiseSpec:
    """Total complex noise variance per sample (half in each quadrature)."""

    variance: float

    def __post_init__(self) -> None:
        if self.variance < 0:
            raise ValueError("noise variance must be >= 0")


def bits_per_symbol(sf: int, scheme: str) -> int:
    """Bits carried by one chirp: ``2*sf`` for the I/Q scheme, ``sf`` otherwise."""
    return 2 * sf if scheme.startswith("iqcss") else sf


def ebn0_db_to_snr_db(ebn0_db: float, sf: int, scheme: str) -> float:
    """Convert energy-per-bit over noise density to per-sample SNR."""
    n = 1 << sf
    return ebn0_db + 10.0 * np.log10(bits_per_symbol(sf, scheme) / n)


def snr_db_to_ebn0_db(snr_db: float, sf: int, scheme: str) -> float:
    """Inverse of :func:`ebn0_db_to_snr_db`."""
    n = 1 << sf
    return snr_db - 10.0 * np.log10(bits_per_symbol(sf, scheme) / n)


def ebn0_to_sigma2(ebn0_db: float, sf: int, scheme: str, es: float) -> NoiseSpec:
    """Noise variance that realises ``ebn0_db`` for symbols of energy ``es``."""
    if es <= 0:
        raise ValueError("symbol energy must be positive")
    ebn0 = 10.0 ** (ebn0_db / 10.0)
    return NoiseSpec(es / (bits_per_symbol(sf, scheme) * ebn0))


def snr_to_sigma2(snr_db: float, sf: int, es: float) -> NoiseSpec:
    """Noise variance that realises a per-sample SNR for symbols of energy ``es``."""
    if es <= 0:
        raise ValueError("symbol energy must be positive")
    snr = 10.0 ** (snr_db / 10.0)
    return NoiseSpec(es / ((1 << sf) * snr))


def apply_awgn(
    x: np.ndarray, noise: NoiseSpec | float, rng: np.random.Generator
) -> np.ndarray:
    """Add circular complex Gaussian noise of the given total variance."""
    sigma2 = noise.variance if isinstance(noise, NoiseSpec) else float(noise)
    x = np.asarray(x, dtype=np.complex128)
    if sigma2 == 0.0:
        return x.copy()
    w = rng.standard_normal((2, x.size))
    return x + np.sqrt(sigma2 / 2.0) * (w[0] + 1j * w[1]).reshape(x.shape)


@dataclass(frozen=True)
class DopplerSpec:
    """Mobility description; the maximum Doppler shift is ``v * fc / c``."""

    speed_kmh: float
    carrier_hz: float

    @property
    def max_doppler_hz(self) -> float:
        return (self.speed_kmh / 3.6) * self.carrier_hz / SPEED_OF_LIGHT_M_S


def _max_doppler(doppler: DopplerSpec | float | None) -> float:
    if doppler is None:
        return 0.0
    if isinstance(doppler, DopplerSpec):
        return doppler.max_doppler_hz
    return float(doppler)


@dataclass(frozen=True)
class TapProfile:
    """Power-delay profile: physical tap delays (seconds) and linear powers.

    Powers are normalised to unit sum on construction.  Delays are mapped to
    integer sample lags only when a realization is built, so several physical
    taps may share a sample lag at low bandwidth; they then fade independently
    and add.
    """

    delays_s: np.ndarray
    powers: np.ndarray

    def __post_init__(self) -> None:
        delays = np.asarray(self.delays_s, dtype=np.float64)
        powers = np.asarray(self.powers, dtype=np.float64)
        if delays.ndim != 1 or delays.shape != powers.shape or delays.size == 0:
            raise ValueError("delays and powers must be equal-length 1-D arrays")
        if delays[0] != 0.0:
            raise ValueError("first tap delay must be 0")
        if np.any(np.diff(delays) <= 0) and delays.size > 1:
            raise ValueError("tap delays must be strictly increasing")
        if np.any(powers <= 0):
            raise ValueError("tap powers must be positive")
        object.__setattr__(self, "delays_s", delays)
        object.__setattr__(self, "powers", powers / powers.sum())

    @property
    def n_taps(self) -> int:
        return self.delays_s.size

    def sample_delays(self, sample_rate_hz: float) -> np.ndarray:
        """Tap delays rounded to the nearest sample at the given rate."""
        return np.rint(self.delays_s * sample_rate_hz).astype(np.int64)

    @classmethod
    def single_tap(cls) -> "TapProfile":
        return cls(np.zeros(1), np.ones(1))

    @classmethod
    def from_db(cls, delays_us, powers_db) -> "TapProfile":
        delays = np.asarray(delays_us, dtype=np.float64) * 1e-6
        powers = 10.0 ** (np.asarray(powers_db, dtype=np.float64) / 10.0)
        return cls(delays, powers)


def load_tap_profile(path) -> TapProfile:
    """Read a plain-text profile: one ``delay_us power_db`` pair per line."""
    delays, powers = [], []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            parts = stripped.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'delay_us power_db'")
            delays.append(float(parts[0]))
            powers.append(float(parts[1]))
    return TapProfile.from_db(delays, powers)


def urban_12tap_profile() -> TapProfile:
    """The bundled 12-tap typical-urban power-delay profile."""
    ref = importlib.resources.files("chirplink.data").joinpath("tu12.profile")
    with importlib.resources.as_file(ref) as path:
        return load_tap_profile(path)


@dataclass(frozen=True)
class ChannelRealization:
    """Per-sample tap gains of one channel draw.

    ``gains[l, i]`` multiplies ``x[i - delays[l]]`` at output sample ``i``.
    """

    delays: np.ndarray
    gains: np.ndarray
    seed: int | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        delays = np.asarray(self.delays, dtype=np.int64)
        gains = np.asarray(self.gains, dtype=np.complex128)
        if gains.ndim != 2 or gains.shape[0] != delays.size:
            raise ValueError("gains must have shape (n_taps, n_samples)")
        if np.any(delays < 0):
            raise ValueError("tap delays must be >= 0")
        object.__setattr__(self, "delays", delays)
        object.__setattr__(self, "gains", gains)

    @property
    def n_samples(self) -> int:
        return self.gains.shape[1]

    def mean_taps(self, start: int, stop: int) -> np.ndarray:
        """Per-tap average gain over the sample window ``[start, stop)``."""
        return self.gains[:, start:stop].mean(axis=1)

    def impulse_response(self, length: int, start: int = 0, stop: int | None = None) -> np.ndarray:
        """Average impulse response over a window; colliding taps add."""
        stop = self.n_samples if stop is None else stop
        h = np.zeros(length, dtype=np.complex128)
        for d, g in zip(self.delays, self.mean_taps(start, stop)):
            if d >= length:
                raise ValueError(f"tap delay {d} does not fit a length-{length} response")
            h[d] += g
        return h


def _sos_params(n_sinusoids: int, max_doppler_hz: float, rng: np.random.Generator):
    angles = 2.0 * np.pi * (np.arange(n_sinusoids) + 0.5) / n_sinusoids
    omegas = 2.0 * np.pi * max_doppler_hz * np.cos(angles)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=n_sinusoids)
    return omegas, phases


def _fading_trace(
    n_samples: int,
    max_doppler_hz: float,
    sample_rate_hz: float,
    rng: np.random.Generator,
    n_sinusoids: int,
    block_static: bool,
) -> np.ndarray:
    omegas, phases = _sos_params(n_sinusoids, max_doppler_hz, rng)
    if block_static or max_doppler_hz == 0.0:
        h0 = np.exp(1j * phases).sum() / np.sqrt(n_sinusoids)
        return np.full(n_samples, h0, dtype=np.complex128)
    return _kernels.jakes_trace(omegas, phases, 1.0 / sample_rate_hz, n_samples)


def flat_rayleigh(
    frame_len: int,
    doppler: DopplerSpec | float | None,
    sample_rate_hz: float,
    rng: np.random.Generator,
    block_static: bool = False,
    n_sinusoids: int = JAKES_SINUSOIDS,
) -> ChannelRealization:
    """Single-tap Rayleigh channel with unit average power.

    ``block_static=True`` freezes one draw for the whole frame; otherwise the
    gain evolves per sample under the classical Doppler spectrum.
    """
    if frame_len <= 0:
        raise ValueError("frame length must be positive")
    trace = _fading_trace(
        frame_len, _max_doppler(doppler), sample_rate_hz, rng, n_sinusoids, block_static
    )
    return ChannelRealization(delays=np.zeros(1, dtype=np.int64), gains=trace[None, :])


def tvfs_realization(
    frame_len: int,
    profile: TapProfile,
    doppler: DopplerSpec | float | None,
    sample_rate_hz: float,
    rng: np.random.Generator,
    n_sinusoids: int = JAKES_SINUSOIDS,
) -> ChannelRealization:
    """Multipath realization: one independent fading process per physical tap."""
    if frame_len <= 0:
        raise ValueError("frame length must be positive")
    fd = _max_doppler(doppler)
    delays = profile.sample_delays(sample_rate_hz)
    gains = np.empty((profile.n_taps, frame_len), dtype=np.complex128)
    for l in range(profile.n_taps):
        trace = _fading_trace(frame_len, fd, sample_rate_hz, rng, n_sinusoids, False)
        gains[l] = np.sqrt(profile.powers[l]) * trace
    return ChannelRealization(delays=delays, gains=gains)


def apply_channel(x: np.ndarray, realization: ChannelRealization) -> np.ndarray:
    """Tapped-delay-line filtering; output has the same length as the input."""
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1 or x.size != realization.n_samples:
        raise ValueError(
            f"signal length {x.shape} does not match realization ({realization.n_samples},)"
        )
    return _kernels.tdl_apply(x, realization.delays, realization.gains)


def apply_tvfs(
    x: np.ndarray,
    profile: TapProfile,
    doppler: DopplerSpec | float | None,
    rng: np.random.Generator,
    sample_rate_hz: float,
    n_sinusoids: int = JAKES_SINUSOIDS,
) -> np.ndarray:
    """Draw a multipath realization and filter ``x`` through it."""
    realization = tvfs_realization(
        len(x), profile, doppler, sample_rate_hz, rng, n_sinusoids
    )
    return apply_channel(x, realization)
