"""Discrete-time linear chirp waveforms and their spectra.

The baseband unit here is one chirp symbol of ``n = 2**sf`` complex samples
taken at the chirp bandwidth (critical sampling).  All functions operate on
plain ``numpy`` arrays of ``complex128``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

VALID_SF = range(6, 13)


@dataclass(frozen=True)
class SpreadingFactor:
    """Bits carried per chirp symbol; the symbol spans ``n = 2**sf`` samples."""

    sf: int

    def __post_init__(self) -> None:
        if self.sf not in VALID_SF:
            raise ValueError(f"spreading factor must be in 6..12, got {self.sf!r}")

    @property
    def n(self) -> int:
        return 1 << self.sf


def as_spreading_factor(sf: int | SpreadingFactor) -> SpreadingFactor:
    """Coerce a plain integer to a validated :class:`SpreadingFactor`."""
    if isinstance(sf, SpreadingFactor):
        return sf
    return SpreadingFactor(int(sf))


@dataclass(frozen=True)
class ChirpParams:
    """Continuous-time description of a linear chirp, critically sampled.

    The instantaneous frequency is ``rate_hz_per_s * t + offset_hz`` over the
    symmetric support ``t in [-duration_s/2, +duration_s/2]``.
    """

    rate_hz_per_s: float
    offset_hz: float
    bandwidth_hz: float
    duration_s: float
    sample_interval_s: float

    def __post_init__(self) -> None:
        if self.bandwidth_hz <= 0 or self.duration_s <= 0:
            raise ValueError("bandwidth and duration must be positive")
        if not np.isclose(self.sample_interval_s * self.bandwidth_hz, 1.0, rtol=1e-12):
            raise ValueError("critical sampling required: sample interval must be 1/bandwidth")
        n = self.duration_s / self.sample_interval_s
        if not np.isclose(n, round(n), rtol=1e-9):
            raise ValueError("duration must be an integer number of samples")

    @classmethod
    def raw(cls, sf: int | SpreadingFactor, bandwidth_hz: float) -> "ChirpParams":
        """Full-band sweep (rate = bandwidth/duration) with no frequency offset."""
        sf = as_spreading_factor(sf)
        ts = 1.0 / bandwidth_hz
        duration = sf.n * ts
        return cls(
            rate_hz_per_s=bandwidth_hz / duration,
            offset_hz=0.0,
            bandwidth_hz=bandwidth_hz,
            duration_s=duration,
            sample_interval_s=ts,
        )


@lru_cache(maxsize=None)
def _upchirp_readonly(n: int) -> np.ndarray:
    idx = np.arange(n, dtype=np.float64)
    c = np.exp(1j * np.pi * idx * idx / n)
    c.flags.writeable = False
    return c


def raw_upchirp(sf: int | SpreadingFactor) -> np.ndarray:
    """Base up-chirp ``exp(j*pi*n**2/N)`` for ``n = 0..N-1``; unit magnitude."""
    return _upchirp_readonly(as_spreading_factor(sf).n).copy()


def raw_downchirp(sf: int | SpreadingFactor) -> np.ndarray:
    """Conjugate of the base up-chirp."""
    return np.conj(_upchirp_readonly(as_spreading_factor(sf).n))


def despread(rx: np.ndarray, sf: int | SpreadingFactor) -> np.ndarray:
    """Multiply by the down-chirp, turning each chirp symbol into a pure tone.

    ``rx`` may be one chirp of shape ``(N,)`` or a batch ``(..., N)``.
    """
    sf = as_spreading_factor(sf)
    rx = np.asarray(rx)
    if rx.ndim == 0 or rx.shape[-1] != sf.n:
        raise ValueError(f"expected {sf.n} samples per chirp, got shape {rx.shape}")
    return rx * np.conj(_upchirp_readonly(sf.n))


def dft(x: np.ndarray) -> np.ndarray:
    """Unnormalized forward DFT along the last axis (a pure tone at bin k peaks at N)."""
    x = np.asarray(x)
    if x.size == 0:
        raise ValueError("cannot transform an empty signal")
    return np.fft.fft(x, axis=-1)


def spreading_gain_db(sf: int | SpreadingFactor) -> float:
    """Processing gain 10*log10(N/sf): spread bandwidth over information rate."""
    sf = as_spreading_factor(sf)
    return 10.0 * np.log10(sf.n / sf.sf)


def instantaneous_frequency(params: ChirpParams, t: float) -> float:
    """Frequency of the chirp at time ``t`` within ``[-duration/2, +duration/2]``."""
    half = params.duration_s / 2.0
    if not (-half <= t <= half):
        raise ValueError(f"t={t} outside the chirp support [-{half}, {half}]")
    return params.rate_hz_per_s * t + params.offset_hz
