"""Least-squares channel estimation from the sync preamble and equalizers.

Flat channels: one complex gain estimated over the whole 8-chirp preamble,
undone by a single conjugate multiply.  Frequency-selective channels: the
impulse response follows from cross-correlating the averaged sync chirp with
the known up-chirp (the chirp's perfect circular autocorrelation makes the
least-squares normal matrix a scaled identity), undone per DFT bin.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .chirp import SpreadingFactor, as_spreading_factor, _upchirp_readonly


@dataclass(frozen=True)
class FlatEstimate:
    """Single complex channel gain."""

    gain: complex

    def __post_init__(self) -> None:
        if not np.isfinite(self.gain):
            raise ValueError("channel gain must be finite")


@dataclass(frozen=True)
class ImpulseEstimate:
    """Length-N estimated channel impulse response."""

    taps: np.ndarray

    def __post_init__(self) -> None:
        taps = np.asarray(self.taps, dtype=np.complex128)
        if taps.ndim != 1 or taps.size == 0:
            raise ValueError("taps must be a nonempty 1-D array")
        object.__setattr__(self, "taps", taps)

    def truncated(self, keep: int) -> "ImpulseEstimate":
        """Zero all taps at delays >= ``keep`` (delays beyond the prefix are noise)."""
        taps = self.taps.copy()
        taps[keep:] = 0.0
        return ImpulseEstimate(taps)

    def frequency_response(self) -> np.ndarray:
        return np.fft.fft(self.taps)


def ls_flat(preamble_rx: np.ndarray, preamble_ref: np.ndarray) -> FlatEstimate:
    """Least-squares gain: project the received preamble onto the known one."""
    rx = np.asarray(preamble_rx, dtype=np.complex128)
    ref = np.asarray(preamble_ref, dtype=np.complex128)
    if rx.shape != ref.shape or rx.ndim != 1:
        raise ValueError("received and reference preambles must be equal-length vectors")
    energy = np.vdot(ref, ref).real
    if energy == 0.0:
        raise ValueError("reference preamble has zero energy")
    return FlatEstimate(gain=complex(np.vdot(ref, rx) / energy))


def ls_selective(y_bar: np.ndarray, sf: int | SpreadingFactor) -> ImpulseEstimate:
    """Impulse-response estimate from the averaged, prefix-stripped sync chirp.

    Computed as the circular cross-correlation of ``y_bar`` with the raw
    up-chirp scaled by 1/N, equal to the full least-squares solve because the
    chirp's circulant matrix satisfies C^H C = N I.
    """
    sf = as_spreading_factor(sf)
    y = np.asarray(y_bar, dtype=np.complex128)
    if y.shape != (sf.n,):
        raise ValueError(f"expected averaged sync chirp of {sf.n} samples, got {y.shape}")
    chirp_fd = np.fft.fft(_upchirp_readonly(sf.n))
    taps = np.fft.ifft(np.fft.fft(y) * np.conj(chirp_fd)) / sf.n
    return ImpulseEstimate(taps)


def equalize_flat(x: np.ndarray, est: FlatEstimate | complex) -> np.ndarray:
    """Zero-forcing single-tap equalizer: multiply by conj(h)/|h|^2."""
    h = est.gain if isinstance(est, FlatEstimate) else complex(est)
    if h == 0:
        raise ValueError("cannot equalize with a zero channel gain")
    return np.asarray(x) * (np.conj(h) / abs(h) ** 2)


def equalize_fd(
    chirp_rx: np.ndarray, est: ImpulseEstimate, floor: float = 1e-6
) -> np.ndarray:
    """Per-bin zero-forcing equalizer for prefix-stripped chirps.

    ``chirp_rx`` may be one chirp ``(N,)`` or a batch ``(..., N)``.  Bins where
    the channel response magnitude falls below ``floor`` are regularized (the
    division uses max(|H|, floor)^2) and a RuntimeWarning is emitted.
    """
    rx = np.asarray(chirp_rx, dtype=np.complex128)
    n = est.taps.size
    if rx.ndim == 0 or rx.shape[-1] != n:
        raise ValueError(f"expected chirps of {n} samples, got shape {rx.shape}")
    response = est.frequency_response()
    mag2 = np.abs(response) ** 2
    weak = mag2 < floor**2
    if np.any(weak):
        warnings.warn(
            f"channel response below {floor:g} on {int(weak.sum())} bin(s); "
            "zero-forcing regularized there",
            RuntimeWarning,
            stacklevel=2,
        )
        mag2 = np.maximum(mag2, floor**2)
    spectrum = np.fft.fft(rx, axis=-1) * (np.conj(response) / mag2)
    return np.fft.ifft(spectrum, axis=-1)
