"""Bit/symbol mapping and chirp modulation with three detectors.

Two signal formats are supported:

* classic chirp-FSK: one data symbol ``k`` cyclically shifts the chirp's
  start frequency, detected from the magnitude (non-coherent) or real part
  (coherent) of the despread spectrum;
* in-phase/quadrature chirp ("iqcss"): two independent symbols per chirp,
  one on the real and one on the imaginary component, detected coherently.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

from .chirp import SpreadingFactor, as_spreading_factor, _upchirp_readonly, despread, dft


class IqPair(NamedTuple):
    """Two independent data symbols carried by one chirp."""

    k_i: int
    k_q: int


@dataclass(frozen=True)
class ModConfig:
    """Modulator settings: spreading factor and energy per chirp symbol."""

    sf: SpreadingFactor
    symbol_energy: float

    def __post_init__(self) -> None:
        if self.symbol_energy <= 0:
            raise ValueError("symbol energy must be positive")


def _check_symbol(k: int, n: int) -> int:
    k = int(k)
    if not 0 <= k < n:
        raise ValueError(f"symbol {k} outside 0..{n - 1}")
    return k


def bits_to_symbol(bits: Sequence[int], sf: int | SpreadingFactor) -> int:
    """Natural binary interpretation of ``sf`` bits, most significant first."""
    sf = as_spreading_factor(sf)
    bits = np.asarray(bits)
    if bits.shape != (sf.sf,):
        raise ValueError(f"expected exactly {sf.sf} bits, got shape {bits.shape}")
    if np.any((bits != 0) & (bits != 1)):
        raise ValueError("bits must be 0 or 1")
    k = 0
    for b in bits:
        k = (k << 1) | int(b)
    return k


def symbol_to_bits(k: int, sf: int | SpreadingFactor) -> np.ndarray:
    """Inverse of :func:`bits_to_symbol`; returns ``sf`` bits, MSB first."""
    sf = as_spreading_factor(sf)
    k = _check_symbol(k, sf.n)
    return np.array([(k >> (sf.sf - 1 - i)) & 1 for i in range(sf.sf)], dtype=np.uint8)


def bits_to_pair(bits: Sequence[int], sf: int | SpreadingFactor) -> IqPair:
    """Split ``2*sf`` bits into the in-phase then quadrature symbol."""
    sf = as_spreading_factor(sf)
    bits = np.asarray(bits)
    if bits.shape != (2 * sf.sf,):
        raise ValueError(f"expected exactly {2 * sf.sf} bits, got shape {bits.shape}")
    return IqPair(bits_to_symbol(bits[: sf.sf], sf), bits_to_symbol(bits[sf.sf:], sf))


def pair_to_bits(pair: IqPair | Sequence[int], sf: int | SpreadingFactor) -> np.ndarray:
    """Concatenate the in-phase symbol's bits followed by the quadrature's."""
    k_i, k_q = pair
    return np.concatenate([symbol_to_bits(k_i, sf), symbol_to_bits(k_q, sf)])


@lru_cache(maxsize=None)
def _unit_tones(n: int) -> np.ndarray:
    roots = np.exp(2j * np.pi * np.arange(n) / n)
    roots.flags.writeable = False
    return roots


def _tone(k: int, n: int) -> np.ndarray:
    # exp(2j*pi*k*n'/N) via exact N-th root-of-unity lookup
    return _unit_tones(n)[(k * np.arange(n)) % n]


def lora_modulate(cfg: ModConfig, k: int) -> np.ndarray:
    """Chirp-FSK waveform: tone at bin ``k`` spread by the up-chirp, energy Es."""
    n = cfg.sf.n
    k = _check_symbol(k, n)
    amp = np.sqrt(cfg.symbol_energy / n)
    return amp * _tone(k, n) * _upchirp_readonly(n)


def lora_modulate_many(cfg: ModConfig, symbols: Sequence[int]) -> np.ndarray:
    """Row-per-symbol batch of :func:`lora_modulate` outputs, shape (len, N)."""
    n = cfg.sf.n
    ks = np.asarray(symbols, dtype=np.int64)
    if ks.size and (ks.min() < 0 or ks.max() >= n):
        raise ValueError("symbol outside alphabet")
    amp = np.sqrt(cfg.symbol_energy / n)
    tones = _unit_tones(n)[(ks[:, None] * np.arange(n)[None, :]) % n]
    return amp * tones * _upchirp_readonly(n)[None, :]


def iqcss_modulate(cfg: ModConfig, pair: IqPair | Sequence[int]) -> np.ndarray:
    """Two tones on the in-phase and quadrature components of one chirp.

    Per-symbol energy equals ``symbol_energy`` for every pair, including the
    degenerate ``k_i == k_q`` case where the envelope is flat at ``sqrt(2)``.
    """
    n = cfg.sf.n
    k_i, k_q = pair
    k_i = _check_symbol(k_i, n)
    k_q = _check_symbol(k_q, n)
    amp = np.sqrt(cfg.symbol_energy / (2 * n))
    mix = _tone(k_i, n) + 1j * _tone(k_q, n)
    return amp * mix * _upchirp_readonly(n)


def iqcss_modulate_many(cfg: ModConfig, pairs: Sequence[IqPair]) -> np.ndarray:
    """Row-per-pair batch of :func:`iqcss_modulate` outputs, shape (len, N)."""
    n = cfg.sf.n
    arr = np.asarray([(p[0], p[1]) for p in pairs], dtype=np.int64).reshape(-1, 2)
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        raise ValueError("symbol outside alphabet")
    amp = np.sqrt(cfg.symbol_energy / (2 * n))
    grid = np.arange(n)[None, :]
    tones_i = _unit_tones(n)[(arr[:, 0:1] * grid) % n]
    tones_q = _unit_tones(n)[(arr[:, 1:2] * grid) % n]
    return amp * (tones_i + 1j * tones_q) * _upchirp_readonly(n)[None, :]


def _despread_spectrum(rx: np.ndarray, sf: SpreadingFactor) -> np.ndarray:
    rx = np.asarray(rx)
    if rx.shape != (sf.n,):
        raise ValueError(f"expected one chirp of {sf.n} samples, got shape {rx.shape}")
    return dft(despread(rx, sf))


def lora_demod_noncoherent(rx: np.ndarray, sf: int | SpreadingFactor) -> int:
    """Pick the despread-spectrum bin of largest magnitude (phase-blind)."""
    sf = as_spreading_factor(sf)
    spectrum = _despread_spectrum(rx, sf)
    return int(np.argmax(np.abs(spectrum)))


def lora_demod_coherent(rx_equalized: np.ndarray, sf: int | SpreadingFactor) -> int:
    """Pick the bin of largest real part; assumes channel phase already removed."""
    sf = as_spreading_factor(sf)
    spectrum = _despread_spectrum(rx_equalized, sf)
    return int(np.argmax(spectrum.real))


def iqcss_demodulate(rx_equalized: np.ndarray, sf: int | SpreadingFactor) -> IqPair:
    """Detect the in-phase symbol from Re and the quadrature symbol from Im."""
    sf = as_spreading_factor(sf)
    spectrum = _despread_spectrum(rx_equalized, sf)
    return IqPair(int(np.argmax(spectrum.real)), int(np.argmax(spectrum.imag)))
