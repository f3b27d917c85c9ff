"""OFDM pilot generation, probing, and least-squares channel estimation.

Everything happens in the frequency domain.  The cyclic prefix (16 samples
at the 960 kHz occupied bandwidth, i.e. 16.7 us) exceeds the bundled delay
spreads, so each subcarrier sees a purely multiplicative channel and no
time-domain convolution is simulated; the prefix length is kept in the
config for fidelity only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._rng import Stream, as_rng
from .fading import add_awgn

#: A per-subcarrier complex channel estimate is represented as a plain
#: complex ndarray of length ``OfdmConfig.symbol_length``.
CsiVector = np.ndarray

_QPSK = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / np.sqrt(2.0)


@dataclass(frozen=True)
class OfdmConfig:
    """Waveform parameters of the probing signal."""

    symbol_length: int = 64
    subcarrier_spacing_hz: float = 15e3
    bandwidth_hz: float = 20e6
    carrier_band1_hz: float = 1.82e9
    carrier_band2_hz: float = 1.84e9
    modulation: str = "qpsk"
    cp_length: int = 16
    pilot_interval: int = 5

    def __post_init__(self):
        if self.symbol_length < 1:
            raise ValueError("symbol_length must be >= 1")
        if self.cp_length >= self.symbol_length:
            raise ValueError("cp_length must be smaller than symbol_length")
        if self.pilot_interval < 1:
            raise ValueError("pilot_interval must be >= 1")
        if self.modulation.lower() != "qpsk":
            raise ValueError(f"unsupported modulation {self.modulation!r}")

    @property
    def subcarrier_freqs(self) -> np.ndarray:
        """Baseband subcarrier offsets in Hz.

        The carrier frequencies only select which fading realization a band
        uses; they do not enter the per-subcarrier math.
        """
        return np.arange(self.symbol_length) * self.subcarrier_spacing_hz

    @property
    def pilot_positions(self) -> np.ndarray:
        """Subcarrier indices that carry a directly usable estimate."""
        return np.arange(0, self.symbol_length, self.pilot_interval)


def generate_pilot(config: OfdmConfig, stream: Stream) -> np.ndarray:
    """Unit-magnitude QPSK pilot symbols, one per subcarrier.

    Both parties know the pilot, so the same stream id must be used for
    every probe of a round.
    """
    rng = as_rng(stream)
    idx = rng.integers(0, 4, size=config.symbol_length)
    return _QPSK[idx]


def probe(
    pilot,
    direct,
    cascaded,
    fingerprint,
    snr_db: Optional[float],
    stream: Stream,
    ref_power: Optional[float] = 1.0,
) -> np.ndarray:
    """Received symbols after one probe through a composite channel.

    Per subcarrier k the output is
    ``fingerprint[k] * (direct[k] + cascaded[k]) * pilot[k] + noise[k]``.

    Noise follows the unit-reference convention by default (`ref_power`
    1.0): its variance is ``10**(-snr_db/10)`` independent of the channel
    realization, matching a model that pins the noise variance and lets the
    channel carry the gain.  Pass ``ref_power=None`` to reference the SNR to
    the mean received power instead.
    """
    pilot = np.asarray(pilot, dtype=complex)
    direct = np.asarray(direct, dtype=complex)
    cascaded = np.asarray(cascaded, dtype=complex)
    fingerprint = np.asarray(fingerprint, dtype=complex)
    if not (pilot.shape == direct.shape == cascaded.shape == fingerprint.shape):
        raise ValueError("pilot, direct, cascaded and fingerprint must share one length")
    clean = fingerprint * (direct + cascaded) * pilot
    return add_awgn(clean, snr_db, stream, ref_power=ref_power)


def ls_estimate(received, pilot, config: OfdmConfig) -> CsiVector:
    """Least-squares channel estimate from one received probe.

    At pilot subcarriers the estimate is ``received / pilot``.  The
    remaining subcarriers are filled by linear interpolation between the
    nearest pilot estimates (edge subcarriers extend the nearest pilot).
    Only pilot positions carry independent information; key extraction uses
    those, interpolated values exist for error-curve plotting.
    """
    received = np.asarray(received, dtype=complex)
    pilot = np.asarray(pilot, dtype=complex)
    if received.shape != pilot.shape or received.shape != (config.symbol_length,):
        raise ValueError("received and pilot must have length symbol_length")
    if np.any(pilot == 0):
        raise ValueError("pilot symbols must be non-zero")
    positions = config.pilot_positions
    at_pilots = received[positions] / pilot[positions]
    if positions.size == config.symbol_length:
        return at_pilots
    every = np.arange(config.symbol_length)
    real = np.interp(every, positions, at_pilots.real)
    imag = np.interp(every, positions, at_pilots.imag)
    return real + 1j * imag


def pilot_values(csi: CsiVector, config: OfdmConfig) -> np.ndarray:
    """Extract the pilot-subcarrier entries of an estimate."""
    return np.asarray(csi)[config.pilot_positions]
