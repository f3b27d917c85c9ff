"""Quantization of channel estimates into key bits and the key metrics.

Estimate magnitudes are cut into four levels at the empirical quartiles of
each party's own measurement block and encoded with the 2-bit Gray order
00, 01, 11, 10, so neighbouring levels differ in exactly one bit and a
boundary-adjacent measurement costs at most one bit error.  Quartile
thresholds make quantization invariant to a common scale factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: Gray code of each quantization level, as constant bit pairs.
GRAY2_CODES = ((0, 0), (0, 1), (1, 1), (1, 0))

#: Cap on the information-rate estimate when correlation reaches 1.
INFO_RATE_CAP = 10.0


@dataclass(frozen=True)
class BitStream:
    """Ordered key bits plus the number of quantized samples behind them."""

    bits: np.ndarray
    subcarrier_count: int

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.uint8)
        object.__setattr__(self, "bits", bits)
        if bits.size != 2 * self.subcarrier_count:
            raise ValueError("2-bit quantization must yield 2 bits per sample")
        if bits.size and not np.all((bits == 0) | (bits == 1)):
            raise ValueError("bits must be 0 or 1")

    def __len__(self):
        return self.bits.size


@dataclass(frozen=True)
class KeyMetrics:
    """Key-rate and disagreement summary of one measurement block.

    csk_bit_rate : agreeing key bits per subcarrier use (direct reading of
        the rate definition, disagreeing bits discarded)
    csk_information : Gaussian information estimate -log2(1 - rho^2) per
        subcarrier use, a cross-check tied to the correlation analysis
    kdr : fraction of mismatched bits before reconciliation
    """

    csk_bit_rate: float
    csk_information: float
    kdr: float
    samples_used: int
    information_capped: bool = False

    def __post_init__(self):
        if not (0.0 <= self.kdr <= 1.0):
            raise ValueError("kdr must lie in [0, 1]")
        if self.csk_bit_rate < 0 or self.csk_information < 0:
            raise ValueError("key rates must be >= 0")


def compute_thresholds(values) -> np.ndarray:
    """Empirical 25/50/75-percentile cut points of a magnitude block.

    Each party computes thresholds from its own block, which keeps the bit
    mapping invariant under a common positive scaling of the magnitudes.
    Percentiles use linear interpolation, so samples {1,2,3,4} give cut
    points (1.75, 2.5, 3.25).
    """
    values = np.asarray(values, dtype=float).ravel()
    if values.size < 4:
        raise ValueError("need at least 4 samples to place quartile thresholds")
    thresholds = np.percentile(values, [25.0, 50.0, 75.0])
    if not (thresholds[0] < thresholds[1] < thresholds[2]):
        raise ValueError("degenerate sample block: quartile thresholds are not distinct")
    return thresholds


def quantize_gray2(values, thresholds) -> BitStream:
    """Quantize magnitudes into Gray-coded 2-bit words.

    `thresholds` are the three strictly increasing level cut points; values
    map to levels 0..3 and levels to the Gray codes 00, 01, 11, 10.
    """
    values = np.asarray(values, dtype=float).ravel()
    thresholds = np.asarray(thresholds, dtype=float).ravel()
    if thresholds.shape != (3,):
        raise ValueError("exactly 3 thresholds required")
    if not (thresholds[0] < thresholds[1] < thresholds[2]):
        raise ValueError("thresholds must be strictly increasing")
    levels = np.digitize(values, thresholds)
    codes = np.asarray(GRAY2_CODES, dtype=np.uint8)
    bits = codes[levels].ravel()
    return BitStream(bits, values.size)


def _bits(stream) -> np.ndarray:
    return stream.bits if isinstance(stream, BitStream) else np.asarray(stream, dtype=np.uint8)


def kdr(bits_a, bits_b) -> float:
    """Fraction of positions where the two bit streams disagree."""
    a, b = _bits(bits_a), _bits(bits_b)
    if a.size != b.size:
        raise ValueError(f"bit streams differ in length: {a.size} vs {b.size}")
    if a.size == 0:
        raise ValueError("empty bit streams")
    return float(np.count_nonzero(a != b)) / a.size


def csk(rho_hat: float, bits_a, bits_b, subcarriers_used: int) -> KeyMetrics:
    """Key-rate metrics of a measurement block.

    Two rates are reported: the number of agreeing bit positions per
    subcarrier use, and the information estimate ``-log2(1 - rho_hat^2)``.
    A correlation magnitude at or above 1 caps the information estimate at
    ``INFO_RATE_CAP`` and sets the flag.
    """
    if subcarriers_used <= 0:
        raise ValueError("subcarriers_used must be > 0")
    a, b = _bits(bits_a), _bits(bits_b)
    if a.size != b.size:
        raise ValueError("bit streams differ in length")
    agreeing = int(np.count_nonzero(a == b))
    bit_rate = agreeing / subcarriers_used
    rho_mag = abs(rho_hat)
    capped = rho_mag >= 1.0
    if capped:
        information = INFO_RATE_CAP
    else:
        information = min(-math.log2(1.0 - rho_mag ** 2), INFO_RATE_CAP)
        capped = information >= INFO_RATE_CAP
    disagreement = kdr(a, b)
    return KeyMetrics(bit_rate, information, disagreement, subcarriers_used, capped)
