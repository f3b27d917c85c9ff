import math

import numpy as np
import pytest

from lockeysim.keygen import (
    GRAY2_CODES,
    BitStream,
    compute_thresholds,
    csk,
    kdr,
    quantize_gray2,
)


class TestThresholds:
    def test_percentile_oracle(self):
        np.testing.assert_allclose(
            compute_thresholds([1.0, 2.0, 3.0, 4.0]), [1.75, 2.5, 3.25]
        )

    def test_rejects_constant_block(self):
        with pytest.raises(ValueError, match="degenerate"):
            compute_thresholds(np.ones(100))

    def test_rejects_tiny_block(self):
        with pytest.raises(ValueError):
            compute_thresholds([1.0, 2.0, 3.0])


class TestQuantize:
    def test_level_midpoints_map_to_gray_sequence(self):
        thresholds = np.array([1.0, 2.0, 3.0])
        values = np.array([0.5, 1.5, 2.5, 3.5])
        stream = quantize_gray2(values, thresholds)
        np.testing.assert_array_equal(stream.bits, [0, 0, 0, 1, 1, 1, 1, 0])

    def test_gray_adjacency(self):
        for a, b in zip(GRAY2_CODES, GRAY2_CODES[1:]):
            assert sum(x != y for x, y in zip(a, b)) == 1

    def test_identical_inputs_identical_streams(self):
        rng = np.random.default_rng(0)
        values = rng.rayleigh(size=1000)
        thresholds = compute_thresholds(values)
        a = quantize_gray2(values, thresholds)
        b = quantize_gray2(values.copy(), thresholds)
        np.testing.assert_array_equal(a.bits, b.bits)
        assert kdr(a, b) == 0.0

    def test_quartile_balance(self):
        rng = np.random.default_rng(1)
        values = rng.uniform(size=100_000)
        stream = quantize_gray2(values, compute_thresholds(values))
        symbols = stream.bits.reshape(-1, 2)
        codes, counts = np.unique(symbols, axis=0, return_counts=True)
        assert len(codes) == 4
        np.testing.assert_allclose(counts / len(symbols), 0.25, atol=0.01)

    def test_scale_invariance(self):
        rng = np.random.default_rng(2)
        values = rng.rayleigh(size=5000)
        a = quantize_gray2(values, compute_thresholds(values))
        scaled = 37.5 * values
        b = quantize_gray2(scaled, compute_thresholds(scaled))
        np.testing.assert_array_equal(a.bits, b.bits)

    def test_rejects_bad_thresholds(self):
        with pytest.raises(ValueError):
            quantize_gray2(np.ones(4), np.array([1.0, 1.0, 2.0]))

    def test_bitstream_length_invariant(self):
        stream = quantize_gray2(np.array([0.1, 0.9]), np.array([0.25, 0.5, 0.75]))
        assert len(stream) == 4
        assert stream.subcarrier_count == 2


class TestKdr:
    def test_identical(self):
        bits = np.array([0, 1, 1, 0], dtype=np.uint8)
        assert kdr(bits, bits) == 0.0

    def test_complementary(self):
        bits = np.array([0, 1, 1, 0], dtype=np.uint8)
        assert kdr(bits, 1 - bits) == 1.0

    def test_single_flip(self):
        a = np.zeros(128, dtype=np.uint8)
        b = a.copy()
        b[17] = 1
        assert kdr(a, b) == pytest.approx(1.0 / 128.0)

    def test_symmetric(self):
        rng = np.random.default_rng(3)
        a = rng.integers(0, 2, 999).astype(np.uint8)
        b = rng.integers(0, 2, 999).astype(np.uint8)
        assert kdr(a, b) == kdr(b, a)

    def test_rejects_mismatch(self):
        with pytest.raises(ValueError):
            kdr(np.zeros(3, dtype=np.uint8), np.zeros(4, dtype=np.uint8))


class TestCsk:
    def test_independent_streams_baseline(self):
        # chance agreement: each of the 2 bits per subcarrier agrees with
        # probability 1/2, so the bit-rate metric sits near 1 bit/subcarrier
        rng = np.random.default_rng(4)
        n = 50_000
        a = rng.integers(0, 2, 2 * n).astype(np.uint8)
        b = rng.integers(0, 2, 2 * n).astype(np.uint8)
        metrics = csk(0.0, a, b, subcarriers_used=n)
        assert metrics.csk_information == 0.0
        assert metrics.csk_bit_rate == pytest.approx(1.0, abs=0.02)

    def test_information_estimate_at_rho_09(self):
        a = np.zeros(8, dtype=np.uint8)
        metrics = csk(0.9, a, a, subcarriers_used=4)
        assert metrics.csk_information == pytest.approx(-math.log2(0.19), abs=1e-12)
        assert metrics.csk_information == pytest.approx(2.3959, abs=1e-4)

    def test_perfect_agreement_two_bits_per_subcarrier(self):
        a = np.ones(128, dtype=np.uint8)
        metrics = csk(0.5, a, a, subcarriers_used=64)
        assert metrics.csk_bit_rate == pytest.approx(2.0)
        assert metrics.kdr == 0.0

    def test_correlation_at_one_is_capped_and_flagged(self):
        a = np.ones(8, dtype=np.uint8)
        metrics = csk(1.0, a, a, subcarriers_used=4)
        assert metrics.information_capped
        assert metrics.csk_information == 10.0

    def test_monotone_in_correlation(self):
        a = np.ones(8, dtype=np.uint8)
        rates = [csk(r, a, a, 4).csk_information for r in np.linspace(0.0, 0.99, 25)]
        assert all(x <= y for x, y in zip(rates, rates[1:]))

    def test_rejects_zero_subcarriers(self):
        with pytest.raises(ValueError):
            csk(0.1, np.ones(2, dtype=np.uint8), np.ones(2, dtype=np.uint8), 0)


class TestBitStream:
    def test_rejects_odd_length(self):
        with pytest.raises(ValueError):
            BitStream(np.array([0, 1, 1], dtype=np.uint8), 2)

    def test_rejects_non_binary(self):
        with pytest.raises(ValueError):
            BitStream(np.array([0, 2], dtype=np.uint8), 1)
