"""Tapped-delay-line fading and fixed hardware filters.

Draws a multipath channel realization, checks that the per-tap power of an
ensemble matches the configured profile, shows the Doppler evolution of a
tap gain, and evaluates the frequency response of the bundled hardware
filters across the OFDM band.
"""

import numpy as np

from lockeysim.fading import (
    ALICE_BOB_PROFILE,
    ALICE_HF_PROFILE,
    ALICE_RIS_PROFILE,
    BOB_HF_PROFILE,
    HardwareFingerprint,
    fingerprint_response,
    frequency_response,
    make_fading_process,
)
from lockeysim.ofdm import OfdmConfig

config = OfdmConfig()
freqs = config.subcarrier_freqs

print("== per-tap power of an ensemble of channel draws ==")
n = 20_000
powers = np.zeros(ALICE_RIS_PROFILE.n_taps)
for i in range(n):
    powers += np.abs(make_fading_process(ALICE_RIS_PROFILE, 5.0, (1, i)).gains(0.0)) ** 2
powers_db = 10 * np.log10(powers / n)
for delay, want, got in zip(ALICE_RIS_PROFILE.delays_ms, ALICE_RIS_PROFILE.powers_db, powers_db):
    print(f"  tap at {delay * 1e3:6.3f} us: configured {want:6.2f} dB, measured {got:6.2f} dB")

print("\n== Doppler evolution of the first tap gain (5 Hz) ==")
process = make_fading_process(ALICE_RIS_PROFILE, 5.0, (2,))
for t in (0.0, 0.05, 0.1, 0.2):
    g = process.gains(t)[0]
    print(f"  t = {t:5.2f} s: gain {g.real:+.3f}{g.imag:+.3f}j  |g| = {abs(g):.3f}")

print("\n== hardware filter responses across the band (time-invariant) ==")
for name, profile in (("alice", ALICE_HF_PROFILE), ("bob", BOB_HF_PROFILE)):
    response = fingerprint_response(HardwareFingerprint(profile), freqs)
    print(f"  {name}: |F| range [{np.min(np.abs(response)):.3f}, {np.max(np.abs(response)):.3f}], "
          f"phase drift across band {np.angle(response[-1]) - np.angle(response[0]):+.3f} rad")

print("\n== frequency selectivity of the direct channel ==")
h = frequency_response(make_fading_process(ALICE_BOB_PROFILE, 5.0, (3,)), 0.0, freqs)
print(f"  |H| varies over [{np.min(np.abs(h)):.3f}, {np.max(np.abs(h)):.3f}] across 64 subcarriers")
