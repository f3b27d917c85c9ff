"""One full probing round under each key-sourcing scheme.

A round spans two coherence slots.  In the first slot the parties probe
each other once on band 1 (the classical TDD exchange); in the second slot
each retransmits what it received, through band 2, so both observe a
product of the two directions' responses.  Because the product carries the
same pair of direction filters on both sides, fixed hardware asymmetry
cancels exactly.  The surface aggregate does not cancel when an attacker
desynchronizes the two directions, which is what the prediction-scalar
compensation of the third scheme targets.

Within a slot the air channel is reciprocal: one fading realization per
link is shared by both directions.  Between slots the realizations evolve
under the configured Doppler.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from ._rng import Stream, substream
from .fading import (
    FadingProcess,
    HardwareFingerprint,
    fingerprint_response,
    frequency_response,
    make_fading_process,
)
from .ofdm import CsiVector, OfdmConfig, generate_pilot, ls_estimate, probe
from .ris import JammerConfig, apply_jamming, cascaded_gain, random_ris_state


class Scheme(enum.Enum):
    """Key-sourcing scheme of a probing round."""

    NON_LOOPBACK = "non_loopback"
    LOOPBACK = "loopback"
    LOCKEY = "lockey"

    @classmethod
    def parse(cls, name: str) -> "Scheme":
        for scheme in cls:
            if scheme.value == name:
                return scheme
        valid = ", ".join(s.value for s in cls)
        raise ValueError(f"unknown scheme {name!r}; expected one of: {valid}")


#: Sentinel for the prediction scalar fitted from the round's own
#: subcarriers instead of a pre-trained per-subcarrier value.
GAMMA_PER_ROUND = "per_round"

Gamma = Union[complex, np.ndarray, str]


@dataclass(frozen=True, eq=False)
class BandChannels:
    """Fading realizations of the three links on one frequency band."""

    alice_bob: FadingProcess
    alice_ris: FadingProcess
    ris_bob: FadingProcess


@dataclass(frozen=True, eq=False)
class Environment:
    """Everything one probing round needs, spanning both coherence slots."""

    ofdm: OfdmConfig
    band1: BandChannels
    band2: BandChannels
    fp_ab: HardwareFingerprint
    fp_ba: HardwareFingerprint
    n_units: int
    jammer: JammerConfig
    snr_db: Optional[float]
    tau_s: float
    pilot: np.ndarray
    noise_ref: Optional[float] = 1.0

    def __post_init__(self):
        if self.n_units < 1:
            raise ValueError("n_units must be >= 1")
        if self.jammer.attacked_count > self.n_units:
            raise ValueError("jammer attacks more units than the surface has")
        if self.tau_s <= 0:
            raise ValueError("tau_s must be > 0")

    @property
    def fp_ab_response(self) -> np.ndarray:
        return fingerprint_response(self.fp_ab, self.ofdm.subcarrier_freqs)

    @property
    def fp_ba_response(self) -> np.ndarray:
        return fingerprint_response(self.fp_ba, self.ofdm.subcarrier_freqs)


@dataclass(frozen=True, eq=False)
class RoundResult:
    """Paired key-source estimates produced by one round of one scheme."""

    scheme: Scheme
    key_source_alice: CsiVector
    key_source_bob: CsiVector
    gamma_used: Optional[np.ndarray]
    slot_t: int
    slot_tau: Optional[int]


def build_environment(
    ofdm: OfdmConfig,
    profiles: dict,
    n_units: int,
    jammer: JammerConfig,
    max_doppler_hz: float,
    snr_db: Optional[float],
    tau_s: float,
    stream: Stream,
    noise_ref: Optional[float] = 1.0,
) -> Environment:
    """Draw a fresh environment realization.

    `profiles` maps the keys ``alice_bob``, ``alice_ris``, ``ris_bob``,
    ``alice_hf`` and ``bob_hf`` to tap profiles.  The two bands get
    independent fading realizations of the same profiles; the band carrier
    frequencies only label which realization a probe uses.
    """
    def process(key: str, idx: int) -> FadingProcess:
        return make_fading_process(profiles[key], max_doppler_hz, substream(stream, idx))

    band1 = BandChannels(process("alice_bob", 0), process("alice_ris", 1), process("ris_bob", 2))
    band2 = BandChannels(process("alice_bob", 3), process("alice_ris", 4), process("ris_bob", 5))
    pilot = generate_pilot(ofdm, substream(stream, 6))
    return Environment(
        ofdm=ofdm,
        band1=band1,
        band2=band2,
        fp_ab=HardwareFingerprint(profiles["alice_hf"], "a->b"),
        fp_ba=HardwareFingerprint(profiles["bob_hf"], "b->a"),
        n_units=n_units,
        jammer=jammer,
        snr_db=snr_db,
        tau_s=tau_s,
        pilot=pilot,
        noise_ref=noise_ref,
    )


def _band_responses(env: Environment, band: BandChannels, time_s: float):
    freqs = env.ofdm.subcarrier_freqs
    direct = frequency_response(band.alice_bob, time_s, freqs)
    h_ar = frequency_response(band.alice_ris, time_s, freqs)
    h_rb = frequency_response(band.ris_bob, time_s, freqs)
    return direct, h_ar, h_rb


def _slot_states(env: Environment, stream: Stream):
    """Surface configuration of a slot's first probe, and the (possibly
    jammed) configuration its second probe sees."""
    first = random_ris_state(env.n_units, substream(stream, 0))
    second = apply_jamming(first, env.jammer, substream(stream, 1))
    return first, second


def measure_round(env: Environment, slot: int, stream: Stream, swap_roles: bool = False):
    """First-slot probe exchange on band 1.

    Returns ``(H_A1, H_B1)``: the estimate measured by each party.  The two
    probes share one fading realization per link (reciprocity within the
    coherence slot) while the surface configuration of the second probe is
    the jammed version of the first.

    With ``swap_roles`` the probe order is reversed (the second party
    transmits first), which together with swapped fingerprints realizes the
    label-swap symmetry of the protocol exactly.
    """
    time_s = slot * env.tau_s
    direct, h_ar, h_rb = _band_responses(env, env.band1, time_s)
    state_first, state_second = _slot_states(env, stream)

    def estimate(fp_resp, state, noise_idx):
        cascaded = cascaded_gain(h_ar, h_rb, state)
        received = probe(
            env.pilot, direct, cascaded, fp_resp, env.snr_db,
            substream(stream, noise_idx), ref_power=env.noise_ref,
        )
        return ls_estimate(received, env.pilot, env.ofdm)

    if not swap_roles:
        h_b1 = estimate(env.fp_ab_response, state_first, 2)   # first probe: A -> B
        h_a1 = estimate(env.fp_ba_response, state_second, 3)  # second probe: B -> A
    else:
        h_a1 = estimate(env.fp_ba_response, state_first, 2)   # first probe: B -> A
        h_b1 = estimate(env.fp_ab_response, state_second, 3)  # second probe: A -> B
    return h_a1, h_b1


def loopback_combine(first_round, env: Environment, slot: int, stream: Stream, swap_roles: bool = False):
    """Second-slot retransmission of the first-slot estimates on band 2.

    Each party modulates the pilot with the estimate it obtained in the
    first slot and sends it through the band-2 channel, so the peer's
    least-squares estimate is the product of both directions' responses:
    the direction-filter pair appears on both sides and cancels from their
    ratio.  Returns ``(H_A, H_B)``, the mutual estimates at each party.
    """
    h_a1, h_b1 = first_round
    time_s = slot * env.tau_s
    direct, h_ar, h_rb = _band_responses(env, env.band2, time_s)
    state_first, state_second = _slot_states(env, stream)

    def relay(carried, fp_resp, state, noise_idx):
        cascaded = cascaded_gain(h_ar, h_rb, state)
        received = probe(
            env.pilot * carried, direct, cascaded, fp_resp, env.snr_db,
            substream(stream, noise_idx), ref_power=env.noise_ref,
        )
        return ls_estimate(received, env.pilot, env.ofdm)

    if not swap_roles:
        h_a = relay(h_b1, env.fp_ba_response, state_first, 2)   # B loops back first
        h_b = relay(h_a1, env.fp_ab_response, state_second, 3)  # then A loops back
    else:
        h_b = relay(h_a1, env.fp_ab_response, state_first, 2)   # A loops back first
        h_a = relay(h_b1, env.fp_ba_response, state_second, 3)  # then B loops back
    return h_a, h_b


def estimate_gamma(history_a, history_b, min_rounds: int = 200) -> np.ndarray:
    """Per-subcarrier prediction scalar fitted over a history window.

    For each subcarrier k the estimate is
    ``sum_r H_B[r, k] * conj(H_A[r, k]) / sum_r |H_A[r, k]|^2``,
    the sample form of the error-power minimizer, with the sums running
    over the window's rounds.
    """
    h_a = np.atleast_2d(np.asarray(history_a, dtype=complex))
    h_b = np.atleast_2d(np.asarray(history_b, dtype=complex))
    if h_a.shape != h_b.shape:
        raise ValueError("history sides differ in shape")
    if h_a.shape[0] < min_rounds:
        raise ValueError(
            f"history of {h_a.shape[0]} rounds is shorter than the minimum {min_rounds}"
        )
    denom = np.sum(np.abs(h_a) ** 2, axis=0)
    if np.any(denom == 0):
        raise ValueError("degenerate history: a subcarrier has all-zero reference values")
    return np.sum(h_b * np.conj(h_a), axis=0) / denom


def estimate_round_gamma(h_a, h_b, positions=None) -> complex:
    """Single prediction scalar fitted across one round's subcarriers.

    The surface aggregate is common to all subcarriers, so the mismatch an
    attacker injects into one round is mostly a common complex factor; a
    scalar least-squares fit across the round's pilot subcarriers absorbs
    it without any training history.
    """
    h_a = np.asarray(h_a, dtype=complex).ravel()
    h_b = np.asarray(h_b, dtype=complex).ravel()
    if h_a.shape != h_b.shape:
        raise ValueError("round sides differ in shape")
    if positions is not None:
        h_a = h_a[positions]
        h_b = h_b[positions]
    denom = float(np.sum(np.abs(h_a) ** 2))
    if denom == 0.0:
        raise ValueError("degenerate round: all-zero reference values")
    return complex(np.sum(h_b * np.conj(h_a)) / denom)


def apply_compensation(h_a, gamma) -> np.ndarray:
    """Predicted peer estimate: elementwise ``gamma * h_a``."""
    h_a = np.asarray(h_a, dtype=complex)
    gamma = np.asarray(gamma, dtype=complex)
    if gamma.ndim > 0 and gamma.shape != h_a.shape:
        raise ValueError(f"gamma shape {gamma.shape} does not match estimate shape {h_a.shape}")
    return gamma * h_a


def run_round(
    scheme: Scheme,
    env: Environment,
    gamma: Optional[Gamma],
    stream: Stream,
    swap_roles: bool = False,
) -> RoundResult:
    """Execute one probing round and return the paired key sources.

    `gamma` is required exactly when the scheme is the compensated one; it
    is either a per-subcarrier array (pre-trained), a scalar, or
    ``GAMMA_PER_ROUND`` to fit the scalar from the round's own pilot
    subcarriers.  Deterministic: identical environment, scheme and stream
    produce bit-identical results.
    """
    if isinstance(scheme, str):
        scheme = Scheme.parse(scheme)
    if scheme is Scheme.LOCKEY and gamma is None:
        raise ValueError("the compensated scheme requires a gamma (array, scalar, or GAMMA_PER_ROUND)")

    first = measure_round(env, 0, substream(stream, 0), swap_roles=swap_roles)
    if scheme is Scheme.NON_LOOPBACK:
        h_a1, h_b1 = first
        return RoundResult(scheme, h_a1, h_b1, None, 0, None)

    h_a, h_b = loopback_combine(first, env, 1, substream(stream, 1), swap_roles=swap_roles)
    if scheme is Scheme.LOOPBACK:
        return RoundResult(scheme, h_a, h_b, None, 0, 1)

    if isinstance(gamma, str):
        if gamma != GAMMA_PER_ROUND:
            raise ValueError(f"unknown gamma policy {gamma!r}")
        gamma_value = estimate_round_gamma(h_a, h_b, env.ofdm.pilot_positions)
    else:
        gamma_value = gamma
    predicted = apply_compensation(h_a, gamma_value)
    gamma_used = np.broadcast_to(np.asarray(gamma_value, dtype=complex), h_a.shape).copy()
    return RoundResult(scheme, predicted, h_b, gamma_used, 0, 1)


def swapped_environment(env: Environment) -> Environment:
    """The environment with the two parties' direction filters exchanged."""
    return replace(env, fp_ab=env.fp_ba, fp_ba=env.fp_ab)
