"""Rectangular pulse trains and their phase-modulated drive signals."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .synth import NoiseRealization, n_samples_for

__all__ = [
    "Pulse",
    "PulseSequence",
    "DriveSignal",
    "PulseError",
    "build_sequence",
    "modulate",
    "envelope",
    "decompose_small_angle",
    "pulse_edges",
]


class PulseError(ValueError):
    pass


@dataclass(frozen=True)
class Pulse:
    start: float
    duration: float
    amplitude: float
    carrier_freq: float
    static_phase: float = 0.0

    @property
    def end(self) -> float:
        return self.start + self.duration


@dataclass(frozen=True)
class PulseSequence:
    pulses: tuple
    detuning: float = 0.0

    def __post_init__(self):
        pulses = tuple(self.pulses)
        if not pulses:
            raise PulseError("a sequence needs at least one pulse")
        for p in pulses:
            if not p.duration > 0:
                raise PulseError("pulse duration must be > 0")
            if p.amplitude < 0:
                raise PulseError("pulse amplitude must be >= 0")
        for a, b in zip(pulses, pulses[1:]):
            if a.end > b.start * (1 + 1e-12):
                raise PulseError("pulses must be time-ordered and non-overlapping")
        object.__setattr__(self, "pulses", pulses)

    @property
    def span(self) -> float:
        return self.pulses[-1].end

    @property
    def carrier_freq(self) -> float:
        return self.pulses[0].carrier_freq

    def __len__(self):
        return len(self.pulses)

    def with_amplitude(self, amplitude: float) -> "PulseSequence":
        return replace(self, pulses=tuple(replace(p, amplitude=amplitude) for p in self.pulses))

    def with_detuning(self, detuning: float) -> "PulseSequence":
        return replace(self, detuning=detuning)


@dataclass(frozen=True, eq=False)
class DriveSignal:
    """Sampled drive; ``representation`` is ``"lab"`` (real) or ``"envelope"``.

    For the envelope, ``carrier_freq`` is the frame the envelope is
    referred to (the nominal carrier, detuning excluded).
    """

    representation: str
    samples: np.ndarray
    sample_rate: float
    carrier_freq: float

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.samples)) / self.sample_rate

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


def build_sequence(n_pulses: int, duration: float, gap: float, carrier_freq: float, amplitude: float) -> PulseSequence:
    """``n_pulses`` identical pulses with ``gap`` seconds of silence between them."""
    if n_pulses < 1:
        raise PulseError("n_pulses must be >= 1")
    if not duration > 0 or gap < 0:
        raise PulseError("duration must be > 0 and gap >= 0")
    period = duration + gap
    return PulseSequence(
        tuple(Pulse(k * period, duration, amplitude, carrier_freq) for k in range(n_pulses))
    )


def pulse_edges(seq: PulseSequence, sample_rate: float) -> np.ndarray:
    """(n_pulses, 2) sample indices [first, stop) of each pulse, snapped."""
    edges = np.array([[p.start, p.end] for p in seq.pulses]) * sample_rate
    return np.rint(edges).astype(int)


def envelope(seq: PulseSequence, sample_rate: float) -> tuple[np.ndarray, np.ndarray]:
    """Rectangular envelope f(t_j) and static phase per sample."""
    n = n_samples_for(seq.span, sample_rate)
    f = np.zeros(n)
    phase = np.zeros(n)
    for p, (a, b) in zip(seq.pulses, pulse_edges(seq, sample_rate)):
        f[a:b] = p.amplitude
        phase[a:b] = p.static_phase
    return f, phase


def _noise_phase(noise: NoiseRealization | None, n: int, sample_rate: float) -> np.ndarray:
    if noise is None:
        return np.zeros(n)
    if not math.isclose(noise.sample_rate, sample_rate, rel_tol=1e-12):
        raise PulseError(
            f"noise sample rate {noise.sample_rate:g} Hz does not match the drive rate {sample_rate:g} Hz"
        )
    if len(noise.samples) < n:
        raise PulseError("noise realization is shorter than the pulse sequence")
    return np.asarray(noise.samples[:n], dtype=float)


def modulate(
    seq: PulseSequence,
    noise: NoiseRealization | None,
    sample_rate: float,
    representation: str = "envelope",
) -> DriveSignal:
    """Apply the carrier (lab) or its complex envelope with noisy phase.

    lab:       s[j] = f_j cos(2 pi (nu + detuning) t_j + phi_j + phase_j)
    envelope:  e[j] = f_j exp(i (2 pi detuning t_j + phi_j + phase_j))

    The carrier is phase-continuous across pulses.
    """
    f, static = envelope(seq, sample_rate)
    n = len(f)
    phi = _noise_phase(noise, n, sample_rate)
    t = np.arange(n) / sample_rate
    nu = seq.carrier_freq
    if representation == "lab":
        if sample_rate < 2 * (nu + seq.detuning):
            raise PulseError(
                f"lab representation aliases: fs={sample_rate:g} Hz < 2 x {nu + seq.detuning:g} Hz"
            )
        samples = f * np.cos(2 * np.pi * (nu + seq.detuning) * t + phi + static)
    elif representation == "envelope":
        samples = f * np.exp(1j * (2 * np.pi * seq.detuning * t + phi + static))
    else:
        raise PulseError(f"unknown representation {representation!r}")
    return DriveSignal(representation, samples, float(sample_rate), nu)


def decompose_small_angle(noise: NoiseRealization | np.ndarray, seq: PulseSequence, sample_rate: float) -> dict:
    """Second-order expansion of the phase-modulated carrier.

    Returns the residual amplitude modulation term
    ``f cos(w0 t) (1 - phi^2/2)`` as ``"am"`` and the double-sideband term
    ``f sin(w0 t) phi`` as ``"dsb"``; the modulated carrier is approximately
    ``am - dsb``.
    """
    f, static = envelope(seq, sample_rate)
    n = len(f)
    if isinstance(noise, NoiseRealization):
        phi = _noise_phase(noise, n, sample_rate)
    else:
        phi = np.asarray(noise, dtype=float)
        if len(phi) < n:
            raise PulseError("phase sequence is shorter than the pulse sequence")
        phi = phi[:n]
    t = np.arange(n) / sample_rate
    wt = 2 * np.pi * (seq.carrier_freq + seq.detuning) * t + static
    return {
        "am": f * np.cos(wt) * (1 - phi**2 / 2),
        "dsb": f * np.sin(wt) * phi,
        "exact": f * np.cos(wt + phi),
    }
