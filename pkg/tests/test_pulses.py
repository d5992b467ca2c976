import math

import numpy as np
import pytest

from dephasim.pulses import (
    Pulse,
    PulseError,
    PulseSequence,
    build_sequence,
    decompose_small_angle,
    envelope,
    modulate,
    pulse_edges,
)
from dephasim.synth import NoiseRealization

FS = 12e9
NU = 6e9


def test_fig1_sequence_shape():
    seq = build_sequence(12, 50e-9, 20e-9, NU, 0.1)
    assert len(seq) == 12
    assert seq.span == pytest.approx(820e-9)
    assert [p.start for p in seq.pulses][:3] == pytest.approx([0, 70e-9, 140e-9])
    assert all(p.static_phase == 0 and p.carrier_freq == NU for p in seq.pulses)


def test_long_sequence_span():
    assert build_sequence(10, 150e-9, 60e-9, NU, 0.1).span == pytest.approx(2040e-9)


def test_single_pulse():
    seq = build_sequence(1, 30e-9, 0.0, NU, 1.0)
    assert seq.pulses[0].start == 0 and seq.span == pytest.approx(30e-9)


@pytest.mark.parametrize(
    "pulses",
    [
        (),
        (Pulse(0, 0.0, 1, NU),),
        (Pulse(0, 1e-9, -1, NU),),
        (Pulse(0, 10e-9, 1, NU), Pulse(5e-9, 10e-9, 1, NU)),
        (Pulse(20e-9, 10e-9, 1, NU), Pulse(0, 10e-9, 1, NU)),
    ],
)
def test_invalid_sequences(pulses):
    with pytest.raises(PulseError):
        PulseSequence(pulses)


def test_build_sequence_errors():
    with pytest.raises(PulseError):
        build_sequence(0, 1e-9, 0, NU, 1)
    with pytest.raises(PulseError):
        build_sequence(2, 1e-9, -1e-9, NU, 1)


def test_envelope_support_and_length():
    seq = build_sequence(12, 50e-9, 20e-9, NU, 0.1)
    d = modulate(seq, None, FS, "envelope")
    assert len(d.samples) == math.ceil(seq.span * FS - 1e-9) == 9840
    edges = pulse_edges(seq, FS)
    assert edges[0].tolist() == [0, 600] and edges[1].tolist() == [840, 1440]
    inside = np.zeros(len(d.samples), bool)
    for a, b in edges:
        inside[a:b] = True
    assert np.all(d.samples[~inside] == 0)
    assert np.all(d.samples[inside] == 0.1)
    assert np.isrealobj(d.samples) or np.all(d.samples.imag == 0)


def test_constant_phase_rotates_envelope():
    seq = build_sequence(3, 10e-9, 5e-9, NU, 0.5)
    n = math.ceil(seq.span * FS)
    phi0 = 0.3
    d = modulate(seq, NoiseRealization(np.full(n, phi0), FS), FS, "envelope")
    f, _ = envelope(seq, FS)
    np.testing.assert_allclose(d.samples, f * np.exp(1j * phi0), atol=1e-15)
    assert np.max(np.abs(d.samples)) <= 0.5 + 1e-15


def test_detuning_ramps_envelope_phase():
    seq = build_sequence(1, 20e-9, 0, NU, 1.0).with_detuning(25e6)
    d = modulate(seq, None, FS, "envelope")
    t = np.arange(len(d.samples)) / FS
    np.testing.assert_allclose(d.samples, np.exp(2j * np.pi * 25e6 * t), atol=1e-12)


def test_lab_and_envelope_consistent():
    rng = np.random.default_rng(1)
    seq = build_sequence(4, 10e-9, 5e-9, NU, 0.7).with_detuning(3e6)
    fs = 48e9
    n = math.ceil(seq.span * fs)
    noise = NoiseRealization(0.05 * rng.standard_normal(n + 5), fs)
    lab = modulate(seq, noise, fs, "lab")
    env = modulate(seq, noise, fs, "envelope")
    t = np.arange(n) / fs
    np.testing.assert_allclose(lab.samples, (env.samples * np.exp(2j * np.pi * NU * t)).real, atol=1e-12)


def test_lab_aliasing_rejected():
    seq = build_sequence(1, 10e-9, 0, NU, 1.0)
    with pytest.raises(PulseError, match="alias"):
        modulate(seq, None, 10e9, "lab")


def test_noise_rate_and_length_checked():
    seq = build_sequence(2, 10e-9, 5e-9, NU, 1.0)
    n = math.ceil(seq.span * FS)
    with pytest.raises(PulseError, match="sample rate"):
        modulate(seq, NoiseRealization(np.zeros(n), 1e9), FS)
    with pytest.raises(PulseError, match="shorter"):
        modulate(seq, NoiseRealization(np.zeros(n - 1), FS), FS)
    with pytest.raises(PulseError):
        modulate(seq, None, FS, "baseband")


def test_small_angle_expansion_bound():
    rng = np.random.default_rng(4)
    seq = build_sequence(3, 10e-9, 5e-9, NU, 1.0)
    fs = 48e9
    n = math.ceil(seq.span * fs)
    phi = rng.uniform(-1, 1, n)
    phi *= 0.01 / np.max(np.abs(phi))
    noise = NoiseRealization(phi, fs)
    lab = modulate(seq, noise, fs, "lab").samples
    parts = decompose_small_angle(noise, seq, fs)
    resid = np.max(np.abs(lab - (parts["am"] - parts["dsb"])))
    assert resid <= 0.01**3 / 6
    assert resid < 1.7e-7
    np.testing.assert_allclose(parts["exact"], lab, atol=1e-15)


def test_decomposition_zero_phase():
    seq = build_sequence(2, 10e-9, 5e-9, NU, 1.0)
    fs = 48e9
    parts = decompose_small_angle(np.zeros(2000), seq, fs)
    f, _ = envelope(seq, fs)
    t = np.arange(len(f)) / fs
    np.testing.assert_allclose(parts["am"], f * np.cos(2 * np.pi * NU * t), atol=1e-15)
    assert np.all(parts["dsb"] == 0)


def test_decomposition_large_angle_breaks_down():
    seq = build_sequence(1, 10e-9, 0, NU, 1.0)
    fs = 48e9
    parts = decompose_small_angle(np.full(480, np.pi / 2), seq, fs)
    assert np.max(np.abs(parts["exact"] - (parts["am"] - parts["dsb"]))) > 0.1


def test_in_phase_component_is_cos_phi():
    for phi0 in (0.0, 0.2, 1.0, 2.5):
        seq = build_sequence(1, 10e-9, 0, NU, 0.8)
        n = math.ceil(seq.span * FS)
        d = modulate(seq, NoiseRealization(np.full(n, phi0), FS), FS)
        assert np.max(np.abs(d.samples.real)) == pytest.approx(0.8 * abs(math.cos(phi0)), abs=1e-15)
