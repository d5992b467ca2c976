import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dephasim import psd, synth
from dephasim.psd import GaussianBand
from dephasim.synth import FirFilter, NoiseRealization, SynthesisError

FS = 1e9


def _allpass(fs=FS):
    return psd.amplitude_function(psd.flat(10 * math.log10(2 / fs)), fs)


def _direct(h, x):
    out = np.zeros(len(x) + len(h) - 1)
    for k, hk in enumerate(h):
        out[k : k + len(x)] += hk * x
    return out


@pytest.mark.parametrize("order", [2, 16, 64, 1000])
def test_allpass_gives_centred_unit_tap(order):
    h = synth.design_fir_irt(_allpass(), order).coefficients
    assert len(h) == order + 1
    assert h[order // 2] == pytest.approx(1.0, abs=1e-12)
    others = np.delete(h, order // 2)
    assert np.max(np.abs(others)) < 1e-12


def test_halfband_lowpass_is_sinc():
    order = 64
    fs = FS

    class HalfBand:
        sample_rate = fs

        def __call__(self, f):
            return np.where(np.abs(f) < fs / 4, 1.0, np.where(np.abs(f) == fs / 4, 0.5, 0.0))

    h = synth.design_fir_irt(HalfBand(), order).coefficients
    n = np.arange(order + 1) - order // 2
    ideal = np.where(n == 0, 0.5, np.sin(np.pi * n / 2) / (np.pi * np.where(n == 0, 1, n)))
    np.testing.assert_allclose(h, ideal, atol=2e-3)
    assert h[order // 2] == pytest.approx(0.5, abs=1e-4)


def test_type_one_symmetry_exact():
    spec = psd.load_table("oscillator_3p4ghz.csv")
    h = synth.design_fir_irt(psd.amplitude_function(spec, FS), 4096).coefficients
    assert np.max(np.abs(h - h[::-1])) < 1e-15 * np.max(np.abs(h))


def test_design_matches_naive_inverse_fft():
    order = 64
    spec = GaussianBand(100e6, 30e6, -90.0)
    a = psd.amplitude_function(spec, FS)
    h = synth.design_fir_irt(a, order).coefficients
    # reference: one explicit size-2K inverse FFT of the conjugate-symmetric grid
    L, P = synth._irt_lengths(order)
    two_k = P * L
    assert two_k >= 2 * 16 * (order + 1)
    k = np.arange(two_k)
    f = np.minimum(k, two_k - k) * FS / two_k
    ref = np.roll(np.fft.ifft(a(f)).real, order // 2)[: order + 1]
    np.testing.assert_allclose(h, ref, atol=1e-15)


@pytest.mark.parametrize("order", [1, 3, 0, 101])
def test_odd_order_rejected(order):
    with pytest.raises(SynthesisError):
        synth.design_fir_irt(_allpass(), order)


def test_non_finite_amplitude_rejected():
    class Bad:
        sample_rate = FS

        def __call__(self, f):
            return np.full_like(np.asarray(f, dtype=float), np.nan)

    with pytest.raises(SynthesisError):
        synth.design_fir_irt(Bad(), 8)


def _peak_gain(order):
    spec = GaussianBand(10e6, 3e3, -85.0)
    a = psd.amplitude_function(spec, FS)
    filt = synth.cached_filter(spec, order, FS)
    n_fft = 1 << 23
    f, H = filt.frequency_response(n_fft)
    k = int(round(10e6 / (FS / n_fft)))
    assert f[k] == pytest.approx(10e6, rel=1e-6)
    return H[k], float(a(10e6)), filt


def test_narrow_gaussian_response_at_centre():
    got, want, filt = _peak_gain(1 << 20)
    assert got == pytest.approx(want, rel=0.01)
    assert filt.group_delay == 1 << 19


def test_narrow_gaussian_truncation_loss_at_short_order():
    """Plain truncation keeps only +-M/2 of the Gaussian impulse envelope."""
    got, want, _ = _peak_gain(1 << 18)
    sigma_amp = math.sqrt(2) * 3e3 / (2 * math.sqrt(2 * math.log(2)))
    sigma_t = FS / (2 * math.pi * sigma_amp)
    kept = math.erf((1 << 17) / (sigma_t * math.sqrt(2)))
    assert got / want == pytest.approx(kept, rel=0.01)


def test_white_noise_deterministic():
    a = synth.generate_white_gaussian(1000, 42)
    b = synth.generate_white_gaussian(1000, 42)
    c = synth.generate_white_gaussian(1000, 43)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_white_noise_variance_and_flatness():
    x = synth.generate_white_gaussian(10**6, 2024)
    assert 0.99 <= x.var() <= 1.01
    r = NoiseRealization(x, FS, 2024)
    dev = synth.verify_psd(r, psd.flat(10 * math.log10(2 / FS)), 4096, (1e6, 4.9e8), min_bins=64)
    assert dev < 0.5


def test_white_noise_needs_positive_length():
    with pytest.raises(SynthesisError):
        synth.generate_white_gaussian(0, 1)


def test_welch_parseval_on_white_input():
    x = synth.generate_white_gaussian(1 << 18, 5)
    w = synth.welch_psd(x, FS, 2048)
    assert np.sum(w.psd) * w.resolution == pytest.approx(x.var(), rel=0.05)
    assert w.window == "hann" and w.overlap == 0.5


def test_convolve_identity_delays_by_half_order():
    order = 32
    filt = synth.design_fir_irt(_allpass(), order)
    x = synth.generate_white_gaussian(500, 1)
    y = synth.fast_convolve(filt, x)
    assert len(y) == len(x) + order
    np.testing.assert_allclose(y[order // 2 : order // 2 + len(x)], x, atol=1e-12)


def test_convolve_impulse_recovers_filter():
    h = np.random.default_rng(3).standard_normal(65)
    filt = FirFilter(h, FS)
    x = np.zeros(10)
    x[0] = 1.0
    np.testing.assert_allclose(synth.fast_convolve(filt, x)[:65], h, atol=1e-14)


def test_convolve_matches_direct():
    rng = np.random.default_rng(11)
    h = rng.standard_normal(65)
    x = rng.standard_normal(1000)
    np.testing.assert_allclose(synth.fast_convolve(FirFilter(h, FS), x), _direct(h, x), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(
    half=st.integers(1, 128),
    n=st.integers(1, 4096),
    seed=st.integers(0, 2**32 - 1),
)
def test_convolve_matches_direct_property(half, n, seed):
    rng = np.random.default_rng(seed)
    h = rng.standard_normal(2 * half + 1)
    x = rng.standard_normal(n)
    np.testing.assert_allclose(synth.fast_convolve(FirFilter(h, FS), x), np.convolve(h, x), atol=1e-12)


def test_fft_size_guard():
    assert synth._fft_size(1025) == 2048
    with pytest.raises(MemoryError):
        synth._fft_size(2**31)


def test_convolve_empty_rejected():
    with pytest.raises(SynthesisError):
        synth.fast_convolve(FirFilter(np.ones(3), FS), np.array([]))


def test_zero_power_spec_gives_zero_realization():
    r = synth.synthesize_phase_noise(GaussianBand(10e6, 3e6, -math.inf), 100e-9, FS, 64, 1)
    assert len(r) == 100
    assert np.all(r.samples == 0.0)


def test_synthesis_length_and_determinism():
    spec = GaussianBand(50e6, 10e6, -100.0)
    a = synth.synthesize_phase_noise(spec, 820e-9, FS, 256, 9)
    b = synth.synthesize_phase_noise(spec, 820e-9, FS, 256, 9)
    assert len(a) == 820
    assert a.samples.tobytes() == b.samples.tobytes()
    assert a.provenance["order"] == 256


def test_synthesis_is_steady_state_window():
    """The exposed samples are the fully-overlapped part of the convolution."""
    spec = GaussianBand(50e6, 10e6, -100.0)
    order, n = 128, 300
    r = synth.synthesize_phase_noise(spec, n / FS, FS, order, 4)
    h = synth.cached_filter(spec, order, FS).coefficients
    w = synth.generate_white_gaussian(n + order, 4)
    valid = np.convolve(w, h, mode="valid")
    np.testing.assert_allclose(r.samples, valid, atol=1e-15)


def test_synthesis_rejects_bad_duration():
    with pytest.raises(SynthesisError):
        synth.synthesize_phase_noise(psd.flat(-100), 0.0, FS, 64, 0)


def test_coarse_order_warns():
    with pytest.warns(UserWarning, match="coarse"):
        synth.synthesize_phase_noise(GaussianBand(10e6, 3e3, -85.0), 100e-9, FS, 1 << 10, 0)


def test_narrowband_variance_matches_integral():
    spec = GaussianBand(10e6, 3e3, -85.0)
    expected = psd.total_power(spec, FS)
    assert expected == pytest.approx(10 ** -8.5 * 3e3 / 0.9394, rel=1e-3)
    v = np.array(
        [np.mean(synth.synthesize_phase_noise(spec, 820e-9, FS, 1 << 20, s).samples ** 2) for s in range(20)]
    )
    se = v.std(ddof=1) / math.sqrt(len(v))
    assert abs(v.mean() - expected) < 3 * se


def test_realization_mean_bound():
    spec = GaussianBand(50e6, 10e6, -90.0)
    r = synth.synthesize_phase_noise(spec, 65536 / FS, FS, 256, 3)
    x = r.samples
    assert abs(x.mean()) < 5 * x.std() / math.sqrt(len(x))


def test_resample_identity_constant_ramp():
    r = NoiseRealization(np.arange(10.0) * 0.3, FS, 1)
    assert synth.resample_integer(r, 1) is r
    c = synth.resample_integer(NoiseRealization(np.full(5, 0.7), FS), 12)
    assert len(c) == 60 and np.all(c.samples == 0.7)
    assert c.sample_rate == 12 * FS
    up = synth.resample_integer(r, 12)
    m = np.arange(12 * 9 + 1)
    np.testing.assert_allclose(up.samples[: len(m)], m / 12 * 0.3, atol=1e-15)
    assert np.all(up.samples[-12:] == r.samples[-1])


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=2, max_size=50), st.integers(1, 16))
def test_resample_stays_in_range(values, factor):
    x = np.array(values)
    up = synth.resample_integer(NoiseRealization(x, FS), factor)
    assert up.samples.min() >= x.min() - 1e-12
    assert up.samples.max() <= x.max() + 1e-12


def test_resample_fft_mode_and_errors():
    t = np.arange(256) / FS
    x = np.sin(2 * np.pi * 10e6 * t)
    up = synth.resample_integer(NoiseRealization(x, FS), 4, method="fft")
    t4 = np.arange(1024) / (4 * FS)
    np.testing.assert_allclose(up.samples[100:900], np.sin(2 * np.pi * 10e6 * t4)[100:900], atol=0.05)
    with pytest.raises(SynthesisError):
        synth.resample_integer(NoiseRealization(x, FS), 0)
    with pytest.raises(SynthesisError):
        synth.resample_integer(NoiseRealization(x, FS), 2, method="cubic")


def test_verify_psd_offset_passthrough():
    spec = GaussianBand(50e6, 10e6, -100.0)
    r = synth.synthesize_phase_noise(spec, (1 << 16) / FS, FS, 1 << 12, 1)
    base = synth.verify_psd(r, spec, 4096, (40e6, 60e6))
    shifted = synth.verify_psd(r, psd.scale_spec(spec, 10.0), 4096, (40e6, 60e6))
    assert shifted == pytest.approx(10.0, abs=base + 0.5)


def test_verify_psd_needs_eight_segments():
    r = NoiseRealization(np.zeros(4096 * 4), FS)
    with pytest.raises(SynthesisError, match="8 Welch segments"):
        synth.verify_psd(r, psd.flat(-100), 4096, (1e6, 4e8))


def test_dump_round_trip(tmp_path):
    r = synth.synthesize_phase_noise(psd.flat(-100), 1e-6, FS, 64, 77)
    p = tmp_path / "r.pnrz"
    synth.dump_realization(r, p)
    raw = p.read_bytes()
    assert raw[:4] == b"PNRZ"
    assert len(raw) == 4 + 4 + 8 + 8 + 8 + 8 * len(r)
    back = synth.load_realization(p)
    assert back.seed == 77 and back.sample_rate == FS
    assert back.samples.tobytes() == r.samples.tobytes()
    p.write_bytes(b"XXXX" + raw[4:])
    with pytest.raises(SynthesisError):
        synth.load_realization(p)


def test_realization_lookup():
    r = NoiseRealization(np.arange(10.0), FS)
    assert r.at(3.2e-9) == 3.0
    with pytest.raises(SynthesisError):
        r.at(20e-9)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert r.duration == pytest.approx(10e-9)
