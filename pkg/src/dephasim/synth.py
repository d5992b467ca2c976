"""Seeded phase-noise realizations with a prescribed PSD.

White Gaussian noise is shaped by a Type-I linear-phase FIR filter whose
magnitude is the square root of the target PSD. The filter comes from
impulse response truncation (no window), and the convolution is done with
power-of-two FFTs.

White noise comes from ``numpy.random.Generator(PCG64(seed))``, so a
``(spec, duration, sample_rate, order, seed)`` tuple always reproduces the
same samples.
"""

from __future__ import annotations

import functools
import math
import struct
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.fft
import scipy.signal

from . import psd as _psd
from .psd import AmplitudeFunction, PsdSpec

__all__ = [
    "FirFilter",
    "NoiseRealization",
    "WelchEstimate",
    "SynthesisError",
    "design_fir_irt",
    "generate_white_gaussian",
    "fast_convolve",
    "synthesize_phase_noise",
    "resample_integer",
    "welch_psd",
    "verify_psd",
    "dump_realization",
    "load_realization",
    "DEFAULT_ORDER",
]

DEFAULT_ORDER = 1 << 18

# frequency grid density for the IRT integral, in points per filter tap
_GRID_OVERSAMPLE = 16

_MAX_FFT = 1 << 30


class SynthesisError(ValueError):
    """Bad synthesis parameters or numerically unusable filter."""


@dataclass(frozen=True, eq=False)
class FirFilter:
    coefficients: np.ndarray
    sample_rate: float
    symmetry: str = "I"

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    @property
    def group_delay(self) -> int:
        return self.order // 2

    def frequency_response(self, n_fft: int | None = None):
        """Magnitude response on a uniform grid over [0, fs/2]."""
        n_fft = n_fft or 1 << max(int(math.ceil(math.log2(self.order + 1))) + 2, 4)
        H = scipy.fft.rfft(self.coefficients, n=n_fft)
        f = np.arange(len(H)) * self.sample_rate / n_fft
        return f, np.abs(H)


@dataclass(frozen=True, eq=False)
class NoiseRealization:
    samples: np.ndarray
    sample_rate: float
    seed: int | None = None
    provenance: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate

    def at(self, t) -> np.ndarray:
        """Nearest-sample lookup at time(s) ``t``."""
        idx = np.rint(np.asarray(t, dtype=float) * self.sample_rate).astype(int)
        if np.any(idx < 0) or np.any(idx >= len(self.samples)):
            raise SynthesisError("time outside the realization span")
        return self.samples[idx]


@dataclass(frozen=True, eq=False)
class WelchEstimate:
    frequencies: np.ndarray
    psd: np.ndarray
    segment_len: int
    overlap: float = 0.5
    window: str = "hann"

    @property
    def resolution(self) -> float:
        return float(self.frequencies[1] - self.frequencies[0])


def _irt_lengths(order: int) -> tuple[int, int]:
    """Return (L, P): inner FFT length and number of interleaved grids."""
    L = scipy.fft.next_fast_len(order + 1)
    P = -(-2 * _GRID_OVERSAMPLE * (order + 1) // L)
    if (P * L) % 2:
        P += 1
    return L, P


def design_fir_irt(amplitude: AmplitudeFunction, order: int, sample_rate: float | None = None) -> FirFilter:
    """Type-I linear-phase FIR approximating ``amplitude`` by IRT.

    The inverse DTFT of ``A(w) exp(-j w M/2)`` is evaluated with an inverse
    FFT of size 2K over a grid of K >= 16 (M+1) frequencies on [0, pi], then
    truncated to n = 0..M. Only the M+1 centre taps of that transform are
    needed, so it is computed as P interleaved FFTs of length L ~ M+1
    (a pruned-output split of the 2K transform) which keeps memory at O(M).
    """
    if order < 2 or order % 2:
        raise SynthesisError(f"filter order must be even and >= 2, got {order}")
    fs = float(sample_rate if sample_rate is not None else amplitude.sample_rate)

    L, P = _irt_lengths(order)
    two_k = P * L
    half = order // 2
    m = np.arange(-half, half + 1)
    m_mod = m % L
    q = np.arange(L)
    acc = np.zeros(order + 1)
    for r in range(P):
        f = (P * q + r) * (fs / two_k)
        f = np.where(f > fs / 2, fs - f, f)
        a = amplitude(f)
        if not np.all(np.isfinite(a)):
            raise SynthesisError("amplitude function returned non-finite values")
        inner = scipy.fft.ifft(a) * L
        acc += (inner[m_mod] * np.exp(2j * np.pi * r * m / two_k)).real
    h = acc / two_k
    h = 0.5 * (h + h[::-1])
    return FirFilter(h, fs)


def generate_white_gaussian(n_samples: int, seed: int) -> np.ndarray:
    """Unit-variance i.i.d. normals from PCG64 seeded with ``seed``."""
    if n_samples <= 0:
        raise SynthesisError("n_samples must be > 0")
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.standard_normal(n_samples)


def _fft_size(n: int) -> int:
    size = 1 << max(int(n - 1).bit_length(), 0)
    if size > _MAX_FFT:
        raise MemoryError(f"FFT size {size} exceeds the supported maximum {_MAX_FFT}")
    return size


@functools.lru_cache(maxsize=4)
def _spectrum(filt: FirFilter, n_fft: int) -> np.ndarray:
    return scipy.fft.rfft(filt.coefficients, n=n_fft)


def fast_convolve(filt: FirFilter, x: np.ndarray) -> np.ndarray:
    """Full linear convolution (length len(x) + M) via zero-padded FFTs."""
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise SynthesisError("cannot convolve an empty signal")
    n_out = x.size + filt.order
    n_fft = _fft_size(n_out)
    y = scipy.fft.irfft(scipy.fft.rfft(x, n=n_fft) * _spectrum(filt, n_fft), n=n_fft)
    return y[:n_out]


@functools.lru_cache(maxsize=48)
def _cached_filter(spec: PsdSpec, order: int, sample_rate: float, factor: float) -> FirFilter:
    return design_fir_irt(_psd.amplitude_function(spec, sample_rate), order, sample_rate)


def cached_filter(spec: PsdSpec, order: int, sample_rate: float) -> FirFilter:
    """Designed filter, memoised on (spec, order, fs, dBc convention)."""
    return _cached_filter(spec, order, float(sample_rate), _psd.PHASE_PSD_FACTOR)


def n_samples_for(duration: float, sample_rate: float) -> int:
    # guard against 820e-9 * 1e9 = 820.0000000001
    return int(math.ceil(duration * sample_rate - 1e-9))


def synthesize_phase_noise(
    spec: PsdSpec,
    duration: float,
    sample_rate: float,
    order: int = DEFAULT_ORDER,
    seed: int = 0,
) -> NoiseRealization:
    """One stationary phase-noise realization covering ``duration`` seconds.

    ``N + M`` white samples are filtered; the M samples of fill-in at each
    end of the full convolution are dropped, leaving the N-sample steady
    state (equivalently: compensate the M/2 group delay, then trim M/2 per
    side).
    """
    if not duration > 0:
        raise SynthesisError("duration must be > 0")
    if order < 2 or order % 2:
        raise SynthesisError(f"filter order must be even and >= 2, got {order}")
    resolution = sample_rate / order
    feature = _psd.narrowest_feature(spec)
    if resolution > feature / 4:
        warnings.warn(
            f"filter resolution {resolution:.4g} Hz is coarse for a {feature:.4g} Hz spectral "
            f"feature; increase the order (currently {order})",
            stacklevel=2,
        )
    n = n_samples_for(duration, sample_rate)
    filt = cached_filter(spec, order, sample_rate)
    white = generate_white_gaussian(n + order, seed)
    full = fast_convolve(filt, white)
    theta = full[order : order + n].copy()
    return NoiseRealization(
        theta,
        float(sample_rate),
        seed,
        {"spec": spec, "order": order},
    )


def resample_integer(r: NoiseRealization, factor: int, method: str = "linear") -> NoiseRealization:
    """Raise the sample rate by an integer factor.

    ``method="linear"`` interpolates between neighbouring samples and holds
    the last value; ``method="fft"`` is band-limited (spectral zero padding)
    and only meant for cross-checks.
    """
    if factor < 1 or int(factor) != factor:
        raise SynthesisError("resampling factor must be an integer >= 1")
    factor = int(factor)
    if factor == 1:
        return r
    n = len(r.samples)
    if method == "linear":
        pos = np.arange(n * factor) / factor
        out = np.interp(pos, np.arange(n), r.samples)
    elif method == "fft":
        out = scipy.signal.resample(r.samples, n * factor)
    else:
        raise SynthesisError(f"unknown resampling method {method!r}")
    prov = dict(r.provenance, upsample=factor, resample_method=method)
    return NoiseRealization(out, r.sample_rate * factor, r.seed, prov)


def welch_psd(x: np.ndarray, sample_rate: float, segment_len: int) -> WelchEstimate:
    """One-sided Welch estimate, Hann window, 50 % overlap."""
    f, pxx = scipy.signal.welch(
        x,
        fs=sample_rate,
        window="hann",
        nperseg=segment_len,
        noverlap=segment_len // 2,
        detrend=False,
        return_onesided=True,
        scaling="density",
    )
    return WelchEstimate(f, pxx, segment_len)


def _n_segments(n: int, segment_len: int) -> int:
    if n < segment_len:
        return 0
    return 1 + (n - segment_len) // (segment_len // 2)


def verify_psd(
    r: NoiseRealization | Sequence[NoiseRealization],
    spec: PsdSpec,
    segment_len: int,
    band: tuple[float, float],
    min_bins: int = 10,
) -> float:
    """Largest |dB| gap between the Welch estimate and the target in ``band``.

    Several realizations are pooled by averaging their Welch estimates. Both
    the estimate and the target are averaged over blocks of at least
    ``min_bins`` bins before comparing.
    """
    rs = [r] if isinstance(r, NoiseRealization) else list(r)
    if not rs:
        raise SynthesisError("no realizations given")
    fs = rs[0].sample_rate
    for item in rs:
        if item.sample_rate != fs:
            raise SynthesisError("realizations must share a sample rate")
        if _n_segments(len(item.samples), segment_len) < 8:
            raise SynthesisError(
                f"realization of {len(item.samples)} samples gives fewer than 8 Welch segments "
                f"of length {segment_len}"
            )
    est = [welch_psd(item.samples, fs, segment_len) for item in rs]
    f = est[0].frequencies
    pxx = np.mean([e.psd for e in est], axis=0)

    lo, hi = band
    sel = np.flatnonzero((f >= lo) & (f <= hi) & (f > 0))
    if sel.size < min_bins:
        raise SynthesisError(
            f"band {band} holds {sel.size} Welch bins; at least {min_bins} are needed"
        )
    n_blocks = sel.size // min_bins
    target = _psd.psd_array(spec, f)
    worst = 0.0
    for block in np.array_split(sel, n_blocks):
        e = pxx[block].mean()
        t = target[block].mean()
        if t <= 0 and e <= 0:
            continue
        if t <= 0 or e <= 0:
            return math.inf
        worst = max(worst, abs(10 * math.log10(e / t)))
    return worst


_MAGIC = b"PNRZ"
_VERSION = 1
_HEADER = struct.Struct("<4sIdQQ")


def dump_realization(r: NoiseRealization, path) -> None:
    """Write the little-endian debug dump (header + float64 samples)."""
    seed = 0 if r.seed is None else int(r.seed)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, _VERSION, float(r.sample_rate), len(r.samples), seed))
        fh.write(np.asarray(r.samples, dtype="<f8").tobytes())


def load_realization(path) -> NoiseRealization:
    with open(path, "rb") as fh:
        raw = fh.read()
    magic, version, fs, n, seed = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise SynthesisError(f"{path}: not a realization dump")
    if version != _VERSION:
        raise SynthesisError(f"{path}: unsupported dump version {version}")
    samples = np.frombuffer(raw, dtype="<f8", count=n, offset=_HEADER.size).astype(float)
    return NoiseRealization(samples, fs, seed)
