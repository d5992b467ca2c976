"""Target phase-noise power spectral densities.

Levels are given in dBc/Hz and mapped to a one-sided phase PSD in rad^2/Hz
through ``PHASE_PSD_FACTOR * 10**(L/10)``. The factor defaults to 1, i.e. a
quoted dBc/Hz value is read directly as S_theta(f). Set it to 2 to treat the
levels as single-sideband L(f) instead.

Three shapes are supported:

* :class:`GaussianBand` -- Gaussian line of given FWHM around a center offset
* :class:`LogLogTable` -- breakpoints interpolated linearly in (log10 f, dB)
* :class:`PiecewisePlateau` -- flat segments joined by log-log ramps
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence, Union

import numpy as np

__all__ = [
    "PHASE_PSD_FACTOR",
    "GaussianBand",
    "LogLogTable",
    "PiecewisePlateau",
    "PsdSpec",
    "AmplitudeFunction",
    "PsdError",
    "psd_at",
    "psd_array",
    "amplitude_function",
    "scale_spec",
    "scale_segments",
    "flat",
    "total_power",
    "narrowest_feature",
    "load_table",
    "save_table",
    "data_file",
]

PHASE_PSD_FACTOR = 1.0

# FWHM = 2 sqrt(2 ln 2) sigma
_FWHM_TO_SIGMA = 1.0 / (2.0 * math.sqrt(2.0 * math.log(2.0)))

DATA_DIR = Path(__file__).parent / "data"


class PsdError(ValueError):
    """Invalid PSD definition or evaluation request."""


def _check_increasing(offsets: Sequence[float], what: str) -> None:
    arr = np.asarray(offsets, dtype=float)
    if arr.size and (not np.all(np.isfinite(arr)) or np.any(arr <= 0)):
        raise PsdError(f"{what}: offsets must be finite and > 0")
    if np.any(np.diff(arr) <= 0):
        raise PsdError(f"{what}: offsets must be strictly increasing")


@dataclass(frozen=True)
class GaussianBand:
    """Gaussian PSD line; ``level`` is the peak in dBc/Hz (may be -inf)."""

    center_offset: float
    fwhm_bandwidth: float
    level: float

    def __post_init__(self):
        if not self.fwhm_bandwidth > 0:
            raise PsdError("GaussianBand: fwhm_bandwidth must be > 0")
        if not math.isfinite(self.center_offset) or self.center_offset < 0:
            raise PsdError("GaussianBand: center_offset must be finite and >= 0")
        if math.isnan(self.level) or self.level == math.inf:
            raise PsdError("GaussianBand: level must be finite or -inf")


@dataclass(frozen=True)
class LogLogTable:
    """Breakpoint table ``((offset_hz, level_dbc_hz), ...)``.

    Flat extrapolation beyond both ends.
    """

    points: tuple

    def __post_init__(self):
        pts = tuple((float(f), float(level)) for f, level in self.points)
        if len(pts) < 2:
            raise PsdError("LogLogTable: at least two points are required")
        _check_increasing([p[0] for p in pts], "LogLogTable")
        if not all(math.isfinite(p[1]) for p in pts):
            raise PsdError("LogLogTable: levels must be finite")
        object.__setattr__(self, "points", pts)

    @property
    def offsets(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def levels(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])


@dataclass(frozen=True)
class PiecewisePlateau:
    """Flat segments ``((start_hz, end_hz, level_dbc_hz), ...)``.

    Consecutive plateaus are joined by straight lines in (log10 f, dB);
    the first and last levels extend flat towards 0 Hz and Nyquist.
    """

    segments: tuple

    def __post_init__(self):
        segs = tuple((float(a), float(b), float(level)) for a, b, level in self.segments)
        if not segs:
            raise PsdError("PiecewisePlateau: at least one segment is required")
        edges = [x for a, b, _ in segs for x in (a, b)]
        _check_increasing(edges, "PiecewisePlateau")
        if not all(math.isfinite(s[2]) for s in segs):
            raise PsdError("PiecewisePlateau: levels must be finite")
        object.__setattr__(self, "segments", segs)

    def as_table(self) -> LogLogTable:
        return LogLogTable(tuple((x, level) for a, b, level in self.segments for x in (a, b)))


PsdSpec = Union[GaussianBand, LogLogTable, PiecewisePlateau]


def _db_to_power(level_db):
    return PHASE_PSD_FACTOR * np.power(10.0, np.asarray(level_db, dtype=float) / 10.0)


def _level_db(spec: PsdSpec, f: np.ndarray) -> np.ndarray:
    if isinstance(spec, PiecewisePlateau):
        spec = spec.as_table()
    if isinstance(spec, LogLogTable):
        logf = np.log10(np.clip(f, spec.offsets[0], spec.offsets[-1]))
        return np.interp(logf, np.log10(spec.offsets), spec.levels)
    raise TypeError(f"not a tabulated spec: {type(spec).__name__}")


def psd_array(spec: PsdSpec, offsets) -> np.ndarray:
    """Vectorised one-sided PSD (rad^2/Hz) for offsets >= 0.

    At 0 Hz the value is the limit from above.
    """
    f = np.abs(np.asarray(offsets, dtype=float))
    if isinstance(spec, GaussianBand):
        if spec.level == -math.inf:
            return np.zeros_like(f)
        sigma = spec.fwhm_bandwidth * _FWHM_TO_SIGMA
        return _db_to_power(spec.level) * np.exp(-0.5 * ((f - spec.center_offset) / sigma) ** 2)
    if isinstance(spec, (LogLogTable, PiecewisePlateau)):
        return _db_to_power(_level_db(spec, f))
    raise TypeError(f"unknown PSD spec type: {type(spec).__name__}")


def psd_at(spec: PsdSpec, offset: float) -> float:
    """One-sided phase PSD in rad^2/Hz at a positive frequency offset."""
    if not offset > 0:
        raise PsdError(f"offset must be > 0, got {offset!r}")
    return float(psd_array(spec, offset))


class AmplitudeFunction:
    """Filter amplitude ``A(f) = sqrt(S(f) * fs / 2)``, even in f.

    Unit-variance white noise shaped by a filter with this magnitude has the
    one-sided PSD ``S(f)`` at sample rate ``fs``.
    """

    def __init__(self, spec: PsdSpec, sample_rate: float):
        if not sample_rate > 0:
            raise PsdError("sample rate must be > 0")
        self.spec = spec
        self.sample_rate = float(sample_rate)

    def __call__(self, f):
        return np.sqrt(psd_array(self.spec, f) * self.sample_rate / 2.0)

    def __repr__(self):
        return f"AmplitudeFunction({self.spec!r}, sample_rate={self.sample_rate:g})"


def amplitude_function(spec: PsdSpec, sample_rate: float) -> AmplitudeFunction:
    return AmplitudeFunction(spec, sample_rate)


def scale_spec(spec: PsdSpec, delta_db: float) -> PsdSpec:
    """Shift every level by ``delta_db``; the shape is unchanged."""
    if isinstance(spec, GaussianBand):
        return replace(spec, level=spec.level + delta_db)
    if isinstance(spec, LogLogTable):
        return LogLogTable(tuple((f, level + delta_db) for f, level in spec.points))
    if isinstance(spec, PiecewisePlateau):
        return scale_segments(spec, [delta_db] * len(spec.segments))
    raise TypeError(f"unknown PSD spec type: {type(spec).__name__}")


def scale_segments(spec: PiecewisePlateau, deltas_db: Sequence[float]) -> PiecewisePlateau:
    """Per-plateau variant of :func:`scale_spec`."""
    if len(deltas_db) != len(spec.segments):
        raise PsdError("one delta per segment is required")
    return PiecewisePlateau(
        tuple((a, b, level + d) for (a, b, level), d in zip(spec.segments, deltas_db))
    )


def flat(level: float) -> LogLogTable:
    """White phase noise at ``level`` dBc/Hz over the whole band."""
    return LogLogTable(((1.0, level), (2.0, level)))


def total_power(spec: PsdSpec, sample_rate: float, n: int = 1 << 20) -> float:
    """Integral of the one-sided PSD over (0, fs/2] in rad^2."""
    if isinstance(spec, GaussianBand):
        if spec.level == -math.inf:
            return 0.0
        sigma = spec.fwhm_bandwidth * _FWHM_TO_SIGMA
        nyq = sample_rate / 2
        half = math.erf((nyq - spec.center_offset) / (sigma * math.sqrt(2))) + math.erf(
            spec.center_offset / (sigma * math.sqrt(2))
        )
        return float(_db_to_power(spec.level)) * sigma * math.sqrt(math.pi / 2) * half
    f = np.linspace(0.0, sample_rate / 2, n + 1)
    return float(np.trapezoid(psd_array(spec, f), f))


def narrowest_feature(spec: PsdSpec) -> float:
    """Smallest spectral width (Hz) the FIR design has to resolve.

    For a Gaussian line this is the FWHM of the amplitude response
    ``sqrt(S)``, which is sqrt(2) wider than the PSD itself; for tables it
    is the smallest spacing between breakpoints whose levels differ
    (infinite for a flat table).
    """
    if isinstance(spec, GaussianBand):
        return math.sqrt(2.0) * spec.fwhm_bandwidth
    if isinstance(spec, PiecewisePlateau):
        spec = spec.as_table()
    changes = np.diff(spec.levels) != 0
    if not changes.any():
        return math.inf
    return float(np.min(np.diff(spec.offsets)[changes]))


def data_file(name: str) -> Path:
    """Path of a PSD table shipped with the package."""
    path = DATA_DIR / name
    if not path.exists():
        raise FileNotFoundError(path)
    return path


def load_table(path) -> LogLogTable:
    """Read ``offset_hz,level_dbc_hz`` lines; ``#`` starts a comment."""
    path = Path(path)
    if not path.exists() and not path.is_absolute() and (DATA_DIR / path).exists():
        path = DATA_DIR / path
    points = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                f, level = (float(v) for v in line.split(","))
            except ValueError:
                raise PsdError(f"{path}:{lineno}: expected 'offset_hz,level_dbc_hz'") from None
            points.append((f, level))
    return LogLogTable(tuple(points))


def save_table(spec: LogLogTable, path, comment: str = "") -> None:
    with open(path, "w") as fh:
        for line in comment.splitlines():
            fh.write(f"# {line}\n")
        for f, level in spec.points:
            fh.write(f"{f!r},{level!r}\n")
