"""Two-level Schrodinger integration under a sampled drive.

Units are hbar = 1 with angular frequencies in rad/s. Conventions:

* lab frame:      H = (w_q / 2) sz + g s(t) sx
* rotating frame: H = (2 pi (nu_q - nu) / 2) sz + (g / 2) (Re e sx + Im e sy)

where ``nu`` is the frame (carrier) frequency and ``e`` the complex
envelope. Moving from the lab to a frame at ``nu`` is
``psi_rot = exp(+i pi nu t sz) psi_lab`` (see :func:`to_frame`); with these
signs an envelope phase ``phi`` tilts the rotation axis to azimuth ``+phi``.

Integration is fixed-step RK4. Drive samples are held constant over their
sample period by default (linear interpolation between samples is
available through :class:`SolverConfig`).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numba
import numpy as np

from .pulses import DriveSignal, build_sequence, modulate

__all__ = [
    "QubitState",
    "HamiltonianParams",
    "SolverConfig",
    "Trajectory",
    "DynamicsError",
    "DivergenceError",
    "CalibrationError",
    "evolve",
    "calibrate_pi_amplitude",
    "rabi_oracle",
    "to_frame",
    "default_sample_rate",
]

NORM_TOL = 1e-9
# RK4 phase step per lab-frame step, w_q dt / 2; keeps per-step norm drift ~1e-13
_LAB_MAX_PHASE_STEP = 0.0125


class DynamicsError(ValueError):
    pass


class DivergenceError(RuntimeError):
    pass


class CalibrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class QubitState:
    c0: complex
    c1: complex

    def __post_init__(self):
        object.__setattr__(self, "c0", complex(self.c0))
        object.__setattr__(self, "c1", complex(self.c1))
        norm = abs(self.c0) ** 2 + abs(self.c1) ** 2
        if not abs(norm - 1.0) <= NORM_TOL:
            raise DynamicsError(f"state is not normalized (|psi|^2 = {norm!r})")

    @classmethod
    def from_vector(cls, v, normalize: bool = False) -> "QubitState":
        v = np.asarray(v, dtype=complex)
        if normalize:
            v = v / np.linalg.norm(v)
        return cls(v[0], v[1])

    @classmethod
    def from_bloch(cls, polar: float, azimuth: float) -> "QubitState":
        return cls(math.cos(polar / 2), np.exp(1j * azimuth) * math.sin(polar / 2))

    @classmethod
    def zero(cls) -> "QubitState":
        return cls(1, 0)

    @classmethod
    def one(cls) -> "QubitState":
        return cls(0, 1)

    @classmethod
    def plus_y(cls) -> "QubitState":
        return cls.from_bloch(math.pi / 2, math.pi / 2)

    @classmethod
    def minus_y(cls) -> "QubitState":
        return cls.from_bloch(math.pi / 2, -math.pi / 2)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.c0, self.c1])

    @property
    def populations(self) -> tuple[float, float]:
        return abs(self.c0) ** 2, abs(self.c1) ** 2


@dataclass(frozen=True)
class HamiltonianParams:
    qubit_freq: float = 6e9
    coupling: float = 2 * math.pi * 100e6  # rad/s per unit envelope amplitude

    def __post_init__(self):
        if not self.qubit_freq > 0:
            raise DynamicsError("qubit frequency must be > 0")
        if not math.isfinite(self.coupling):
            raise DynamicsError("coupling must be finite")


@dataclass(frozen=True)
class SolverConfig:
    """Solver settings.

    ``dt=None`` picks half the drive period (rotating) or the largest
    divisor of it resolving the qubit precession (lab). ``interpolation``
    is ``"hold"`` (each sample constant over its period, so a pulse of N
    samples has area exactly N / fs) or ``"linear"``.
    """

    frame: str = "rotating"
    dt: float | None = None
    renormalize_every: int = 1000
    record_stride: int | None = None
    interpolation: str = "hold"

    def __post_init__(self):
        if self.frame not in ("rotating", "lab"):
            raise DynamicsError(f"unknown frame {self.frame!r}")
        if self.interpolation not in ("hold", "linear"):
            raise DynamicsError(f"unknown interpolation {self.interpolation!r}")
        if self.dt is not None and not self.dt > 0:
            raise DynamicsError("dt must be > 0")


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (n, 2) complex
    frame: str
    max_drift: float = 0.0

    def __len__(self):
        return len(self.times)

    def state(self, i: int) -> QubitState:
        c0, c1 = self.states[i]
        n = math.sqrt(abs(c0) ** 2 + abs(c1) ** 2)
        return QubitState(c0 / n, c1 / n)

    @property
    def final(self) -> QubitState:
        return self.state(-1)

    def index_at(self, t: float) -> int:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > 0.5 * (self.times[1] - self.times[0]) + 1e-18:
            raise DynamicsError(f"time {t!r} is outside the trajectory")
        return i

    @property
    def excited_population(self) -> np.ndarray:
        return np.abs(self.states[:, 1]) ** 2

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("t_s,re_c0,im_c0,re_c1,im_c1\n")
            for t, (c0, c1) in zip(self.times.tolist(), self.states.tolist()):
                fh.write(f"{t!r},{c0.real!r},{c0.imag!r},{c1.real!r},{c1.imag!r}\n")


@numba.njit(cache=True)
def _drive_at(drive, u):
    j = int(u)
    last = drive.shape[0] - 1
    if j >= last:
        return drive[last]
    w = u - j
    return drive[j] * (1.0 - w) + drive[j + 1] * w


@numba.njit(cache=True)
def _rk4_kernel(a, b, drive, ratio, dt, n_steps, hz, gh, renorm_every, stride, hold):
    """Integrate i dpsi/dt = H psi; returns (records, max_drift, status).

    ``drive`` holds the coupling envelope ``e`` at sample points (with a
    trailing sample past the end); the off-diagonal element is (g/2) e.
    ``ratio`` = dt * fs converts step index to fractional sample index.
    With ``hold`` each sample is constant over its own period.
    status: 0 ok, 1 drift above tolerance, 2 non-finite state.
    """
    n_rec = n_steps // stride + 1
    if n_steps % stride:
        n_rec += 1
    out = np.empty((n_rec, 2), dtype=np.complex128)
    out[0, 0] = a
    out[0, 1] = b
    rec = 1
    max_drift = 0.0
    half = 0.5 * dt
    mi = -1j
    for s in range(n_steps):
        u = s * ratio
        if hold:
            e1 = drive[int(u + 0.5 * ratio)]
            e2 = e1
            e3 = e1
        else:
            e1 = _drive_at(drive, u)
            e2 = _drive_at(drive, u + 0.5 * ratio)
            e3 = _drive_at(drive, u + ratio)

        c = gh * e1
        ka0 = mi * (hz * a + c.conjugate() * b)
        kb0 = mi * (c * a - hz * b)
        c = gh * e2
        ta = a + half * ka0
        tb = b + half * kb0
        ka1 = mi * (hz * ta + c.conjugate() * tb)
        kb1 = mi * (c * ta - hz * tb)
        ta = a + half * ka1
        tb = b + half * kb1
        ka2 = mi * (hz * ta + c.conjugate() * tb)
        kb2 = mi * (c * ta - hz * tb)
        c = gh * e3
        ta = a + dt * ka2
        tb = b + dt * kb2
        ka3 = mi * (hz * ta + c.conjugate() * tb)
        kb3 = mi * (c * ta - hz * tb)
        a = a + dt / 6.0 * (ka0 + 2.0 * ka1 + 2.0 * ka2 + ka3)
        b = b + dt / 6.0 * (kb0 + 2.0 * kb1 + 2.0 * kb2 + kb3)

        if (s + 1) % renorm_every == 0 or s + 1 == n_steps:
            nrm2 = a.real * a.real + a.imag * a.imag + b.real * b.real + b.imag * b.imag
            if not np.isfinite(nrm2):
                return out[:rec], max_drift, 2
            drift = abs(nrm2 - 1.0)
            if drift > max_drift:
                max_drift = drift
            if drift > 1e-9:
                return out[:rec], max_drift, 1
            if (s + 1) % renorm_every == 0:
                nrm = np.sqrt(nrm2)
                a = a / nrm
                b = b / nrm
        if (s + 1) % stride == 0 or s + 1 == n_steps:
            out[rec, 0] = a
            out[rec, 1] = b
            rec += 1
    return out, max_drift, 0


def _default_dt(drive: DriveSignal, params: HamiltonianParams, frame: str) -> float:
    period = 1.0 / drive.sample_rate
    if frame == "rotating":
        return period / 2
    bound = min(1.0 / (20 * params.qubit_freq), 2 * _LAB_MAX_PHASE_STEP / (2 * math.pi * params.qubit_freq))
    return period / max(1, math.ceil(period / bound - 1e-9))


def evolve(
    initial: QubitState,
    drive: DriveSignal,
    params: HamiltonianParams = HamiltonianParams(),
    cfg: SolverConfig = SolverConfig(),
) -> Trajectory:
    """Integrate over the whole drive, starting from ``initial`` at t = 0.

    States are recorded every ``cfg.record_stride`` steps (default: once per
    drive sample) plus the final step.
    """
    expected = "envelope" if cfg.frame == "rotating" else "lab"
    if drive.representation != expected:
        raise DynamicsError(
            f"{cfg.frame} frame needs a {expected!r} drive, got {drive.representation!r}"
        )
    fs = drive.sample_rate
    dt = cfg.dt if cfg.dt is not None else _default_dt(drive, params, cfg.frame)
    if cfg.frame == "lab" and dt > 1.0 / (20 * params.qubit_freq) * (1 + 1e-9):
        raise DynamicsError(f"lab-frame dt {dt:g} s exceeds 1/(20 nu_q)")
    ratio = dt * fs
    divides = abs(1 / ratio - round(1 / ratio)) <= 1e-9
    if not divides and abs(ratio - round(ratio)) > 1e-9:
        raise DynamicsError("dt must divide, or be a multiple of, the drive sample period")
    hold = cfg.interpolation == "hold"
    if hold and not divides:
        raise DynamicsError("sample-and-hold drive needs dt to divide the sample period")
    total = len(drive.samples) / fs
    n_steps = int(round(total / dt))
    if abs(n_steps * dt - total) > 1e-6 * dt:
        raise DynamicsError("dt does not tile the drive duration")
    if cfg.record_stride is None:
        stride = max(1, int(round(1 / ratio))) if ratio < 1 else 1
    else:
        stride = int(cfg.record_stride)

    samples = np.zeros(len(drive.samples) + 1, dtype=np.complex128)
    if cfg.frame == "lab":
        samples[:-1] = 2.0 * np.asarray(drive.samples, dtype=float)
        hz = math.pi * params.qubit_freq
    else:
        samples[:-1] = drive.samples
        hz = math.pi * (params.qubit_freq - drive.carrier_freq)

    out, drift, status = _rk4_kernel(
        complex(initial.c0),
        complex(initial.c1),
        samples,
        float(ratio),
        float(dt),
        n_steps,
        float(hz),
        0.5 * params.coupling,
        int(cfg.renormalize_every),
        stride,
        hold,
    )
    if status == 2:
        raise DivergenceError("state became non-finite")
    if status == 1:
        raise DivergenceError(f"norm drift {drift:.3g} exceeds {NORM_TOL:g} between renormalizations")
    times = np.arange(len(out)) * (stride * dt)
    times[-1] = n_steps * dt
    return Trajectory(times, out, cfg.frame, drift)


def default_sample_rate(params: HamiltonianParams, frame: str) -> float:
    """Drive sample rate used for calibration: 12 GS/s rotating, 32 x nu_q lab."""
    return 12e9 if frame == "rotating" else 32 * params.qubit_freq


def _golden_min(fn, lo, hi, xtol):
    inv = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - inv * (b - a)
    d = a + inv * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = fn(d)
    return (a + b) / 2


@functools.lru_cache(maxsize=64)
def calibrate_pi_amplitude(
    duration: float,
    params: HamiltonianParams = HamiltonianParams(),
    cfg: SolverConfig = SolverConfig(),
    sample_rate: float | None = None,
) -> float:
    """Envelope amplitude making a noiseless resonant pulse a pi rotation.

    Golden-section search on [0.5, 1.5] x pi / (g tau) for the amplitude
    maximizing the |0> -> |1> transfer. The search minimizes |<0|psi>|,
    which has a sharp V-shaped minimum and so locates the optimum to
    round-off rather than to sqrt(eps).
    """
    if not duration > 0:
        raise DynamicsError("duration must be > 0")
    fs = sample_rate or default_sample_rate(params, cfg.frame)
    rep = "envelope" if cfg.frame == "rotating" else "lab"
    a_rwa = math.pi / (params.coupling * duration)
    seq = build_sequence(1, duration, 0.0, params.qubit_freq, 1.0)
    start = QubitState.zero()

    def residual(amp):
        drive = modulate(seq.with_amplitude(amp), None, fs, rep)
        return abs(evolve(start, drive, params, cfg).states[-1, 0])

    lo, hi = 0.5 * a_rwa, 1.5 * a_rwa
    best = _golden_min(residual, lo, hi, 1e-13 * a_rwa)
    if min(best - lo, hi - best) < 1e-6 * a_rwa:
        raise CalibrationError(
            f"pi amplitude search hit the bracket edge at {best:g} (bracket {lo:g}..{hi:g})"
        )
    pop = 1.0 - residual(best) ** 2
    floor = 1 - 1e-8 if cfg.frame == "rotating" else 1 - 1e-4
    if pop < floor:
        raise CalibrationError(f"calibrated pulse only reaches population {pop:.10f}")
    return best


def rabi_oracle(rabi_rate, detuning, t):
    """Excited population of a constantly driven qubit started in |0>.

    Frequencies in Hz: ``W^2 / (W^2 + D^2) sin^2(pi sqrt(W^2 + D^2) t)``.
    """
    rabi_rate = np.asarray(rabi_rate, dtype=float)
    detuning = np.asarray(detuning, dtype=float)
    gen2 = rabi_rate**2 + detuning**2
    with np.errstate(invalid="ignore", divide="ignore"):
        amp = np.where(gen2 > 0, rabi_rate**2 / np.where(gen2 > 0, gen2, 1.0), 0.0)
    return amp * np.sin(np.pi * np.sqrt(gen2) * np.asarray(t, dtype=float)) ** 2


def to_frame(state: QubitState, t: float, from_freq: float, to_freq: float) -> QubitState:
    """Re-express ``state`` in a frame rotating at ``to_freq`` instead of ``from_freq``."""
    x = math.pi * (to_freq - from_freq) * t
    return QubitState(state.c0 * np.exp(1j * x), state.c1 * np.exp(-1j * x))
