"""Fidelity against ideal pi_x targets, Bloch angles and Monte Carlo averaging.

Targets for equatorial states are expressed in the local-oscillator frame:
the oscillator's instantaneous phase deviation at the measurement instant
is added to the target azimuth before comparing. Pole states are unaffected
by that correction.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dynamics import HamiltonianParams, QubitState, SolverConfig, Trajectory, evolve
from .psd import PsdSpec
from .pulses import PulseSequence, modulate, pulse_edges
from .synth import DEFAULT_ORDER, NoiseRealization, resample_integer, synthesize_phase_noise

__all__ = [
    "BlochAngles",
    "FidelityRecord",
    "Experiment",
    "ideal_target",
    "clock_corrected_target",
    "fidelity",
    "bloch_angles",
    "azimuth_components",
    "simulate_realization",
    "monte_carlo_fidelity",
    "aggregate",
]

_PI_X = np.array([[0, -1j], [-1j, 0]])


@dataclass(frozen=True)
class BlochAngles:
    polar: float
    azimuth: float


@dataclass(frozen=True, eq=False)
class FidelityRecord:
    pulse_index: int
    mean_fidelity: float
    std_fidelity: float
    n_realizations: int
    values: np.ndarray = field(repr=False, default=None)

    @property
    def std_error(self) -> float:
        return self.std_fidelity / math.sqrt(self.n_realizations)


def ideal_target(initial: QubitState, k: int) -> QubitState:
    """``initial`` after k perfect pi rotations about x."""
    if k < 0:
        raise ValueError("pulse count must be >= 0")
    v = initial.vector
    # (-i sx)^k: the sign/phase of the power is irrelevant, only parity matters
    if k % 2:
        v = _PI_X @ v
    return QubitState(v[0], v[1])


def clock_corrected_target(target: QubitState, theta_inst: float) -> QubitState:
    """Rotate ``target`` about z so its azimuth grows by ``theta_inst``."""
    if not math.isfinite(theta_inst):
        raise ValueError("phase deviation must be finite")
    half = 0.5 * theta_inst
    return QubitState(target.c0 * np.exp(-1j * half), target.c1 * np.exp(1j * half))


def fidelity(a: QubitState, b: QubitState) -> float:
    """Pure-state overlap |<a|b>|^2."""
    for s in (a, b):
        norm = abs(s.c0) ** 2 + abs(s.c1) ** 2
        if abs(norm - 1) > 1e-9:
            raise ValueError(f"state is not normalized (|psi|^2 = {norm!r})")
    ov = np.conj(a.c0) * b.c0 + np.conj(a.c1) * b.c1
    return float(min(1.0, abs(ov) ** 2))


def _fidelity_arrays(states: np.ndarray, targets: np.ndarray) -> np.ndarray:
    ov = np.sum(np.conj(targets) * states, axis=-1)
    norms = np.sum(np.abs(states) ** 2, axis=-1)
    return np.minimum(1.0, np.abs(ov) ** 2 / norms)


def bloch_angles(s: QubitState) -> BlochAngles:
    """Polar angle from +z and azimuth in [-pi, pi); poles report azimuth 0."""
    x = 2 * (np.conj(s.c0) * s.c1).real
    y = 2 * (np.conj(s.c0) * s.c1).imag
    z = abs(s.c0) ** 2 - abs(s.c1) ** 2
    polar = math.acos(max(-1.0, min(1.0, z)))
    if math.hypot(x, y) < 1e-12:
        return BlochAngles(polar, 0.0)
    return BlochAngles(polar, _wrap(math.atan2(y, x)))


def _wrap(angle):
    """Map to [-pi, pi)."""
    return (np.asarray(angle) + np.pi) % (2 * np.pi) - np.pi


def azimuth_components(
    traj: Trajectory,
    noise: NoiseRealization,
    sample_times: Sequence[float],
    pulse_indices: Sequence[int] | None = None,
    initial: QubitState | None = None,
) -> dict:
    """Split the azimuth at each sample time into its two contributions.

    ``dynamics_azimuth`` is the azimuth of the simulated state itself;
    ``clock_azimuth`` is the oscillator phase deviation at that instant
    plus the azimuth of the ideal target after the given number of pulses.
    By default ``sample_times[i]`` is taken to follow pulse ``i + 1``.
    """
    times = np.asarray(sample_times, dtype=float)
    if pulse_indices is None:
        pulse_indices = np.arange(1, len(times) + 1)
    if initial is None:
        initial = traj.state(0)
    t_lo, t_hi = traj.times[0], traj.times[-1]
    if np.any(times < t_lo - 1e-15) or np.any(times > t_hi + 1e-15):
        raise ValueError("sample time outside the trajectory span")
    theta = noise.at(times)
    dyn = np.empty(len(times))
    clock = np.empty(len(times))
    polar = np.empty(len(times))
    for i, (t, k) in enumerate(zip(times, pulse_indices)):
        ang = bloch_angles(traj.state(traj.index_at(t)))
        dyn[i] = ang.azimuth
        polar[i] = ang.polar
        clock[i] = _wrap(bloch_angles(ideal_target(initial, int(k))).azimuth + theta[i])
    return {"dynamics_azimuth": dyn, "clock_azimuth": clock, "polar": polar, "theta": theta}


@dataclass(frozen=True)
class Experiment:
    """Everything needed to simulate one noisy pulse sequence.

    ``psd=None`` runs without noise. Noise is generated at ``gen_rate`` and
    resampled by ``upsample`` to the drive sample rate.
    """

    sequence: PulseSequence
    psd: PsdSpec | None = None
    initial: QubitState = QubitState(1, 0)
    params: HamiltonianParams = HamiltonianParams()
    solver: SolverConfig = SolverConfig()
    gen_rate: float = 1e9
    upsample: int = 12
    fir_order: int = DEFAULT_ORDER
    resample_method: str = "linear"

    @property
    def drive_rate(self) -> float:
        return self.gen_rate * self.upsample

    @property
    def representation(self) -> str:
        return "envelope" if self.solver.frame == "rotating" else "lab"


def _noise_for(exp: Experiment, seed: int) -> NoiseRealization | None:
    if exp.psd is None:
        return None
    # one extra generation sample so the final pulse end is covered
    duration = exp.sequence.span + 1.0 / exp.gen_rate
    r = synthesize_phase_noise(exp.psd, duration, exp.gen_rate, exp.fir_order, seed)
    return resample_integer(r, exp.upsample, exp.resample_method)


def simulate_realization(exp: Experiment, seed: int, full: bool = False):
    """Per-pulse fidelities for one noise seed.

    Fidelity after pulse k is measured at the sample where pulse k ends,
    against the ideal target rotated by the phase deviation at that sample.
    With ``full=True`` the trajectory and noise are returned as well.
    """
    fs = exp.drive_rate
    noise = _noise_for(exp, seed)
    drive = modulate(exp.sequence, noise, fs, exp.representation)
    traj = evolve(exp.initial, drive, exp.params, exp.solver)
    ends = pulse_edges(exp.sequence, fs)[:, 1]
    idx = [traj.index_at(j / fs) for j in ends]
    states = traj.states[idx]
    theta = np.zeros(len(ends)) if noise is None else noise.samples[ends]
    targets = []
    for k, th in enumerate(theta, start=1):
        tgt = clock_corrected_target(ideal_target(exp.initial, k), float(th))
        targets.append(tgt.vector)
    fids = _fidelity_arrays(states, np.array(targets))
    if full:
        return fids, traj, noise
    return fids


def aggregate(values: np.ndarray, n_seeds: int) -> list[FidelityRecord]:
    """Per-pulse statistics from a (n_seeds, n_pulses) array, in seed order."""
    values = np.asarray(values, dtype=float)
    out = []
    for k in range(values.shape[1]):
        col = values[:, k]
        mean = float(np.sum(col) / n_seeds)
        std = float(np.std(col, ddof=1)) if n_seeds > 1 else 0.0
        if np.all(col == col[0]):
            std = 0.0
        out.append(FidelityRecord(k + 1, mean, std, n_seeds, col.copy()))
    return out


def _seed_task(args):
    exp, seed = args
    return simulate_realization(exp, seed)


def resolve_workers(workers: int | None) -> int:
    if workers is None:
        env = os.environ.get("DEPHASIM_WORKERS")
        workers = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(workers))


def monte_carlo_fidelity(exp: Experiment, seeds: Sequence[int], workers: int | None = 1) -> list[FidelityRecord]:
    """Average per-pulse fidelity over one realization per seed.

    Results do not depend on ``workers``: every seed is simulated
    independently and reduced in seed order.
    """
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise ValueError("at least one seed is required")
    workers = resolve_workers(workers)
    tasks = [(exp, s) for s in seeds]
    if workers == 1 or len(seeds) == 1:
        values = [_seed_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(_seed_task, tasks, chunksize=max(1, len(tasks) // workers)))
    return aggregate(np.array(values), len(seeds))
