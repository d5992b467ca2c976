"""Qubit gate fidelity under control-oscillator phase noise."""

from .dynamics import HamiltonianParams, QubitState, SolverConfig, calibrate_pi_amplitude, evolve, rabi_oracle
from .experiment import ExperimentConfig, ResultTable, emit_plotdata, get_preset, list_presets, run
from .fidelity import Experiment, bloch_angles, clock_corrected_target, fidelity, ideal_target, monte_carlo_fidelity
from .psd import GaussianBand, LogLogTable, PiecewisePlateau, psd_at, scale_spec
from .pulses import build_sequence, modulate
from .synth import design_fir_irt, synthesize_phase_noise, verify_psd

__version__ = "0.1.0"
