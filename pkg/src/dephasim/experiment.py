"""Config-driven experiments: presets, sweeps, seeded runs and result tables.

A config is a JSON object; every field has a default except ``psd`` and
``sequence``. Example::

    {
      "name": "custom",
      "psd": {"kind": "gaussian", "center_offset": 1e7, "fwhm_bandwidth": 3e3, "level": -85},
      "sequence": {"n_pulses": 12, "duration": 5e-8, "gap": 2e-8},
      "initial_state": "0",
      "sweep": {"parameter": "center_offset", "values": [5e6, 1e7, 2e7]},
      "seeds": {"base_seed": 0, "count": 20},
      "synthesis": {"fir_order": 1048576}
    }

Seeds are ``base_seed + i`` for ``i`` in ``range(count)``.
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path

import jsonschema
import numpy as np

from . import psd as _psd
from .dynamics import HamiltonianParams, QubitState, SolverConfig, calibrate_pi_amplitude
from .fidelity import (
    Experiment,
    FidelityRecord,
    aggregate,
    azimuth_components,
    resolve_workers,
    simulate_realization,
)
from .pulses import build_sequence, pulse_edges
from .synth import DEFAULT_ORDER

__all__ = [
    "ConfigError",
    "RunError",
    "ExperimentConfig",
    "ResultTable",
    "run",
    "list_presets",
    "get_preset",
    "emit_plotdata",
    "CSV_HEADER",
]

CSV_HEADER = "sweep_value,pulse_index,mean_fidelity,std_fidelity,n_seeds"
LARGE_ORDER = 1 << 20


class ConfigError(ValueError):
    """Invalid experiment configuration; the message starts with the field path."""


class RunError(RuntimeError):
    """Numerical failure inside a run, tagged with sweep value and seed."""


_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["psd", "sequence"],
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "figure": {"type": "string"},
        "psd": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["gaussian", "table", "plateau", "none"]},
                "center_offset": {"type": "number", "minimum": 0},
                "fwhm_bandwidth": _POS,
                "level": _NUM,
                "level_table": {
                    "type": "object",
                    "required": ["file"],
                    "additionalProperties": False,
                    "properties": {"file": {"type": "string"}, "scale_db": _NUM},
                },
                "file": {"type": "string"},
                "points": {
                    "type": "array",
                    "minItems": 2,
                    "items": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
                },
                "segments": {
                    "type": "array",
                    "minItems": 1,
                    "items": {"type": "array", "items": _NUM, "minItems": 3, "maxItems": 3},
                },
                "scale_db": _NUM,
            },
            "additionalProperties": False,
        },
        "sequence": {
            "type": "object",
            "required": ["n_pulses", "duration"],
            "additionalProperties": False,
            "properties": {
                "n_pulses": {"type": "integer", "minimum": 1},
                "duration": _POS,
                "gap": {"type": "number", "minimum": 0},
                "carrier": _POS,
                "detuning": _NUM,
            },
        },
        "initial_state": {
            "oneOf": [
                {"enum": ["0", "1", "+x", "-x", "+y", "-y"]},
                {
                    "type": "object",
                    "required": ["polar", "azimuth"],
                    "additionalProperties": False,
                    "properties": {"polar": _NUM, "azimuth": _NUM},
                },
            ]
        },
        "frame": {"enum": ["rotating", "lab"]},
        "sweep": {
            "type": ["object", "null"],
            "required": ["parameter", "values"],
            "additionalProperties": False,
            "properties": {
                "parameter": {"enum": ["center_offset", "detuning"]},
                "values": {"type": "array", "minItems": 1, "items": _NUM},
            },
        },
        "seeds": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "base_seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
                "count": {"type": "integer", "minimum": 1},
            },
        },
        "solver": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "dt": {"type": ["number", "null"], "exclusiveMinimum": 0},
                "interpolation": {"enum": ["hold", "linear"]},
                "renormalize_every": {"type": "integer", "minimum": 1},
            },
        },
        "synthesis": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "gen_rate": _POS,
                "upsample": {"type": "integer", "minimum": 1},
                "fir_order": {"type": "integer", "minimum": 2, "multipleOf": 2},
                "resample": {"enum": ["linear", "fft"]},
            },
        },
        "hamiltonian": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"qubit_freq": _POS, "coupling": _POS},
        },
        "outputs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"angles": {"type": "boolean"}, "trajectory": {"type": "boolean"}},
        },
        "output": {"type": ["string", "null"]},
    },
}

DEFAULTS = {
    "name": "custom",
    "description": "",
    "figure": "",
    "initial_state": "0",
    "frame": "rotating",
    "sweep": None,
    "seeds": {"base_seed": 0, "count": 20},
    "solver": {"dt": None, "interpolation": "hold", "renormalize_every": 1000},
    "synthesis": {"gen_rate": 1e9, "upsample": 12, "fir_order": DEFAULT_ORDER, "resample": "linear"},
    "hamiltonian": {"qubit_freq": 6e9, "coupling": 2 * math.pi * 100e6},
    "outputs": {"angles": False, "trajectory": False},
    "output": None,
}
_SEQUENCE_DEFAULTS = {"gap": 0.0, "carrier": None, "detuning": 0.0}


def _path_str(parts) -> str:
    out = "config"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def _merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _check_finite(obj, path=()):
    if isinstance(obj, float) and not math.isfinite(obj):
        raise ConfigError(f"{_path_str(path)}: value must be finite, got {obj!r}")
    if isinstance(obj, dict):
        for k, v in obj.items():
            _check_finite(v, path + (k,))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _check_finite(v, path + (i,))


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated config; ``data`` is the fully defaulted JSON object."""

    data: dict = field(compare=False)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config: expected a JSON object")
        _check_finite(raw)
        try:
            jsonschema.validate(raw, SCHEMA)
        except jsonschema.ValidationError as exc:
            raise ConfigError(f"{_path_str(exc.absolute_path)}: {exc.message}") from None
        data = _merge(DEFAULTS, raw)
        data["sequence"] = _merge(_SEQUENCE_DEFAULTS, raw["sequence"])
        if data["sequence"]["carrier"] is None:
            data["sequence"]["carrier"] = data["hamiltonian"]["qubit_freq"]
        _semantic_checks(data)
        return cls(data)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: {path}: invalid JSON ({exc})") from None
        return cls.from_dict(raw)

    def to_dict(self) -> dict:
        return copy.deepcopy(self.data)

    def with_overrides(self, **sections) -> "ExperimentConfig":
        """New config with top-level sections merged in, e.g. ``seeds={"count": 4}``."""
        return ExperimentConfig.from_dict(_merge(_strip_defaults(self.data), sections))

    @property
    def name(self) -> str:
        return self.data["name"]

    @property
    def seeds(self) -> list[int]:
        s = self.data["seeds"]
        return [s["base_seed"] + i for i in range(s["count"])]

    def canonical_json(self) -> str:
        d = {k: v for k, v in self.data.items() if k != "output"}
        return json.dumps(d, sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        h = hashlib.sha256(self.canonical_json().encode())
        for path in _referenced_files(self.data):
            h.update(Path(path).read_bytes())
        return h.hexdigest()

    def __eq__(self, other):
        return isinstance(other, ExperimentConfig) and self.canonical_json() == other.canonical_json()

    def __hash__(self):
        return hash(self.canonical_json())


def _strip_defaults(data: dict) -> dict:
    d = copy.deepcopy(data)
    d.pop("output", None)
    return d


def _semantic_checks(data: dict) -> None:
    kind = data["psd"]["kind"]
    p = data["psd"]
    needs = {
        "gaussian": ["center_offset", "fwhm_bandwidth"],
        "table": [],
        "plateau": ["segments"],
        "none": [],
    }[kind]
    for key in needs:
        if key not in p:
            raise ConfigError(f"config.psd.{key}: required for kind {kind!r}")
    if kind == "gaussian" and "level" not in p and "level_table" not in p:
        raise ConfigError("config.psd.level: gaussian needs 'level' or 'level_table'")
    if kind == "table" and ("file" in p) == ("points" in p):
        raise ConfigError("config.psd: table needs exactly one of 'file' or 'points'")
    sweep = data["sweep"]
    if sweep and sweep["parameter"] == "center_offset" and kind != "gaussian":
        raise ConfigError("config.sweep.parameter: center_offset sweeps need a gaussian psd")
    try:
        _build_psd(p, None)
    except (_psd.PsdError, OSError) as exc:
        raise ConfigError(f"config.psd: {exc}") from None
    seq = data["sequence"]
    fs = data["synthesis"]["gen_rate"] * data["synthesis"]["upsample"]
    for k in ("duration", "gap"):
        n = seq[k] * fs
        if abs(n - round(n)) > 1e-6:
            raise ConfigError(f"config.sequence.{k}: {seq[k]!r} s is not a whole number of drive samples")


def _referenced_files(data: dict) -> list[Path]:
    p = data["psd"]
    files = []
    if "file" in p:
        files.append(_resolve(p["file"]))
    if "level_table" in p:
        files.append(_resolve(p["level_table"]["file"]))
    return files


def _resolve(name: str) -> Path:
    path = Path(name)
    if path.exists():
        return path
    if not path.is_absolute() and (_psd.DATA_DIR / path).exists():
        return _psd.DATA_DIR / path
    raise FileNotFoundError(f"PSD table {name!r} not found")


def _build_psd(p: dict, center: float | None):
    kind = p["kind"]
    scale = p.get("scale_db", 0.0)
    if kind == "none":
        return None
    if kind == "gaussian":
        c = p["center_offset"] if center is None else center
        if "level_table" in p:
            table = _psd.load_table(_resolve(p["level_table"]["file"]))
            level = 10 * math.log10(_psd.psd_at(table, c) / _psd.PHASE_PSD_FACTOR)
            level += p["level_table"].get("scale_db", 0.0)
        else:
            level = p["level"]
        return _psd.GaussianBand(c, p["fwhm_bandwidth"], level + scale)
    if kind == "table":
        spec = _psd.load_table(_resolve(p["file"])) if "file" in p else _psd.LogLogTable(
            tuple(tuple(x) for x in p["points"])
        )
    else:
        spec = _psd.PiecewisePlateau(tuple(tuple(s) for s in p["segments"]))
    return _psd.scale_spec(spec, scale) if scale else spec


_INITIAL = {
    "0": QubitState.zero,
    "1": QubitState.one,
    "+y": QubitState.plus_y,
    "-y": QubitState.minus_y,
    "+x": lambda: QubitState.from_bloch(math.pi / 2, 0.0),
    "-x": lambda: QubitState.from_bloch(math.pi / 2, math.pi),
}


def initial_state(spec) -> QubitState:
    if isinstance(spec, dict):
        return QubitState.from_bloch(spec["polar"], spec["azimuth"])
    return _INITIAL[spec]()


def build_experiments(cfg: ExperimentConfig) -> tuple[list[float], list[Experiment]]:
    """One :class:`Experiment` per sweep value, sharing one calibrated amplitude."""
    d = cfg.data
    seq_d, syn, sol = d["sequence"], d["synthesis"], d["solver"]
    params = HamiltonianParams(**d["hamiltonian"])
    solver = SolverConfig(
        frame=d["frame"],
        dt=sol["dt"],
        renormalize_every=sol["renormalize_every"],
        interpolation=sol["interpolation"],
    )
    drive_rate = syn["gen_rate"] * syn["upsample"]
    # calibration is noiseless and resonant, once per (duration, frame)
    amp = calibrate_pi_amplitude(seq_d["duration"], params, solver, drive_rate)
    base = build_sequence(seq_d["n_pulses"], seq_d["duration"], seq_d["gap"], seq_d["carrier"], amp)
    base = base.with_detuning(seq_d["detuning"])
    sweep = d["sweep"]
    values = [float(v) for v in sweep["values"]] if sweep else [0.0]
    exps = []
    for v in values:
        seq, center = base, None
        if sweep and sweep["parameter"] == "detuning":
            seq = base.with_detuning(v)
        elif sweep:
            center = v
        exps.append(
            Experiment(
                sequence=seq,
                psd=_build_psd(d["psd"], center),
                initial=initial_state(d["initial_state"]),
                params=params,
                solver=solver,
                gen_rate=syn["gen_rate"],
                upsample=syn["upsample"],
                fir_order=syn["fir_order"],
                resample_method=syn["resample"],
            )
        )
    return values, exps


@dataclass
class ResultTable:
    """Rows ``(sweep_value, pulse_index, mean, std, n_seeds)`` plus run metadata."""

    rows: list
    metadata: dict = field(default_factory=dict)
    records: dict = field(default_factory=dict, repr=False)

    @property
    def sweep_values(self) -> list[float]:
        return list(dict.fromkeys(r[0] for r in self.rows))

    @property
    def pulse_indices(self) -> list[int]:
        return sorted({r[1] for r in self.rows})

    def grid(self) -> np.ndarray:
        """Mean fidelity as a (n_sweep, n_pulses) matrix."""
        sv, pi = self.sweep_values, self.pulse_indices
        g = np.full((len(sv), len(pi)), np.nan)
        for v, k, mean, _, _ in self.rows:
            g[sv.index(v), pi.index(k)] = mean
        return g

    def final(self) -> list[tuple]:
        """Rows at the last pulse index, in sweep order."""
        last = self.pulse_indices[-1]
        return [r for r in self.rows if r[1] == last]

    def to_csv(self, path) -> None:
        lines = [CSV_HEADER]
        for v, k, mean, std, n in self.rows:
            lines.append(f"{float(v)!r},{int(k)},{float(mean)!r},{float(std)!r},{int(n)}")
        for key in ("config_hash", "preset", "seeds", "versions"):
            if key in self.metadata:
                val = self.metadata[key]
                if isinstance(val, (list, dict)):
                    val = json.dumps(val, sort_keys=True, separators=(",", ":"))
                lines.append(f"# {key}: {val}")
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path) -> "ResultTable":
        rows, meta = [], {}
        with open(path) as fh:
            header = fh.readline().strip()
            if header != CSV_HEADER:
                raise ValueError(f"{path}: unexpected header {header!r}")
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    key, _, val = line[1:].strip().partition(": ")
                    meta[key] = val
                    continue
                v, k, m, s, n = line.split(",")
                rows.append((float(v), int(k), float(m), float(s), int(n)))
        if not rows:
            raise ValueError(f"{path}: no result rows")
        return cls(rows, meta)


def _versions() -> dict:
    out = {}
    for pkg in ("dephasim", "numpy", "scipy", "numba"):
        try:
            out[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            out[pkg] = "unknown"
    return out


def _task(args):
    exp, seed, value = args
    try:
        return simulate_realization(exp, seed)
    except Exception as exc:  # add context, keep the original as cause
        raise RunError(f"sweep value {value!r}, seed {seed}: {type(exc).__name__}: {exc}") from exc


def run(cfg: ExperimentConfig, workers: int | None = 1, out_dir=None, progress=None) -> ResultTable:
    """Run every (sweep value, seed) pair and aggregate per pulse index.

    Work is distributed one sweep value per chunk, so each worker designs
    a noise filter once per chunk. The reduction is always in seed order,
    so the result does not depend on ``workers``.
    """
    t0 = time.perf_counter()
    values, exps = build_experiments(cfg)
    seeds = cfg.seeds
    tasks = [(e, s, v) for v, e in zip(values, exps) for s in seeds]
    workers = min(resolve_workers(workers), len(values))
    if workers <= 1:
        out = []
        for i, t in enumerate(tasks):
            out.append(_task(t))
            if progress and (i + 1) % len(seeds) == 0:
                progress((i + 1) // len(seeds), len(values))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            out = []
            for i, r in enumerate(pool.map(_task, tasks, chunksize=len(seeds))):
                out.append(r)
                if progress and (i + 1) % len(seeds) == 0:
                    progress((i + 1) // len(seeds), len(values))
    values_arr = np.array(out).reshape(len(values), len(seeds), -1)
    rows, records = [], {}
    for v, block in zip(values, values_arr):
        recs: list[FidelityRecord] = aggregate(block, len(seeds))
        records[v] = recs
        rows.extend((v, r.pulse_index, r.mean_fidelity, r.std_fidelity, r.n_realizations) for r in recs)
    table = ResultTable(
        rows,
        {
            "config_hash": cfg.config_hash(),
            "preset": cfg.name,
            "seeds": seeds,
            "versions": _versions(),
            "wall_time_s": time.perf_counter() - t0,
        },
        records,
    )
    if out_dir is not None:
        write_outputs(cfg, table, out_dir, exps, values)
    return table


def angle_traces(exp: Experiment, seed: int) -> dict:
    """Bloch angles at every pulse end for one realization."""
    fids, traj, noise = simulate_realization(exp, seed, full=True)
    fs = exp.drive_rate
    ends = pulse_edges(exp.sequence, fs)[:, 1] / fs
    if noise is None:
        from .synth import NoiseRealization

        noise = NoiseRealization(np.zeros(len(traj)), fs, seed, {})
    comps = azimuth_components(traj, noise, ends, initial=exp.initial)
    comps["fidelity"] = fids
    return comps


def write_outputs(cfg: ExperimentConfig, table: ResultTable, out_dir, exps=None, values=None) -> dict:
    """Write results.csv, run_meta.json, plot data and figures into ``out_dir``."""
    from . import plotting

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"csv": out / "results.csv", "meta": out / "run_meta.json"}
    table.to_csv(paths["csv"])
    meta = dict(table.metadata)
    meta["config"] = cfg.to_dict()
    paths["meta"].write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    paths["lines"] = emit_plotdata([table], "lines", out / "lines.csv", labels=[cfg.name])
    if len(table.sweep_values) > 1:
        paths["heatmap"] = emit_plotdata([table], "heatmap", out / "heatmap.txt")
    d = cfg.data
    if exps is not None and (d["outputs"]["angles"] or d["outputs"]["trajectory"]):
        seed = cfg.seeds[0]
        if d["outputs"]["angles"]:
            rows = ["sweep_value,pulse_index,polar,dynamics_azimuth,clock_azimuth,theta"]
            for v, e in zip(values, exps):
                c = angle_traces(e, seed)
                for k in range(len(c["polar"])):
                    rows.append(
                        f"{v!r},{k + 1},{float(c['polar'][k])!r},{float(c['dynamics_azimuth'][k])!r},"
                        f"{float(c['clock_azimuth'][k])!r},{float(c['theta'][k])!r}"
                    )
            paths["angles"] = out / "angles.csv"
            paths["angles"].write_text("\n".join(rows) + "\n")
            plotting.angle_figure(paths["angles"], out / "angles.png")
        if d["outputs"]["trajectory"]:
            for i, (v, e) in enumerate(zip(values, exps)):
                _, traj, _ = simulate_realization(e, seed, full=True)
                p = out / f"trajectory_{i:02d}.csv"
                traj.to_csv(p)
                paths[f"trajectory_{i:02d}"] = p
            plotting.trajectory_figure(
                [paths[f"trajectory_{i:02d}"] for i in range(len(values))],
                [f"{v:g}" for v in values],
                out / "trajectory.png",
            )
    return paths


# ---------------------------------------------------------------------------
# plot data


def _as_table(t) -> ResultTable:
    return t if isinstance(t, ResultTable) else ResultTable.from_csv(t)


def emit_plotdata(tables, kind: str, path, labels=None) -> Path:
    """Write plot-ready data and render a PNG with the same stem.

    heatmap: whitespace-separated matrix (rows = sweep values, columns =
    pulse indices) preceded by ``#`` lines holding both axis vectors;
    ``numpy.loadtxt`` reads the matrix directly.
    lines: CSV with a ``pulse_index`` column and one mean-fidelity column
    per (input, sweep value).
    """
    from . import plotting

    if isinstance(tables, (ResultTable, str, Path)):
        tables = [tables]
    tables = [_as_table(t) for t in tables]
    if not tables or any(not t.rows for t in tables):
        raise ValueError("cannot emit plot data for an empty table")
    if labels is None:
        labels = [t.metadata.get("preset", f"input{i}") for i, t in enumerate(tables)]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if kind == "heatmap":
        if len(tables) != 1:
            raise ValueError("heatmap export takes exactly one table")
        t = tables[0]
        g = t.grid()
        head = [
            "rows: sweep_value; columns: pulse_index; values: mean_fidelity",
            "sweep_values: " + " ".join(repr(float(v)) for v in t.sweep_values),
            "pulse_index: " + " ".join(str(k) for k in t.pulse_indices),
        ]
        np.savetxt(path, g, fmt="%.17g", header="\n".join(head))
        plotting.heatmap_figure(t.sweep_values, t.pulse_indices, g, path.with_suffix(".png"))
    elif kind == "lines":
        pulses = sorted({k for t in tables for k in t.pulse_indices})
        cols, names = [], []
        for lab, t in zip(labels, tables):
            for v in t.sweep_values:
                m = {k: mean for sv, k, mean, _, _ in t.rows if sv == v}
                cols.append([m.get(k, math.nan) for k in pulses])
                names.append(lab if len(t.sweep_values) == 1 else f"{lab}@{v!r}")
        lines = ["pulse_index," + ",".join(names)]
        for i, k in enumerate(pulses):
            lines.append(f"{k}," + ",".join(repr(float(c[i])) for c in cols))
        path.write_text("\n".join(lines) + "\n")
        plotting.lines_figure(pulses, names, cols, path.with_suffix(".png"))
    else:
        raise ValueError(f"unknown plot kind {kind!r}")
    return path


# ---------------------------------------------------------------------------
# presets

_SWEEP_WIDE = [float(v) for v in np.logspace(5, 8, 41)]  # 100 kHz .. 100 MHz
_SWEEP_LOW = [float(v) for v in np.logspace(4, math.log10(25e6), 41)]  # 10 kHz .. 25 MHz
_SEQ_50 = {"n_pulses": 12, "duration": 50e-9, "gap": 20e-9}
_SEQ_25 = {"n_pulses": 12, "duration": 25e-9, "gap": 10e-9}
_SEQ_150 = {"n_pulses": 10, "duration": 150e-9, "gap": 60e-9}


def _narrow(level=-85.0):
    return {"kind": "gaussian", "center_offset": 1e7, "fwhm_bandwidth": 3e3, "level": level}


def _wide_sweep():
    return {"parameter": "center_offset", "values": list(_SWEEP_WIDE)}


_PRESETS = {
    "fig1": dict(
        figure="Fig. 1",
        description="12x50 ns/20 ns from |0>, 3 kHz Gaussian bands at -85 dBc/Hz, 41-point center sweep",
        psd=_narrow(),
        sequence=_SEQ_50,
        sweep=_wide_sweep(),
        synthesis={"fir_order": LARGE_ORDER},
    ),
    "fig2a": dict(
        figure="Fig. 2(a)",
        description="12x25 ns/10 ns from |0>, 3 kHz Gaussian bands at -85 dBc/Hz",
        psd=_narrow(),
        sequence=_SEQ_25,
        sweep=_wide_sweep(),
        synthesis={"fir_order": LARGE_ORDER},
    ),
    "fig2b": dict(
        figure="Fig. 2(b)",
        description="10x150 ns/60 ns from |0>, 3 kHz Gaussian bands at -85 dBc/Hz",
        psd=_narrow(),
        sequence=_SEQ_150,
        sweep=_wide_sweep(),
        synthesis={"fir_order": LARGE_ORDER},
    ),
    "fig3a": dict(
        figure="Fig. 3(a)",
        description="12x25 ns/10 ns from the -y axis, 3 kHz Gaussian bands at -85 dBc/Hz",
        psd=_narrow(),
        sequence=_SEQ_25,
        initial_state="-y",
        sweep=_wide_sweep(),
        synthesis={"fir_order": LARGE_ORDER},
    ),
    "fig3b": dict(
        figure="Fig. 3(b)",
        description="10x150 ns/60 ns from the -y axis, 3 kHz Gaussian bands at -85 dBc/Hz",
        psd=_narrow(),
        sequence=_SEQ_150,
        initial_state="-y",
        sweep=_wide_sweep(),
        synthesis={"fir_order": LARGE_ORDER},
    ),
    "fig4": dict(
        figure="Fig. 4",
        description="12x25 ns/10 ns from |0>, 3 kHz Gaussian bands at -95 dBc/Hz",
        psd=_narrow(-95.0),
        sequence=_SEQ_25,
        sweep=_wide_sweep(),
        synthesis={"fir_order": LARGE_ORDER},
    ),
    "fig5": dict(
        figure="Fig. 5",
        description="12x25 ns/10 ns from |0>, 3 MHz Gaussian bands at -100 dBc/Hz, 10-100 MHz in 10 steps",
        psd={"kind": "gaussian", "center_offset": 1e7, "fwhm_bandwidth": 3e6, "level": -100.0},
        sequence=_SEQ_25,
        sweep={"parameter": "center_offset", "values": [float(v) for v in np.linspace(10e6, 100e6, 10)]},
    ),
    "fig6": dict(
        figure="Fig. 6",
        description="noiseless 12x50 ns/20 ns from |0>, carrier detuned by 1, 10, 50, 400 MHz",
        psd={"kind": "none"},
        sequence=_SEQ_50,
        sweep={"parameter": "detuning", "values": [1e6, 10e6, 50e6, 400e6]},
        seeds={"count": 1},
        outputs={"trajectory": True},
    ),
}
for _suffix, _det in zip("abcd", (1e6, 10e6, 50e6, 400e6)):
    _PRESETS[f"fig6{_suffix}"] = dict(
        figure=f"Fig. 6({_suffix})",
        description=f"noiseless 12x50 ns/20 ns from |0>, carrier detuned by {_det / 1e6:g} MHz",
        psd={"kind": "none"},
        sequence=dict(_SEQ_50, detuning=_det),
        seeds={"count": 1},
        outputs={"trajectory": True},
    )
_ANGLE_RUN = dict(
    psd={"kind": "gaussian", "center_offset": 1e7, "fwhm_bandwidth": 6e6, "level": -100.0},
    sequence=_SEQ_25,
    initial_state="-y",
    sweep={"parameter": "center_offset", "values": [10e6, 20e6, 50e6, 100e6, 400e6]},
    outputs={"angles": True},
)
for _name, _what in (("fig7", "polar angle"), ("fig8", "simulated azimuth"), ("fig9", "clock azimuth")):
    _PRESETS[_name] = dict(
        _ANGLE_RUN,
        figure=f"Fig. {_name[3:]}",
        description=f"{_what} per pulse: 12x25 ns/10 ns from -y, 6 MHz bands at 10-400 MHz, -100 dBc/Hz",
    )
_PRESETS.update(
    {
        "fig10": dict(
            figure="Fig. 10",
            description="10x150 ns/60 ns from |0> with the measured 3.4 GHz oscillator PSD table",
            psd={"kind": "table", "file": "oscillator_3p4ghz.csv"},
            sequence=_SEQ_150,
            synthesis={"fir_order": LARGE_ORDER},
        ),
        "fig11": dict(
            figure="Fig. 11",
            description="12x50 ns/20 ns from |0>, 3 kHz bands weighted by the oscillator PSD +51 dB, 10 kHz-25 MHz",
            psd={
                "kind": "gaussian",
                "center_offset": 1e7,
                "fwhm_bandwidth": 3e3,
                "level_table": {"file": "oscillator_3p4ghz.csv", "scale_db": 51.0},
            },
            sequence=_SEQ_50,
            sweep={"parameter": "center_offset", "values": list(_SWEEP_LOW)},
            synthesis={"fir_order": LARGE_ORDER},
        ),
        "fig13a": dict(
            figure="Fig. 13 (top)",
            description="10x150 ns/60 ns from |0>, synthetic PSD (a): -60 dBc/Hz below 2 MHz",
            psd={"kind": "table", "file": "synthetic_a.csv"},
            sequence=_SEQ_150,
        ),
        "fig13b": dict(
            figure="Fig. 13 (bottom)",
            description="10x150 ns/60 ns from |0>, synthetic PSD (b): low plateau -20 dB, floor +40 dB",
            psd={"kind": "table", "file": "synthetic_b.csv"},
            sequence=_SEQ_150,
        ),
    }
)


def list_presets() -> dict[str, dict]:
    """``{name: {"figure": ..., "description": ...}}`` for every preset."""
    return {k: {"figure": v["figure"], "description": v["description"]} for k, v in _PRESETS.items()}


def get_preset(name: str, **overrides) -> ExperimentConfig:
    if name not in _PRESETS:
        raise ConfigError(f"config.preset: unknown preset {name!r} (see list-presets)")
    raw = _merge(dict(_PRESETS[name], name=name), overrides)
    return ExperimentConfig.from_dict(raw)
