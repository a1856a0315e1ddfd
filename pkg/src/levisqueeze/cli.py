"""Command-line front end for coefficient tables, propagation, protocol runs
and figure datasets.

Subcommands
-----------
coeffs     print the drift/diffusion/backaction coefficients at both trap
           frequencies, plus the momentum-heating budget in SI mode
propagate  relax a thermal state under the stiff-trap dynamics and write the
           sampled covariance trace
protocol   equilibrate, run the two-frequency drive, and write trace plus
           stroboscopic-asymptote datasets
figure     regenerate one of the benchmark datasets by id
sweep      like ``figure`` but with a custom grid/fixed block from the config

Exit codes are part of the contract: 0 on success, 2 for usage or
configuration errors, 3 when the requested protocol has no stroboscopic
steady state (spectral radius of the cycle map at or above one).

Configuration files are TOML (preferred) or JSON with flat sections
mirroring :class:`RunConfig`; command-line flags override file values.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence, Tuple

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import __version__
from .errors import ConfigError, SqueezeError
from .experiments import (
    Dataset,
    SweepSpec,
    ZETA_CONVENTIONS,
    dataset_filename,
    default_fig2_spec,
    default_fig3a_spec,
    default_fig3b_spec,
    default_fig3c_spec,
    default_fig4_spec,
    fig2_threshold,
    fig3_curves,
    fig4_experiment,
    plateau_squeezing,
    scenario_table,
    write_dataset_csv,
    write_dataset_json,
)
from .linalg import SymMat2
from .noise import (
    DynamicsCoefficients,
    PhysicalParams,
    build_matrices,
    coefficients,
    ground_state_variance,
    noise_breakdown,
)
from .propagate import (
    lyapunov_asymptote,
    lyapunov_propagate,
    riccati_asymptote,
    riccati_propagate,
)
from .protocol import DIVERGENT, build_schedule, cycle_map, protocol_asymptote

MODES = ("natural", "si")
FORMATS = ("csv", "json")
FIGURE_IDS = ("fig2", "fig3a", "fig3b", "fig3c", "fig4a", "fig4b", "scenario")

NATURAL_DEFAULTS: Mapping[str, float] = {
    "a1": 1.0,
    "a2": 1.0,
    "d1": 0.5,
    "d2": 0.5,
    "b": 3.0,
    "omega1": 0.75 * math.pi,
    "omega2": 1.5 * math.pi,
    "mass": 1.0,
    "hbar": 1.0,
}
RATE_DEFAULTS: Mapping[str, float] = {"gamma": 1.0e-6, "lam": 1.0e-6, "recoil": 1.0e26}
PROTOCOL_DEFAULTS: Mapping[str, float] = {
    "cycles": 12,
    "samples_per_segment": 25,
    "equilibration": 4.0,
}
PROPAGATE_DEFAULTS: Mapping[str, object] = {
    "kind": "riccati",
    "duration": None,
    "samples": 160,
}

_PHYSICAL_KEYS = {f.name for f in dataclasses.fields(PhysicalParams)}
_SECTION_KEYS = {
    "coefficients": set(NATURAL_DEFAULTS),
    "physical": _PHYSICAL_KEYS,
    "rates": set(RATE_DEFAULTS),
    "protocol": set(PROTOCOL_DEFAULTS),
    "measurement": {"efficiency", "backaction"},
    "output": {"format", "path", "seed"},
    "propagate": set(PROPAGATE_DEFAULTS),
    "sweep": {
        "figure",
        "variable",
        "start",
        "stop",
        "points",
        "scale",
        "values",
        "fixed",
        "convention",
    },
}


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration with command-line overrides applied."""

    mode: str = "natural"
    physical: Optional[PhysicalParams] = None
    coefficients: Mapping[str, float] = field(default_factory=lambda: dict(NATURAL_DEFAULTS))
    rates: Mapping[str, float] = field(default_factory=lambda: dict(RATE_DEFAULTS))
    protocol: Mapping[str, float] = field(default_factory=lambda: dict(PROTOCOL_DEFAULTS))
    measurement: Mapping[str, Optional[float]] = field(default_factory=dict)
    propagate: Mapping[str, object] = field(default_factory=lambda: dict(PROPAGATE_DEFAULTS))
    output: Mapping[str, object] = field(default_factory=dict)
    sweep: Mapping[str, object] = field(default_factory=dict)


def _require_number(section: str, key: str, value: object) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key} must be a number, got {value!r}")
    if not math.isfinite(float(value)):
        raise ConfigError(f"{section}.{key} must be finite, got {value!r}")
    return float(value)


def _checked_section(data: Mapping, name: str) -> dict:
    section = data.get(name, {})
    if not isinstance(section, Mapping):
        raise ConfigError(f"config section {name!r} must be a table")
    for key in section:
        if key not in _SECTION_KEYS[name]:
            raise ConfigError(f"unknown key {key!r} in config section {name!r}")
    return dict(section)


def load_run_config(
    path: Optional[str] = None,
    *,
    mode: Optional[str] = None,
    seed: Optional[int] = None,
    fmt: Optional[str] = None,
    out: Optional[str] = None,
) -> RunConfig:
    """Parse a TOML/JSON config file and fold in command-line overrides.

    Unknown sections or keys are rejected with a message naming the
    offending key.  ``mode`` decides which of the two parameter sections is
    legal: ``[coefficients]`` in natural units, ``[physical]`` in SI.
    """
    data: Mapping = {}
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file not found: {p}")
        if p.suffix.lower() == ".toml":
            data = tomllib.loads(p.read_text())
        elif p.suffix.lower() == ".json":
            data = json.loads(p.read_text())
        else:
            raise ConfigError(f"config must be .toml or .json, got {p.suffix!r}")
    for key in data:
        if key != "mode" and key not in _SECTION_KEYS:
            raise ConfigError(f"unknown config section {key!r}")

    mode_val = mode or data.get("mode", "natural")
    if mode_val not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode_val!r}")

    raw_coeffs = _checked_section(data, "coefficients")
    raw_physical = _checked_section(data, "physical")
    if mode_val == "si" and raw_coeffs:
        raise ConfigError("si mode takes a [physical] section, not [coefficients]")
    if mode_val == "natural" and raw_physical:
        raise ConfigError("natural mode takes a [coefficients] section, not [physical]")

    physical = None
    if mode_val == "si":
        physical = PhysicalParams(**raw_physical) if raw_physical else PhysicalParams.reference()

    coeff_vals = dict(NATURAL_DEFAULTS)
    for key, value in raw_coeffs.items():
        coeff_vals[key] = _require_number("coefficients", key, value)

    rates = dict(RATE_DEFAULTS)
    for key, value in _checked_section(data, "rates").items():
        rates[key] = _require_number("rates", key, value)
        if rates[key] < 0.0:
            raise ConfigError(f"rates.{key} must be nonnegative")

    protocol = dict(PROTOCOL_DEFAULTS)
    for key, value in _checked_section(data, "protocol").items():
        protocol[key] = _require_number("protocol", key, value)
    if protocol["cycles"] != int(protocol["cycles"]) or protocol["cycles"] < 0:
        raise ConfigError(f"protocol.cycles must be a nonnegative integer, got {protocol['cycles']!r}")
    if protocol["equilibration"] <= 0.0:
        raise ConfigError("protocol.equilibration must be positive")

    measurement: dict = {"efficiency": None, "backaction": None}
    for key, value in _checked_section(data, "measurement").items():
        measurement[key] = _require_number("measurement", key, value)
    if measurement["efficiency"] is not None and not (0.0 <= measurement["efficiency"] <= 1.0):
        raise ConfigError("measurement.efficiency must lie in [0, 1]")
    if measurement["backaction"] is not None and measurement["backaction"] < 0.0:
        raise ConfigError("measurement.backaction must be nonnegative")

    propagate = dict(PROPAGATE_DEFAULTS)
    propagate.update(_checked_section(data, "propagate"))
    if propagate["kind"] not in ("lyapunov", "riccati"):
        raise ConfigError(f"propagate.kind must be lyapunov or riccati, got {propagate['kind']!r}")
    if propagate["duration"] is not None:
        if _require_number("propagate", "duration", propagate["duration"]) <= 0.0:
            raise ConfigError("propagate.duration must be positive")
    samples = propagate["samples"]
    if not isinstance(samples, int) or isinstance(samples, bool) or samples < 1:
        raise ConfigError(f"propagate.samples must be a positive integer, got {samples!r}")

    raw_output = _checked_section(data, "output")
    fmt_val = fmt or raw_output.get("format", "csv")
    if fmt_val not in FORMATS:
        raise ConfigError(f"output.format must be one of {FORMATS}, got {fmt_val!r}")
    seed_val = seed if seed is not None else raw_output.get("seed")
    if seed_val is not None:
        if not isinstance(seed_val, int) or isinstance(seed_val, bool) or seed_val < 0:
            raise ConfigError(f"output.seed must be a nonnegative integer, got {seed_val!r}")
    output = {
        "format": fmt_val,
        "path": out if out is not None else raw_output.get("path"),
        "seed": seed_val,
    }

    return RunConfig(
        mode=mode_val,
        physical=physical,
        coefficients=coeff_vals,
        rates=rates,
        protocol=protocol,
        measurement=measurement,
        propagate=propagate,
        output=output,
        sweep=_checked_section(data, "sweep"),
    )


# ---------------------------------------------------------------------------
# shared plumbing


def _config_pair(cfg: RunConfig) -> Tuple[DynamicsCoefficients, DynamicsCoefficients]:
    """Coefficient sets at the soft and stiff trap frequencies."""
    if cfg.mode == "si":
        params = cfg.physical or PhysicalParams.reference()
        if cfg.measurement["efficiency"] is not None:
            params = dataclasses.replace(params, efficiency=cfg.measurement["efficiency"])
        kwargs = dict(
            gamma=cfg.rates["gamma"], lam=cfg.rates["lam"], recoil=cfg.rates["recoil"]
        )
        c1 = coefficients(params, params.omega1, **kwargs)
        c2 = coefficients(params, params.omega2, **kwargs)
    else:
        v = cfg.coefficients
        c1 = DynamicsCoefficients(
            a1=v["a1"], a2=v["a2"], d1=v["d1"], d2=v["d2"], b=v["b"],
            omega=v["omega1"], mass=v["mass"], hbar=v["hbar"],
        )
        c2 = dataclasses.replace(c1, omega=v["omega2"])
    if cfg.measurement["backaction"] is not None:
        c1 = dataclasses.replace(c1, b=cfg.measurement["backaction"])
        c2 = dataclasses.replace(c2, b=cfg.measurement["backaction"])
    return c1, c2


def _emit(dataset: Dataset, cfg: RunConfig) -> Path:
    """Stamp the seed into the metadata and write the dataset file."""
    ds = Dataset(
        columns=dataset.columns,
        metadata={**dataset.metadata, "seed": cfg.output["seed"]},
    )
    out_dir = Path(cfg.output["path"] or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    fmt = cfg.output["format"]
    path = out_dir / dataset_filename(ds, fmt)
    if fmt == "csv":
        write_dataset_csv(ds, path)
    else:
        write_dataset_json(ds, path)
    print(f"wrote {path}")
    return path


def _print_coeff_block(label: str, c: DynamicsCoefficients) -> None:
    print(f"coefficients at {label} = {c.omega:.6e} rad/s:")
    for name in ("a1", "a2", "d1", "d2", "b"):
        print(f"  {name:<2} = {getattr(c, name):.6e}")


def _ground_xx(c: DynamicsCoefficients) -> float:
    return ground_state_variance(c.omega, c.mass, c.hbar)


def _sym_fields(s: SymMat2) -> str:
    return f"xx = {s.xx:.6e}, xp = {s.xp:.6e}, pp = {s.pp:.6e}"


# ---------------------------------------------------------------------------
# subcommands


def cmd_coeffs(cfg: RunConfig, args: argparse.Namespace) -> int:
    c1, c2 = _config_pair(cfg)
    print(f"mode: {cfg.mode}")
    _print_coeff_block("omega1", c1)
    _print_coeff_block("omega2", c2)
    metadata = {
        "figure": "coeffs",
        "parameters": {"mode": cfg.mode, **{k: getattr(c2, k) for k in ("mass", "hbar")}},
        "tool_version": __version__,
    }
    if cfg.mode == "si":
        params = cfg.physical or PhysicalParams.reference()
        nb = noise_breakdown(
            params,
            params.omega1,
            gamma=cfg.rates["gamma"],
            lam=cfg.rates["lam"],
            recoil=cfg.rates["recoil"],
        )
        localization = nb.localization_thermal + nb.localization_vacuum
        print("momentum heating budget d2 (SI, soft trap):")
        print(f"  gas collisions   {nb.gas:.6e}")
        print(f"  localization     {localization:.6e}")
        print(f"  photon recoil    {nb.recoil:.6e}")
        metadata["d2_budget"] = {
            "gas": nb.gas,
            "localization": localization,
            "recoil": nb.recoil,
        }
    if cfg.output["path"] is not None:
        table = Dataset(
            columns={
                "omega": [c1.omega, c2.omega],
                "a1": [c1.a1, c2.a1],
                "a2": [c1.a2, c2.a2],
                "d1": [c1.d1, c2.d1],
                "d2": [c1.d2, c2.d2],
                "b": [c1.b, c2.b],
            },
            metadata=metadata,
        )
        _emit(table, cfg)
    return 0


def cmd_propagate(cfg: RunConfig, args: argparse.Namespace) -> int:
    c1, c2 = _config_pair(cfg)
    kind = cfg.propagate["kind"]
    duration = cfg.propagate["duration"]
    if duration is None:
        # a few relaxation times of the covariance envelope
        duration = 4.0 if cfg.mode == "natural" else 3.0 / (c2.a1 + c2.a2)
    samples = cfg.propagate["samples"]
    drift1, diff1, _ = build_matrices(dataclasses.replace(c1, b=0.0))
    drift2, diff2, meas2 = build_matrices(c2)
    start = lyapunov_asymptote(drift1, diff1)
    times = [duration * i / samples for i in range(samples + 1)]
    rows = []
    for t in times:
        if kind == "lyapunov":
            rows.append(lyapunov_propagate(start, drift2, diff2, t))
        else:
            rows.append(riccati_propagate(start, drift2, diff2, meas2, t))
    dataset = Dataset(
        columns={
            "time": times,
            "xx": [s.xx for s in rows],
            "xp": [s.xp for s in rows],
            "pp": [s.pp for s in rows],
        },
        metadata={
            "figure": "propagate",
            "parameters": {
                "mode": cfg.mode,
                "kind": kind,
                "duration": duration,
                "samples": samples,
                "a1": c2.a1,
                "a2": c2.a2,
                "d1": c2.d1,
                "d2": c2.d2,
                "b": c2.b if kind == "riccati" else 0.0,
                "omega": c2.omega,
            },
            "tool_version": __version__,
        },
    )
    print(f"{kind} propagation over t = {duration:.6e} from the soft-trap steady state")
    print(f"final state: {_sym_fields(rows[-1])}")
    _emit(dataset, cfg)
    return 0


def cmd_protocol(cfg: RunConfig, args: argparse.Namespace) -> int:
    c1, c2 = _config_pair(cfg)
    cycles = int(cfg.protocol["cycles"])
    dense = int(cfg.protocol["samples_per_segment"])
    sched = build_schedule(c1, c2, cycles=max(cycles, 1))
    lang_map = cycle_map(c1, c2, sched, kind="langevin")
    ricc_map = cycle_map(c1, c2, sched, kind="riccati")
    lang_asym = protocol_asymptote(lang_map)
    ricc_asym = protocol_asymptote(ricc_map)
    ground = _ground_xx(c2)

    if cycles > 0 and ricc_asym is DIVERGENT:
        print(
            "error: the driven protocol has no stroboscopic steady state "
            "(cycle-map spectral radius >= 1, even with the configured "
            "measurement); nothing to converge to",
            file=sys.stderr,
        )
        return 3

    drift1, diff1, _ = build_matrices(dataclasses.replace(c1, b=0.0))
    drift2, diff2, meas2 = build_matrices(c2)
    if cfg.mode == "natural":
        eq_end = float(cfg.protocol["equilibration"])
        start = lyapunov_asymptote(drift1, diff1)
        n_eq = 160
        times = [eq_end * i / n_eq for i in range(n_eq + 1)]
        xx_lang = [lyapunov_propagate(start, drift2, diff2, t).xx for t in times]
        xx_ricc = [riccati_propagate(start, drift2, diff2, meas2, t).xx for t in times]
        lang_state = lyapunov_propagate(start, drift2, diff2, eq_end)
        ricc_state = riccati_propagate(start, drift2, diff2, meas2, eq_end)
    else:
        # SI damping times dwarf the drive period; equilibrate analytically
        eq_end = 0.0
        lang_state = lyapunov_asymptote(drift2, diff2)
        ricc_state = riccati_asymptote(drift2, diff2, meas2) if c2.b > 0 else lang_state
        times = [0.0]
        xx_lang = [lang_state.xx]
        xx_ricc = [ricc_state.xx]

    if cycles == 0:
        print("zero cycles requested; reporting the equilibrated states only")
        print(f"equilibrated (unconditional): {_sym_fields(lang_state)}")
        print(f"equilibrated (monitored):     {_sym_fields(ricc_state)}")
    else:
        lang_path = lang_map.iterate(lang_state, cycles, samples_per_segment=dense)
        ricc_path = ricc_map.iterate(ricc_state, cycles, samples_per_segment=dense)
        for (t_l, s_l), (_, s_r) in zip(lang_path[1:], ricc_path[1:]):
            times.append(eq_end + t_l)
            xx_lang.append(s_l.xx)
            xx_ricc.append(s_r.xx)
        zeta = plateau_squeezing(ricc_map, ricc_state, ground)
        print(f"ran {cycles} cycles after equilibration (t = {eq_end:.3e})")
        print(f"final xx: unconditional {xx_lang[-1]:.6e}, monitored {xx_ricc[-1]:.6e}")
        print(f"ground-state xx at the stiff trap: {ground:.6e}")
        print(f"plateau squeezing ratio (monitored): zeta = {zeta:.6f}")

    parameters = {
        "mode": cfg.mode,
        "cycles": cycles,
        "samples_per_segment": dense,
        "equilibration": eq_end,
        "a1": c2.a1,
        "a2": c2.a2,
        "d1": c2.d1,
        "d2": c2.d2,
        "b": c2.b,
        "omega1": c1.omega,
        "omega2": c2.omega,
    }
    trace = Dataset(
        columns={"time": times, "xx_langevin": xx_lang, "xx_riccati": xx_ricc},
        metadata={
            "figure": "protocol",
            "parameters": parameters,
            "ground_xx": ground,
            "tool_version": __version__,
        },
    )
    _emit(trace, cfg)
    if cycles > 0:
        lang_row = lang_asym if lang_asym is not DIVERGENT else None
        ricc_row = ricc_asym  # checked finite above
        asymptotes = Dataset(
            columns={
                "backaction": [0.0, c2.b],
                "xx": [lang_row.xx if lang_row else math.inf, ricc_row.xx],
                "xp": [lang_row.xp if lang_row else math.inf, ricc_row.xp],
                "pp": [lang_row.pp if lang_row else math.inf, ricc_row.pp],
            },
            metadata={
                "figure": "protocol-asymptote",
                "parameters": parameters,
                "ground_xx": ground,
                "tool_version": __version__,
            },
        )
        _emit(asymptotes, cfg)
        if lang_asym is DIVERGENT:
            print("note: the unmonitored protocol diverges; asymptote recorded as inf")
    return 0


def _respaced(spec: SweepSpec, points: Optional[int], log: bool) -> SweepSpec:
    if points is None or points == len(spec.grid):
        return spec
    if points < 2:
        raise ConfigError(f"--points must be at least 2, got {points}")
    lo, hi = spec.grid[0], spec.grid[-1]
    if log:
        grid = tuple(lo * (hi / lo) ** (i / (points - 1)) for i in range(points))
    else:
        grid = tuple(lo + (hi - lo) * i / (points - 1) for i in range(points))
    return SweepSpec(
        variable=spec.variable, grid=grid, fixed=spec.fixed, mode=spec.mode, outputs=spec.outputs
    )


def _squeezed_fraction(values: Sequence[float]) -> float:
    return sum(1 for v in values if v < 1.0) / len(values)


def _figure_dataset(
    fig_id: str,
    points: Optional[int],
    convention: str,
    spec: Optional[SweepSpec] = None,
) -> Tuple[Dataset, str]:
    """Build the dataset for one figure id plus its one-line summary."""
    if fig_id == "fig2":
        ds = fig2_threshold(spec or _respaced(default_fig2_spec(), points, log=False))
        thr = ds.metadata["threshold_a1"]
        return ds, f"summary: momentum squeeze-rate root a1* = {thr:.6f} +/- 1.0e-04"
    if fig_id == "fig3a":
        ds = fig3_curves(spec or _respaced(default_fig3a_spec(), points, log=False), part="a")
        return ds, (
            "summary: stiff-trap unconditional floor xx = "
            f"{ds.metadata['stiff_trap_floor_xx']:.6f}, ground xx = {ds.metadata['ground_xx']:.6f}"
        )
    if fig_id == "fig3b":
        ds = fig3_curves(spec or default_fig3b_spec(), part="b")
        return ds, (
            f"summary: final xx monitored {ds.columns['xx_riccati'][-1]:.6f}"
            f" < unconditional {ds.columns['xx_langevin'][-1]:.6f}"
            f" < ground {ds.metadata['ground_xx']:.6f}"
        )
    if fig_id == "fig3c":
        ds = fig3_curves(spec or _respaced(default_fig3c_spec(), points, log=False), part="c")
        fracs = {
            b: _squeezed_fraction(ds.columns[f"ratio_b{b}"]) for b in (0, 3, 5)
        }
        return ds, (
            "summary: squeezed cell fraction "
            + ", ".join(f"b={b}: {frac:.2f}" for b, frac in fracs.items())
        )
    if fig_id in ("fig4a", "fig4b"):
        full = fig4_experiment(
            spec or _respaced(default_fig4_spec(), points, log=True), convention=convention
        )
        if fig_id == "fig4a":
            ds = Dataset(
                columns={
                    name: full.columns[name]
                    for name in ("Q", "d2_gas", "d2_localization", "d2_recoil")
                },
                metadata={**full.metadata, "figure": "fig4a"},
            )
            cross = ds.metadata["gas_recoil_crossover_Q"]
            return ds, f"summary: gas and recoil heating cross at Q = {cross:.3e}"
        zeta_names = [name for name in full.columns if name.startswith("zeta_")]
        ds = Dataset(
            columns={name: full.columns[name] for name in ["Q", *zeta_names]},
            metadata={**full.metadata, "figure": "fig4b"},
        )
        tail = ", ".join(f"{name} = {ds.columns[name][-1]:.4f}" for name in zeta_names)
        return ds, f"summary: at Q = {ds.columns['Q'][-1]:.1e}: {tail}"
    if fig_id == "scenario":
        ds = scenario_table()
        ground_nm2 = ds.columns["ground_xx"][0] * 1e18
        spreads = ", ".join(
            f"{xx * 1e12:.4e} um^2 at recoil {recoil:.0e}"
            for recoil, xx in zip(ds.columns["recoil"], ds.columns["initial_xx"])
        )
        return ds, (
            f"summary: ground-state xx = {ground_nm2:.4e} nm^2; pre-drive xx = {spreads}"
        )
    raise ConfigError(f"unknown figure id {fig_id!r}")


def cmd_figure(cfg: RunConfig, args: argparse.Namespace) -> int:
    convention = args.convention or "plateau"
    ds, summary = _figure_dataset(args.figure_id, args.points, convention)
    _emit(ds, cfg)
    print(summary)
    return 0


def cmd_sweep(cfg: RunConfig, args: argparse.Namespace) -> int:
    sw = dict(cfg.sweep)
    if not sw:
        raise ConfigError("sweep requires a [sweep] section in the config file")
    fig_id = sw.get("figure")
    if fig_id == "scenario":
        raise ConfigError("scenario is a fixed table; nothing to sweep")
    if fig_id not in FIGURE_IDS:
        raise ConfigError(f"sweep.figure must be one of {FIGURE_IDS[:-1]}, got {fig_id!r}")
    base = {
        "fig2": default_fig2_spec,
        "fig3a": default_fig3a_spec,
        "fig3b": default_fig3b_spec,
        "fig3c": default_fig3c_spec,
        "fig4a": default_fig4_spec,
        "fig4b": default_fig4_spec,
    }[fig_id]()

    if "values" in sw:
        grid = tuple(_require_number("sweep", "values", v) for v in sw["values"])
    elif {"start", "stop", "points"} <= set(sw):
        lo = _require_number("sweep", "start", sw["start"])
        hi = _require_number("sweep", "stop", sw["stop"])
        n = sw["points"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 2:
            raise ConfigError(f"sweep.points must be an integer >= 2, got {n!r}")
        scale = sw.get("scale", "log" if base.mode == "si" else "lin")
        if scale == "log":
            if lo <= 0.0 or hi <= 0.0:
                raise ConfigError("sweep.scale = 'log' needs positive start/stop")
            grid = tuple(lo * (hi / lo) ** (i / (n - 1)) for i in range(n))
        elif scale == "lin":
            grid = tuple(lo + (hi - lo) * i / (n - 1) for i in range(n))
        else:
            raise ConfigError(f"sweep.scale must be lin or log, got {scale!r}")
    else:
        grid = base.grid

    fixed = dict(base.fixed)
    fixed.update(sw.get("fixed", {}))
    spec = SweepSpec(
        variable=sw.get("variable", base.variable),
        grid=grid,
        fixed=fixed,
        mode=base.mode,
        outputs=base.outputs,
    )
    convention = sw.get("convention", "plateau")
    if convention not in ZETA_CONVENTIONS:
        raise ConfigError(f"sweep.convention must be one of {ZETA_CONVENTIONS}, got {convention!r}")
    ds, summary = _figure_dataset(fig_id, None, convention, spec=spec)
    _emit(ds, cfg)
    print(summary)
    return 0


# ---------------------------------------------------------------------------
# parser and entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="TOML or JSON run configuration")
    common.add_argument("--seed", type=int, help="seed recorded in dataset metadata")
    common.add_argument("--format", dest="fmt", choices=FORMATS, help="dataset file format")
    common.add_argument("--out", metavar="DIR", help="directory for dataset files")
    common.add_argument("--mode", choices=MODES, help="unit system override")

    parser = argparse.ArgumentParser(
        prog="levisqueeze",
        description="conditional Gaussian dynamics of a monitored mechanical mode",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser(
        "coeffs", parents=[common], help="print drift/diffusion/backaction coefficients"
    ).set_defaults(func=cmd_coeffs)
    sub.add_parser(
        "propagate", parents=[common], help="relax a thermal state in the stiff trap"
    ).set_defaults(func=cmd_propagate)
    sub.add_parser(
        "protocol", parents=[common], help="run the two-frequency drive to its asymptote"
    ).set_defaults(func=cmd_protocol)

    fig = sub.add_parser("figure", parents=[common], help="regenerate a benchmark dataset")
    fig.add_argument("figure_id", choices=FIGURE_IDS, help="dataset to build")
    fig.add_argument("--points", type=int, help="grid resolution override")
    fig.add_argument(
        "--convention", choices=ZETA_CONVENTIONS, help="squeezing-ratio stopping rule"
    )
    fig.set_defaults(func=cmd_figure)

    sub.add_parser(
        "sweep", parents=[common], help="build a dataset over a custom grid"
    ).set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_run_config(
            args.config, mode=args.mode, seed=args.seed, fmt=args.fmt, out=args.out
        )
        return args.func(cfg, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SqueezeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
