"""Command-line front end: presets, CSV/manifest outputs, bit-stable reruns.

Commands: ``evolve`` (master-equation probability frames), ``trajectory``
(single stochastic trajectories with jump-event logs), ``sweep`` (disorder
ensembles and power-law fits), ``rabi`` (two-site transfer-amplitude tables),
and ``rerun`` (replay a manifest byte-for-byte).

Configuration precedence: built-in defaults < preset < JSON config file
(flat keys, same names as the long flags) < explicit flags.  Every simulation
command writes a manifest JSON with the fully resolved configuration and
seeds, sufficient to reproduce each output file exactly.  All rates and times
are in units of the coupling (g = 1 internally).  The default output
directory comes from $SPINCHAIN_OUTDIR, falling back to the working directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .dynamics import IntegrationError, NoiseModel, default_time_step
from .ensemble import SweepConfig, run_realization, run_sweep
from .lattice import ChainSpec, build_hamiltonian, rabi_amplitude_sq, sample_disorder
from .observables import MsdSeries, boundary_mass, fit_power_law
from .seeds import derive_seed
from .trajectories import run_dephasing_trajectory, run_hopping_trajectory

BOUNDARY_WARN = 1e-3

# preset parameter grids; rows share a disorder realization across columns
PRESETS = {
    "fig3a": {
        "command": "evolve", "n_sites": 201, "t_final": 20.0,
        "deltas": [0.0, 0.5, 1.0, 10.0], "gammas": [0.0], "big_gammas": [0.0],
    },
    "fig3b": {
        "command": "evolve", "n_sites": 201, "t_final": 20.0,
        "deltas": [0.0, 0.5, 1.0, 10.0], "gammas": [0.1, 1.0, 10.0], "big_gammas": [0.0],
    },
    "fig3c": {
        "command": "evolve", "n_sites": 201, "t_final": 20.0,
        "deltas": [0.0, 0.5, 1.0, 10.0], "gammas": [0.0], "big_gammas": [0.1, 1.0, 10.0],
    },
    "fig4a": {
        "command": "trajectory", "n_sites": 81, "t_final": 20.0,
        "deltas": [0.0, 0.5, 1.0, 10.0], "gammas": [0.0], "big_gammas": [0.0],
        "n_trajectories": 1,
    },
    "fig4b": {
        "command": "trajectory", "n_sites": 81, "t_final": 20.0,
        "deltas": [0.0, 0.5, 1.0, 10.0], "gammas": [0.1, 1.0, 10.0], "big_gammas": [0.0],
        "n_trajectories": 1,
    },
    "fig4c": {
        "command": "trajectory", "n_sites": 81, "t_final": 20.0,
        "deltas": [0.0, 0.5, 1.0, 10.0], "gammas": [0.0], "big_gammas": [0.1, 1.0, 10.0],
        "n_trajectories": 1,
    },
    "fig6": {
        "command": "trajectory", "n_sites": 81, "t_final": 20.0,
        "deltas": [1.0], "gammas": [1.0], "big_gammas": [0.0],
        "n_trajectories": 10,
    },
    "fig5": {
        "command": "sweep", "n_sites": 201, "t_final": 20.0,
        "deltas": [0.0, 0.5, 1.0, 2.0, 10.0], "gammas": [0.1, 1.0, 10.0],
        "big_gammas": [0.1, 1.0, 10.0], "n_disorder": 100,
    },
}

_COMMON_DEFAULTS = {
    "n_sites": 201,
    "delta": 0.0,
    "gamma": 0.0,
    "big_gamma": 0.0,
    "deltas": None,
    "gammas": None,
    "big_gammas": None,
    "t_final": 20.0,
    "dt": None,
    "n_samples": 201,
    "initial_site": None,
    "seed": 0,
    "out_dir": None,
    "prefix": None,
    "margin": 5,
    "threads": 1,
}


class CliError(Exception):
    pass


def _fmt_t(t: float) -> str:
    return f"{t:.9g}"


def _fmt_p(p: float) -> str:
    return f"{p:.8e}"


def _ftag(v: float) -> str:
    return f"{v:g}"


def write_frames_csv(path, times, frames):
    n = frames.shape[1]
    with open(path, "w", newline="\n") as fh:
        fh.write("t," + ",".join(f"site_{j}" for j in range(n)) + "\n")
        for t, row in zip(times, frames):
            fh.write(_fmt_t(t) + "," + ",".join(_fmt_p(p) for p in row) + "\n")


def write_events_csv(path, events):
    with open(path, "w", newline="\n") as fh:
        fh.write("t,kind,site_or_pair\n")
        for ev in events:
            tag = str(ev.site) if ev.target is None else f"{ev.site}->{ev.target}"
            fh.write(f"{_fmt_t(ev.time)},{ev.kind},{tag}\n")


def write_msd_csv(path, series: MsdSeries):
    with open(path, "w", newline="\n") as fh:
        fh.write("t,msd\n")
        for t, v in zip(series.times, series.values):
            fh.write(f"{_fmt_t(t)},{_fmt_p(v)}\n")


def _write_manifest(path, command, cfg, runs, outputs, warnings_list, started, t0):
    manifest = {
        "tool": "spinchain",
        "version": __version__,
        "command": command,
        "master_seed": cfg["seed"],
        "config": cfg,
        "runs": runs,
        "outputs": outputs,
        "warnings": warnings_list,
        "wall_clock": {
            "started_utc": started,
            "seconds": round(time.perf_counter() - t0, 3),
        },
    }
    with open(path, "w", newline="\n") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _resolve(cmd: str, flags: dict, extra_defaults: dict | None = None) -> dict:
    """defaults < preset < config file < explicit flags."""
    cfg = dict(_COMMON_DEFAULTS)
    if extra_defaults:
        cfg.update(extra_defaults)
    preset_name = flags.get("preset")
    config_path = flags.get("config")
    file_cfg = {}
    if config_path:
        try:
            with open(config_path) as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"cannot read config file {config_path}: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise CliError(f"config file {config_path} must hold a JSON object")
        preset_name = file_cfg.get("preset", preset_name)
    if preset_name:
        if preset_name not in PRESETS:
            raise CliError(f"unknown preset {preset_name!r}; have {sorted(PRESETS)}")
        preset = PRESETS[preset_name]
        if preset["command"] != cmd:
            raise CliError(f"preset {preset_name!r} belongs to the {preset['command']!r} command")
        cfg.update({k: v for k, v in preset.items() if k != "command"})
        cfg["preset"] = preset_name
    unknown = set(file_cfg) - set(cfg) - {"preset"}
    if unknown:
        raise CliError(f"unknown config keys: {sorted(unknown)}")
    cfg.update({k: v for k, v in file_cfg.items() if k != "preset"})
    cfg.update({k: v for k, v in flags.items() if v is not None and k not in ("preset", "config")})
    if cfg.get("out_dir") is None:
        cfg["out_dir"] = os.environ.get("SPINCHAIN_OUTDIR", ".")
    return cfg


def _run_list(cfg: dict):
    """Expand (deltas x gammas x big_gammas) into run parameter triples."""
    deltas = cfg.get("deltas") or [cfg["delta"]]
    gammas = cfg.get("gammas") or [cfg["gamma"]]
    big_gammas = cfg.get("big_gammas") or [cfg["big_gamma"]]
    runs = []
    for d in deltas:
        for g in gammas:
            for bg in big_gammas:
                runs.append((float(d), float(g), float(bg)))
    return runs


def _chain_spec(cfg, delta, gamma, big_gamma):
    init = cfg["initial_site"]
    return ChainSpec(
        n_sites=int(cfg["n_sites"]),
        g=1.0,
        delta=delta,
        gamma=gamma,
        big_gamma=big_gamma,
        initial_site=int(init) if init is not None else -1,
    )


def cmd_evolve(flags: dict) -> int:
    t0 = time.perf_counter()
    started = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    cfg = _resolve("evolve", flags)
    out_dir = cfg["out_dir"]
    os.makedirs(out_dir, exist_ok=True)
    prefix = cfg["prefix"] or cfg.get("preset") or "evolve"
    runs_out, outputs, warn_list = [], [], []
    for delta, gamma, big_gamma in _run_list(cfg):
        spec = _chain_spec(cfg, delta, gamma, big_gamma)
        model = NoiseModel.from_rates(gamma, big_gamma)
        dseed = derive_seed(cfg["seed"], "disorder", delta)
        dt = cfg["dt"] or default_time_step(1.0, gamma, big_gamma, delta)
        sample_times = np.linspace(0.0, cfg["t_final"], int(cfg["n_samples"]))
        times, frames, _diag = run_realization(
            spec, model, dseed, cfg["t_final"], dt, sample_times
        )
        name = f"{prefix}_delta{_ftag(delta)}_gamma{_ftag(gamma)}_hop{_ftag(big_gamma)}.csv"
        path = os.path.join(out_dir, name)
        write_frames_csv(path, times, frames)
        outputs.append(name)
        edge = boundary_mass(frames[-1], int(cfg["margin"]))
        tripped = edge > BOUNDARY_WARN
        if tripped:
            msg = f"run {name}: boundary mass {edge:.3e} exceeds {BOUNDARY_WARN:g}"
            print(f"warning: {msg}", file=sys.stderr)
            warn_list.append(msg)
        runs_out.append(
            {
                "delta": delta, "gamma": gamma, "big_gamma": big_gamma,
                "n_sites": spec.n_sites, "dt": dt, "disorder_seed": dseed,
                "frames": name, "boundary_mass_final": edge, "boundary_warning": tripped,
            }
        )
    manifest_name = f"{prefix}_manifest.json"
    _write_manifest(
        os.path.join(out_dir, manifest_name), "evolve", cfg, runs_out,
        outputs, warn_list, started, t0,
    )
    print(f"wrote {len(outputs)} frames files + {manifest_name} in {out_dir}")
    return 0


def cmd_trajectory(flags: dict) -> int:
    t0 = time.perf_counter()
    started = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    cfg = _resolve("trajectory", flags, {"n_trajectories": 1})
    out_dir = cfg["out_dir"]
    os.makedirs(out_dir, exist_ok=True)
    prefix = cfg["prefix"] or cfg.get("preset") or "trajectory"
    runs_out, outputs, warn_list = [], [], []
    for delta, gamma, big_gamma in _run_list(cfg):
        if gamma > 0 and big_gamma > 0:
            raise CliError("trajectories support one noise channel at a time")
        spec = _chain_spec(cfg, delta, gamma, big_gamma)
        dseed = derive_seed(cfg["seed"], "disorder", delta)
        disorder = sample_disorder(spec, dseed)
        h = build_hamiltonian(spec, disorder)
        dt = cfg["dt"] or default_time_step(1.0, gamma, big_gamma, delta)
        sample_times = np.linspace(0.0, cfg["t_final"], int(cfg["n_samples"]))
        psi0 = np.zeros(spec.n_sites, dtype=complex)
        psi0[spec.initial_site] = 1.0
        for k in range(int(cfg["n_trajectories"])):
            tseed = derive_seed(cfg["seed"], "traj", delta, gamma, big_gamma, k)
            if big_gamma > 0:
                rec = run_hopping_trajectory(
                    psi0, h, big_gamma, cfg["t_final"], dt, tseed, sample_times
                )
            else:
                rec = run_dephasing_trajectory(
                    psi0, h, gamma, cfg["t_final"], dt, tseed, sample_times
                )
            stem = (
                f"{prefix}_delta{_ftag(delta)}_gamma{_ftag(gamma)}"
                f"_hop{_ftag(big_gamma)}_traj{k:02d}"
            )
            frames_name = stem + ".csv"
            events_name = stem + "_events.csv"
            write_frames_csv(os.path.join(out_dir, frames_name), rec.times,
                             rec.site_probability_frames)
            write_events_csv(os.path.join(out_dir, events_name), rec.events)
            outputs += [frames_name, events_name]
            edge = boundary_mass(rec.site_probability_frames[-1], int(cfg["margin"]))
            tripped = edge > BOUNDARY_WARN
            if tripped:
                msg = f"run {frames_name}: boundary mass {edge:.3e} exceeds {BOUNDARY_WARN:g}"
                print(f"warning: {msg}", file=sys.stderr)
                warn_list.append(msg)
            runs_out.append(
                {
                    "delta": delta, "gamma": gamma, "big_gamma": big_gamma,
                    "n_sites": spec.n_sites, "dt": dt, "disorder_seed": dseed,
                    "trajectory_seed": tseed, "trajectory_index": k,
                    "frames": frames_name, "events": events_name,
                    "n_events": len(rec.events),
                    "boundary_mass_final": edge, "boundary_warning": tripped,
                }
            )
    manifest_name = f"{prefix}_manifest.json"
    _write_manifest(
        os.path.join(out_dir, manifest_name), "trajectory", cfg, runs_out,
        outputs, warn_list, started, t0,
    )
    print(f"wrote {len(outputs)} files + {manifest_name} in {out_dir}")
    return 0


def cmd_sweep(flags: dict) -> int:
    t0 = time.perf_counter()
    started = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    cfg = _resolve(
        "sweep",
        flags,
        {
            "n_disorder": 100,
            "n_trajectories": 0,
            "fit_window": [5.0, 20.0],
            "synthetic": None,
            "deltas": None,
            "gammas": None,
            "big_gammas": None,
        },
    )
    out_dir = cfg["out_dir"]
    os.makedirs(out_dir, exist_ok=True)
    prefix = cfg["prefix"] or cfg.get("preset") or "sweep"
    fits_name = f"{prefix}_fits.csv"
    outputs, runs_out, warn_list = [fits_name], [], []
    window = tuple(float(x) for x in cfg["fit_window"])
    rows = []
    all_valid = True

    if cfg["synthetic"]:
        try:
            c_in, alpha_in = (float(x) for x in str(cfg["synthetic"]).split(","))
        except ValueError as exc:
            raise CliError(f"--synthetic wants 'c,alpha', got {cfg['synthetic']!r}") from exc
        times = np.linspace(0.0, cfg["t_final"], int(cfg["n_samples"]))[1:]
        series = MsdSeries(times=times, values=c_in * times**alpha_in, origin=0)
        fit = fit_power_law(series, window)
        name = f"{prefix}_msd_synthetic.csv"
        write_msd_csv(os.path.join(out_dir, name), series)
        outputs.append(name)
        rows.append((0.0, 0.0, 0.0, fit.c, fit.alpha, fit.rms_log_residual, 1))
        runs_out.append({"synthetic": [c_in, alpha_in], "msd": name})
    else:
        points = []
        for d in cfg["deltas"] or [cfg["delta"]]:
            for g in cfg["gammas"] or []:
                points.append((float(d), float(g), 0.0))
            for bg in cfg["big_gammas"] or []:
                points.append((float(d), 0.0, float(bg)))
            if not cfg["gammas"] and not cfg["big_gammas"]:
                points.append((float(d), cfg["gamma"], cfg["big_gamma"]))
        sweep_cfg = SweepConfig(
            base=_chain_spec(cfg, 0.0, 0.0, 0.0),
            points=tuple(points),
            n_disorder=int(cfg["n_disorder"]),
            n_trajectories=int(cfg["n_trajectories"]),
            t_final=float(cfg["t_final"]),
            dt=cfg["dt"],
            n_samples=int(cfg["n_samples"]),
            master_seed=int(cfg["seed"]),
            fit_window=window,
            boundary_margin=int(cfg["margin"]),
            workers=int(cfg["threads"]),
        )
        result = run_sweep(sweep_cfg)
        for pt in result.points:
            name = (
                f"{prefix}_msd_delta{_ftag(pt.delta)}_gamma{_ftag(pt.gamma)}"
                f"_hop{_ftag(pt.big_gamma)}.csv"
            )
            write_msd_csv(os.path.join(out_dir, name), pt.msd)
            outputs.append(name)
            if pt.fit is not None:
                rows.append(
                    (pt.delta, pt.gamma, pt.big_gamma, pt.fit.c, pt.fit.alpha,
                     pt.fit.rms_log_residual, int(pt.valid))
                )
            else:
                rows.append(
                    (pt.delta, pt.gamma, pt.big_gamma, float("nan"), float("nan"),
                     float("nan"), 0)
                )
            if pt.n_boundary_flagged:
                msg = (
                    f"point (delta={pt.delta:g}, gamma={pt.gamma:g}, hop={pt.big_gamma:g}): "
                    f"{pt.n_boundary_flagged} realizations tripped the boundary guard"
                )
                print(f"warning: {msg}", file=sys.stderr)
                warn_list.append(msg)
            all_valid = all_valid and pt.valid
            runs_out.append(
                {
                    "delta": pt.delta, "gamma": pt.gamma, "big_gamma": pt.big_gamma,
                    "msd": name, "n_failed": pt.n_failed,
                    "n_boundary_flagged": pt.n_boundary_flagged, "valid": pt.valid,
                    "elapsed_seconds": round(pt.elapsed_seconds, 3),
                }
            )

    with open(os.path.join(out_dir, fits_name), "w", newline="\n") as fh:
        fh.write("delta,gamma,big_gamma,c,alpha,rms_log_residual,valid\n")
        for d, g, bg, c, a, r, v in rows:
            fh.write(
                f"{_ftag(d)},{_ftag(g)},{_ftag(bg)},{_fmt_p(c)},{_fmt_p(a)},{_fmt_p(r)},{v}\n"
            )
    manifest_name = f"{prefix}_manifest.json"
    _write_manifest(
        os.path.join(out_dir, manifest_name), "sweep", cfg, runs_out,
        outputs, warn_list, started, t0,
    )
    print(f"wrote {fits_name} (+{len(outputs) - 1} msd files) + {manifest_name} in {out_dir}")
    return 0 if all_valid else 1


def cmd_rabi(flags: dict) -> int:
    g = flags.get("g") or 1.0
    if flags.get("detuning") is not None:
        print("detuning,amplitude_sq")
        print(f"{_ftag(flags['detuning'])},{rabi_amplitude_sq(g, flags['detuning'], 0.0):.9g}")
        return 0
    ediff = flags.get("ediff")
    if ediff is None:
        raise CliError("rabi needs --detuning or --Ediff (optionally with --eps/--eps-sweep)")
    if flags.get("eps_sweep") is not None:
        lo, hi, n = flags["eps_sweep"]
        eps_values = np.linspace(lo, hi, int(n))
    else:
        eps_values = [flags.get("eps") or 0.0]
    # fluctuations enter as +-eps around the static mismatch
    print("eps,amplitude_sq_minus,amplitude_sq_plus")
    for eps in eps_values:
        a_minus = rabi_amplitude_sq(g, ediff - eps, 0.0)
        a_plus = rabi_amplitude_sq(g, ediff + eps, 0.0)
        print(f"{_ftag(eps)},{a_minus:.9g},{a_plus:.9g}")
    return 0


def cmd_rerun(flags: dict) -> int:
    path = flags["manifest"]
    try:
        with open(path) as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read manifest {path}: {exc}") from exc
    command = manifest.get("command")
    cfg = dict(manifest.get("config", {}))
    if flags.get("out_dir") is not None:
        cfg["out_dir"] = flags["out_dir"]
    dispatch = {"evolve": cmd_evolve, "trajectory": cmd_trajectory, "sweep": cmd_sweep}
    if command not in dispatch:
        raise CliError(f"manifest command {command!r} is not rerunnable")
    cfg.pop("preset", None)  # already expanded into the resolved config
    return dispatch[command](cfg)


def _add_common(p):
    p.add_argument("--config", help="JSON config file (flat keys, same names as flags)")
    p.add_argument("--preset", help=f"named parameter grid: {', '.join(sorted(PRESETS))}")
    p.add_argument("--n-sites", dest="n_sites", type=int)
    p.add_argument("--delta", type=float, help="disorder standard deviation (units of g)")
    p.add_argument("--gamma", type=float, help="on-site dephasing rate")
    p.add_argument("--big-gamma", dest="big_gamma", type=float, help="incoherent hop rate")
    p.add_argument("--t-final", dest="t_final", type=float)
    p.add_argument("--dt", type=float, help="RK4 step (default 0.01/max(g,gamma,hop,delta,1))")
    p.add_argument("--n-samples", dest="n_samples", type=int)
    p.add_argument("--initial-site", dest="initial_site", type=int)
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--out-dir", dest="out_dir", help="default $SPINCHAIN_OUTDIR or .")
    p.add_argument("--prefix", help="output filename prefix (default: preset/command name)")
    p.add_argument("--margin", type=int, help="boundary-guard margin in sites")
    p.add_argument("--threads", type=int, help="worker process cap for sweeps")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="spinchain",
        description="Dephasing-assisted transport on disordered 1D chains",
    )
    ap.add_argument("--version", action="version", version=f"spinchain {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="master-equation site-probability frames")
    _add_common(p)

    p = sub.add_parser("trajectory", help="stochastic trajectories with event logs")
    _add_common(p)
    p.add_argument("--n-trajectories", dest="n_trajectories", type=int)

    p = sub.add_parser("sweep", help="disorder ensembles and power-law fits")
    _add_common(p)
    p.add_argument("--deltas", type=_float_list, help="comma-separated disorder values")
    p.add_argument("--gammas", type=_float_list, help="dephasing-family rates")
    p.add_argument("--big-gammas", dest="big_gammas", type=_float_list, help="hop-family rates")
    p.add_argument("--n-disorder", dest="n_disorder", type=int)
    p.add_argument("--n-trajectories", dest="n_trajectories", type=int)
    p.add_argument("--fit-window", dest="fit_window", type=float, nargs=2,
                   metavar=("TMIN", "TMAX"))
    p.add_argument("--synthetic", help="'c,alpha': fit an exact injected power law")

    p = sub.add_parser("rabi", help="two-site squared transfer amplitudes")
    p.add_argument("--g", type=float, default=1.0)
    p.add_argument("--detuning", type=float, help="total detuning")
    p.add_argument("--Ediff", dest="ediff", type=float, help="static energy mismatch")
    p.add_argument("--eps", type=float, help="fluctuation magnitude (reports -+eps pair)")
    p.add_argument("--eps-sweep", dest="eps_sweep", type=float, nargs=3,
                   metavar=("LO", "HI", "N"))

    p = sub.add_parser("rerun", help="replay a manifest byte-for-byte")
    p.add_argument("manifest")
    p.add_argument("--out-dir", dest="out_dir")
    return ap


def _float_list(text: str):
    try:
        return [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad float list {text!r}") from exc


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k != "command"}
    handlers = {
        "evolve": cmd_evolve,
        "trajectory": cmd_trajectory,
        "sweep": cmd_sweep,
        "rabi": cmd_rabi,
        "rerun": cmd_rerun,
    }
    try:
        return handlers[args.command](flags)
    except (CliError, IntegrationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
