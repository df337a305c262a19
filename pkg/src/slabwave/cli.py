"""Command-line front end.

Subcommands: synth, velocity-curve, regions, localize, montecarlo.
All outputs are plot-ready CSV files; run metadata (timestamp, versions,
seed, config digest) lives in a manifest.json sidecar so repeated runs
with the same config and seed produce byte-identical data files.

Exit codes: 0 success, 2 configuration error, 3 runtime error.
Set SLAB_LOG=debug|info|warning to control verbosity.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .arrival import stft, spectrogram_to_csv, tdoa_from_toas, toa_table_from_csv
from .config import RunConfig, load_config
from .errors import ConfigError, SlabwaveError
from .localize import (
    Algorithm,
    localize_hyperbolic,
    localize_so_tdoa,
    localize_so_tdoa_grid,
    make_grid,
    results_to_csv,
)
from .montecarlo import MonteCarloConfig, estimates_to_csv, report_to_csv, run_monte_carlo
from .plate import envelope_max_toa, envelope_peak_time, envelope_threshold_toa, envelope, perceived_velocity
from .regions import enumerate_regions, save_region_map
from .synth import synth_bounded, synth_free, waveform_to_binary, waveform_to_csv

log = logging.getLogger("slabwave")

_ALGO_CHOICES = ("so-tdoa", "so-tdoa-grid", "hyperbolic", "all")


def _selected_algorithms(name: str) -> tuple[Algorithm, ...]:
    if name == "all":
        return (Algorithm.SO_TDOA_REGION, Algorithm.SO_TDOA_GRID,
                Algorithm.HYPERBOLIC)
    return (Algorithm(name),)


def _setup_logging() -> None:
    level = os.environ.get("SLAB_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _write_manifest(out_dir: Path, config_path, seed, outputs) -> None:
    manifest = {
        "tool": "slabwave",
        "version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "config_path": str(config_path) if config_path else None,
        "config_sha256": (hashlib.sha256(
            Path(config_path).read_bytes()).hexdigest()
            if config_path else None),
        "seed": seed,
        "outputs": sorted(str(p.name) for p in outputs),
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


def _time_grid(cfg: RunConfig) -> np.ndarray:
    n = int(round(cfg.duration * cfg.sample_rate))
    return np.arange(n) / cfg.sample_rate


def cmd_synth(cfg: RunConfig, args, out_dir: Path) -> list[Path]:
    outputs = []
    theta = cfg.material.damping_theta
    if args.bounded:
        t_grid = _time_grid(cfg)
        wave = synth_bounded(cfg.bounded_room, cfg.bounded_source,
                             cfg.bounded_sensor, t_grid, cfg.constants,
                             theta, cfg.synthesis, cfg.bounded_p_max,
                             cfg.bounded_q_max)
        csv_path = out_dir / "bounded_waveform.csv"
        bin_path = out_dir / "bounded_waveform.bin"
        waveform_to_csv(wave, csv_path)
        waveform_to_binary(wave, bin_path)
        spec = stft(wave, cfg.stft_window, cfg.stft_overlap, cfg.stft_fft_len)
        spec_path = out_dir / "bounded_spectrogram.csv"
        spectrogram_to_csv(spec, spec_path)
        outputs += [csv_path, bin_path, spec_path]
        log.info("bounded waveform: %d samples, %d images",
                 len(wave), (2 * cfg.bounded_p_max + 1)
                 * (2 * cfg.bounded_q_max + 1) * 4)
    else:
        distances = args.distance or [5.0, 10.0, 15.0, 20.0]
        t_grid = _time_grid(cfg)
        for d in distances:
            wave = synth_free(d, t_grid, cfg.constants, theta, cfg.synthesis)
            csv_path = out_dir / f"waveform_d{d:g}m.csv"
            bin_path = out_dir / f"waveform_d{d:g}m.bin"
            waveform_to_csv(wave, csv_path)
            waveform_to_binary(wave, bin_path)
            outputs += [csv_path, bin_path]
            log.info("free-field waveform at d=%g m written", d)
    return outputs


def cmd_velocity_curve(cfg: RunConfig, args, out_dir: Path) -> list[Path]:
    theta = cfg.material.damping_theta
    constants = cfg.constants
    distances = np.linspace(args.d_min, args.d_max, args.points)
    # detection level: 10% of the envelope maximum at the reference distance
    ref_peak = envelope(args.level_reference_d,
                        envelope_peak_time(args.level_reference_d, constants,
                                           theta),
                        constants, theta)
    level = 0.1 * ref_peak
    path = out_dir / "velocity_curve.csv"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("d_m,c_p_analytic_m_s,c_p_threshold_m_s\n")
        for d in distances:
            c_analytic = perceived_velocity(d, constants, theta)
            t_cross = envelope_threshold_toa(d, constants, theta, level)
            fh.write(f"{d:.17g},{c_analytic:.17g},{d / t_cross:.17g}\n")
    return [path]


def cmd_regions(cfg: RunConfig, args, out_dir: Path) -> list[Path]:
    region_map = enumerate_regions(cfg.room, cfg.sensors, cfg.region_grid)
    path = out_dir / "regions.csv"
    save_region_map(region_map, path)
    log.info("%d regions enumerated on a %dx%d grid", region_map.n_regions,
             *cfg.region_grid)
    return [path]


def cmd_localize(cfg: RunConfig, args, out_dir: Path) -> list[Path]:
    toas = toa_table_from_csv(args.toa_table)
    if len(toas) != cfg.sensors.n_sensors:
        raise ConfigError(
            f"TOA table holds {len(toas)} sensors but the configuration "
            f"defines {cfg.sensors.n_sensors}")
    tau = tdoa_from_toas(toas)
    grid_points = make_grid(cfg.room, *cfg.localization_grid)
    results = []
    for algo in _selected_algorithms(args.algo):
        if algo is Algorithm.SO_TDOA_REGION:
            region_map = enumerate_regions(cfg.room, cfg.sensors,
                                           cfg.region_grid)
            results.append(localize_so_tdoa(tau, region_map))
        elif algo is Algorithm.SO_TDOA_GRID:
            results.append(localize_so_tdoa_grid(tau, cfg.sensors,
                                                 grid_points))
        else:
            results.append(localize_hyperbolic(tau, cfg.c_hat, cfg.sensors,
                                               grid_points))
    path = out_dir / "localization.csv"
    results_to_csv(results, path)
    return [path]


def cmd_montecarlo(cfg: RunConfig, args, out_dir: Path) -> list[Path]:
    algorithms = _selected_algorithms(args.algo)
    mc_cfg = MonteCarloConfig(
        room=cfg.room, sensors=cfg.sensors, source=cfg.mc_source,
        profile=cfg.profile, sigma_t_list=cfg.mc_sigma_t,
        runs_mc=cfg.mc_runs, grid=cfg.localization_grid, c_hat=cfg.c_hat,
        rng_seed=cfg.mc_seed, region_grid=cfg.region_grid)
    report = run_monte_carlo(mc_cfg, algorithms=algorithms,
                             keep_estimates=args.dump_runs)
    path = out_dir / "montecarlo.csv"
    report_to_csv(report, path)
    outputs = [path]
    if args.dump_runs:
        runs_path = out_dir / "montecarlo_runs.csv"
        estimates_to_csv(report, runs_path)
        outputs.append(runs_path)
    return outputs


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slabwave",
        description="Bending-wave synthesis and sign-only TDOA localization")
    parser.add_argument("--config", metavar="PATH",
                        help="YAML configuration file (defaults used if omitted)")
    parser.add_argument("--seed", type=int, metavar="N",
                        help="override the Monte Carlo seed")
    parser.add_argument("--out", metavar="DIR",
                        help="override the output directory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize received waveforms")
    p.add_argument("--distance", type=float, nargs="+", metavar="D",
                   help="free-field source-sensor distances in meters")
    p.add_argument("--bounded", action="store_true",
                   help="bounded-plate mode: room/source/sensor from config")

    p = sub.add_parser("velocity-curve",
                       help="perceived velocity vs distance (analytic and "
                            "threshold-numeric columns)")
    p.add_argument("--d-min", type=float, default=5.0)
    p.add_argument("--d-max", type=float, default=20.0)
    p.add_argument("--points", type=int, default=31)
    p.add_argument("--level-reference-d", type=float, default=5.0,
                   help="distance whose envelope peak sets the 10%% level")

    sub.add_parser("regions", help="enumerate and persist the region map")

    p = sub.add_parser("localize", help="localize from a TOA table")
    p.add_argument("--toa-table", required=True, metavar="CSV",
                   help="CSV with sensor_id,toa_s[,method] rows")
    p.add_argument("--algo", choices=_ALGO_CHOICES, default="so-tdoa")

    p = sub.add_parser("montecarlo", help="run the RMSE benchmark")
    p.add_argument("--algo", choices=_ALGO_CHOICES, default="all")
    p.add_argument("--dump-runs", action="store_true",
                   help="also write per-run estimates")
    return parser


_COMMANDS = {
    "synth": cmd_synth,
    "velocity-curve": cmd_velocity_curve,
    "regions": cmd_regions,
    "localize": cmd_localize,
    "montecarlo": cmd_montecarlo,
}


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = dataclasses.replace(cfg, mc_seed=args.seed)
        out_dir = Path(args.out) if args.out else cfg.output_dir
        out_dir.mkdir(parents=True, exist_ok=True)
        outputs = _COMMANDS[args.command](cfg, args, out_dir)
        _write_manifest(out_dir, args.config, cfg.mc_seed, outputs)
    except ConfigError as exc:
        print(f"slabwave: configuration error: {exc}", file=sys.stderr)
        return 2
    except SlabwaveError as exc:
        print(f"slabwave: error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"slabwave: error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
