"""Command-line entry point: figure-reproduction recipes as subcommands.

Subcommands: generate | store | sweep | mc-validate | design
Flags:       --config <path>  --out <dir>  --seed <u64>  --quiet

Exit codes: 0 success, 2 configuration/validation error, 3 runtime numerical
or I/O failure.  All outputs are deterministic given (config, seed): rerunning
a command produces byte-identical CSV/JSON files.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    axis_band_energies,
    defect_angle,
    psnr,
    recommend_kperp,
    sf_spectrum,
    sweep_beta,
    visibility,
)
from .config import ConfigError, RunConfig, load_config, render_config
from .fieldio import read_field, write_field, write_pgm
from .fields import ComplexField
from .patterns import DoublePetal, GridPattern, LGMode, generate
from .propagator import StorageParams, check_grid_supports, filter_profile, store_spectral
from .stochastic import child_seed, mc_convergence, mc_store


def _resolve_input(cfg: RunConfig) -> ComplexField:
    if cfg.pattern is not None:
        return generate(cfg.pattern, cfg.grid)
    if cfg.input_path is not None:
        return read_field(cfg.input_path)
    raise ConfigError("config defines no input: add a [pattern] section")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _emit(out: Path, name: str, quiet: bool) -> Path:
    path = out / name
    if not quiet:
        print(path)
    return path


def _echo_config(cfg: RunConfig, out: Path, quiet: bool) -> None:
    _emit(out, "config.resolved.toml", quiet).write_text(render_config(cfg))


def _metrics_payload(cfg: RunConfig, fld: ComplexField, stored: ComplexField) -> dict:
    payload: dict = {}
    value = psnr(stored, fld)
    if math.isinf(value):
        payload["psnr_db"] = None
        payload["psnr_infinite"] = True
    else:
        payload["psnr_db"] = value
        payload["psnr_infinite"] = False
    pat = cfg.pattern
    if isinstance(pat, DoublePetal):
        axis = (math.cos(pat.theta), math.sin(pat.theta))
        payload["visibility"] = visibility(stored, axis, pat.separation)
    if isinstance(pat, LGMode) and pat.l != 0 and pat.p == 0:
        ring = pat.waist * math.sqrt(abs(pat.l) / 2.0)
        res = defect_angle(stored, ring)
        payload["defect_angle_rad"] = res.angle
        payload["defect_variation"] = res.variation
        payload["ring_radius_m"] = ring
    if isinstance(pat, GridPattern):
        dc = cfg.design.dc_exclusion
        if dc is None:
            dc = 2.0 * max(cfg.grid.dqx, cfg.grid.dqy)
        ex, ey = axis_band_energies(stored, dc_exclusion=dc)
        payload["axis_energy_x"] = ex
        payload["axis_energy_y"] = ey
        payload["axis_energy_ratio_y_over_x"] = ey / ex if ex > 0 else None
    return payload


def cmd_generate(cfg: RunConfig, out: Path, seed: int, quiet: bool) -> int:
    fld = _resolve_input(cfg)
    if cfg.output.write_raw:
        write_field(_emit(out, "input.field", quiet), fld)
    if cfg.output.write_pgm:
        write_pgm(_emit(out, "input_intensity.pgm", quiet), fld.intensity())
        write_pgm(_emit(out, "input_spectrum.pgm", quiet), sf_spectrum(fld).magnitude() ** 2)
    _echo_config(cfg, out, quiet)
    return 0


def cmd_store(cfg: RunConfig, out: Path, seed: int, quiet: bool) -> int:
    fld = _resolve_input(cfg)
    stored = store_spectral(fld, cfg.storage)
    if cfg.output.write_raw:
        write_field(_emit(out, "retrieved.field", quiet), stored)
    if cfg.output.write_pgm:
        write_pgm(_emit(out, "retrieved_intensity.pgm", quiet), stored.intensity())
        write_pgm(
            _emit(out, "filter.pgm", quiet),
            filter_profile(cfg.storage, fld.grid).transmissivity,
        )
    _write_json(_emit(out, "metrics.json", quiet), _metrics_payload(cfg, fld, stored))
    _echo_config(cfg, out, quiet)
    return 0


def cmd_sweep(cfg: RunConfig, out: Path, seed: int, quiet: bool) -> int:
    if not cfg.sweep.betas:
        raise ConfigError("sweep requires a non-empty sweep.beta_mrad list")
    times = cfg.sweep.times or (cfg.storage.t,)
    result = sweep_beta(
        cfg.pattern,
        cfg.storage.alpha,
        cfg.sweep.betas,
        times,
        cfg.storage.D,
        cfg.grid,
        cfg.storage.lambda_c,
    )
    _emit(out, "sweep.csv", quiet).write_text(result.to_csv())
    if cfg.sweep.per_point_images and cfg.output.write_pgm:
        fld = _resolve_input(cfg)
        for beta, t, _ in result.rows:
            params = cfg.storage.replace(beta=beta, t=t)
            stored = store_spectral(fld, params)
            name = f"sweep_b{beta * 1e3:.3f}mrad_t{t * 1e6:.2f}us.pgm"
            write_pgm(_emit(out, name, quiet), stored.intensity())
    _echo_config(cfg, out, quiet)
    return 0


def cmd_mc_validate(cfg: RunConfig, out: Path, seed: int, quiet: bool) -> int:
    if not cfg.mc.n_list or any(n <= 0 for n in cfg.mc.n_list):
        raise ConfigError("mc.n_walkers must be a non-empty list of positive counts")
    fld = _resolve_input(cfg)
    rows = mc_convergence(fld, cfg.storage, list(cfg.mc.n_list), seed)
    csv_lines = ["n_walkers,l2_error"] + [f"{n},{err:.9g}" for n, err in rows]
    _emit(out, "convergence.csv", quiet).write_text("\n".join(csv_lines) + "\n")

    final = mc_store(fld, cfg.storage, rows[-1][0], child_seed(seed, len(rows) - 1))
    if cfg.output.write_raw:
        write_field(_emit(out, "mc.field", quiet), final)
    if cfg.output.write_pgm:
        write_pgm(_emit(out, "mc_intensity.pgm", quiet), final.intensity())

    summary: dict = {
        "seed": seed,
        "rows": [{"n_walkers": n, "l2_error": err} for n, err in rows],
        "final_l2_error": rows[-1][1],
    }
    if len(rows) >= 2:
        slope = float(
            np.polyfit(np.log10([n for n, _ in rows]), np.log10([e for _, e in rows]), 1)[0]
        )
        summary["loglog_slope"] = slope
    _write_json(_emit(out, "summary.json", quiet), summary)
    _echo_config(cfg, out, quiet)
    return 0


def cmd_design(cfg: RunConfig, out: Path, seed: int, quiet: bool) -> int:
    fld = _resolve_input(cfg)
    check_grid_supports(cfg.storage.replace(beta=cfg.design.beta_max), fld.grid)
    rec = recommend_kperp(
        fld,
        D=cfg.storage.D,
        t=cfg.storage.t,
        lambda_c=cfg.storage.lambda_c,
        dc_exclusion=cfg.design.dc_exclusion,
        beta_max=cfg.design.beta_max,
        alpha=cfg.design.alpha,
    )
    before = store_spectral(fld, cfg.storage.replace(beta=0.0))
    after_params = cfg.storage.replace(
        alpha=rec.alpha if rec.alpha is not None else 0.0, beta=rec.beta
    )
    after = store_spectral(fld, after_params)
    _write_json(
        _emit(out, "recommendation.json", quiet),
        {
            "alpha_rad": rec.alpha,
            "beta_mrad": rec.beta * 1e3,
            "predicted_psnr_gain_db": rec.predicted_gain_db,
            "isotropic": rec.isotropic,
            "note": rec.note,
        },
    )
    if cfg.output.write_raw:
        write_field(_emit(out, "before.field", quiet), before)
        write_field(_emit(out, "after.field", quiet), after)
    if cfg.output.write_pgm:
        write_pgm(_emit(out, "before_intensity.pgm", quiet), before.intensity())
        write_pgm(_emit(out, "after_intensity.pgm", quiet), after.intensity())
    _echo_config(cfg, out, quiet)
    return 0


_COMMANDS = {
    "generate": cmd_generate,
    "store": cmd_store,
    "sweep": cmd_sweep,
    "mc-validate": cmd_mc_validate,
    "design": cmd_design,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diffstore",
        description="Spatial-frequency filtering of stored optical fields in diffusive media.",
        epilog="exit codes: 0 success, 2 config/validation error, 3 runtime/numerical failure",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("generate", "render the configured input field and its spectrum"),
        ("store", "run the storage propagator and report metrics"),
        ("sweep", "visibility sweep over beta (and storage times)"),
        ("mc-validate", "Monte-Carlo walker validation of the propagator"),
        ("design", "recommend a wavevector offset for the configured image"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="TOML run configuration")
        p.add_argument("--out", default="out", help="output directory (default: ./out)")
        p.add_argument("--seed", type=int, default=None, help="override mc.seed")
        p.add_argument("--quiet", action="store_true", help="suppress per-file output")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        seed = args.seed if args.seed is not None else cfg.mc.seed
        return _COMMANDS[args.command](cfg, out, seed, args.quiet)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        target = getattr(exc, "filename", None) or args.out
        print(f"i/o error: {target}: {exc.strerror or exc}", file=sys.stderr)
        return 3
    except (ArithmeticError, np.linalg.LinAlgError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
