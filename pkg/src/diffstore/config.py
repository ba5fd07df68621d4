"""Run configuration: TOML parsing, validation, and the normalized echo.

Config files are flat TOML with dotted sections; physical quantities carry
their unit in the key name (t_us, beta_mrad, D_cm2_per_s) and are converted
to SI here, once.  Example::

    grid.nx = 512
    grid.dx_um = 4.0
    pattern.type = "double_petal"
    pattern.waist_um = 100.0
    pattern.separation_um = 475.0
    pattern.theta_rad = 1.5707963
    storage.D_cm2_per_s = 25.0
    storage.t_us = 3.0
    storage.alpha_rad = 1.5707963
    storage.beta_mrad = 1.48

Validation happens before any computation starts: grid/pattern/storage
invariants, the Nyquist bound, and the diffusion margin (pattern footprint
plus four diffusion lengths must fit inside half the grid extent).
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .fields import GridSpec
from .patterns import DoublePetal, GridPattern, LGMode, Letter, PatternSpec, footprint_radius
from .propagator import StorageParams, check_grid_supports

__all__ = ["ConfigError", "RunConfig", "load_config", "render_config"]


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


@dataclass(frozen=True)
class MonteCarloBlock:
    n_list: tuple[int, ...] = (10_000, 100_000, 1_000_000)
    seed: int = 1234


@dataclass(frozen=True)
class SweepBlock:
    betas: tuple[float, ...] = ()  # rad
    times: tuple[float, ...] = ()  # s
    per_point_images: bool = False


@dataclass(frozen=True)
class DesignBlock:
    beta_max: float = 5e-3  # rad
    dc_exclusion: Optional[float] = None  # 1/m
    alpha: Optional[float] = None  # rad; overrides axis detection


@dataclass(frozen=True)
class OutputBlock:
    write_raw: bool = True
    write_pgm: bool = True


@dataclass(frozen=True)
class RunConfig:
    grid: GridSpec
    storage: StorageParams
    pattern: Optional[PatternSpec]
    input_path: Optional[Path]
    sweep: SweepBlock
    mc: MonteCarloBlock
    design: DesignBlock
    output: OutputBlock

    def max_time(self) -> float:
        times = [self.storage.t, *self.sweep.times]
        return max(times)

    def max_beta(self) -> float:
        return max([self.storage.beta, *self.sweep.betas])


def _section(data: dict, name: str) -> dict:
    sec = data.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(f"[{name}] must be a table of keys")
    return dict(sec)


def _take(sec: dict, key: str, kind, default=None, required=False):
    if key not in sec:
        if required:
            raise ConfigError(f"missing required key {key!r}")
        return default
    value = sec.pop(key)
    try:
        return kind(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"key {key!r}: {exc}") from exc


def _reject_unknown(sec: dict, name: str) -> None:
    if sec:
        raise ConfigError(f"unknown keys in [{name}]: {', '.join(sorted(sec))}")


def _parse_pattern(sec: dict) -> tuple[Optional[PatternSpec], Optional[Path]]:
    if not sec:
        return None, None
    kind = _take(sec, "type", str, required=True)
    try:
        if kind == "double_petal":
            spec = DoublePetal(
                waist=_take(sec, "waist_um", float, required=True) * 1e-6,
                separation=_take(sec, "separation_um", float, required=True) * 1e-6,
                theta=_take(sec, "theta_rad", float, default=0.0),
            )
        elif kind == "grid":
            spec = GridPattern(
                bar_spacing=_take(sec, "bar_spacing_um", float, required=True) * 1e-6,
                bar_width=_take(sec, "bar_width_um", float, required=True) * 1e-6,
                n_bars=_take(sec, "n_bars", int, default=4),
            )
        elif kind == "letter":
            spec = Letter(
                glyph=_take(sec, "glyph", str, required=True),
                height=_take(sec, "height_um", float, required=True) * 1e-6,
            )
        elif kind == "lg":
            spec = LGMode(
                p=_take(sec, "p", int, default=0),
                l=_take(sec, "l", int, required=True),
                waist=_take(sec, "waist_um", float, required=True) * 1e-6,
            )
        elif kind == "file":
            path = Path(_take(sec, "path", str, required=True))
            _reject_unknown(sec, "pattern")
            return None, path
        else:
            raise ConfigError(
                f"unknown pattern.type {kind!r}; expected double_petal | grid | letter | lg | file"
            )
    except ValueError as exc:
        raise ConfigError(f"pattern: {exc}") from exc
    _reject_unknown(sec, "pattern")
    return spec, None


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate a run configuration file."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc

    gsec = _section(data, "grid")
    try:
        grid = GridSpec(
            nx=_take(gsec, "nx", int, default=512),
            ny=_take(gsec, "ny", int, default=512),
            dx=_take(gsec, "dx_um", float, default=4.0) * 1e-6,
            dy=_take(gsec, "dy_um", float, default=4.0) * 1e-6,
        )
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from exc
    _reject_unknown(gsec, "grid")

    ssec = _section(data, "storage")
    try:
        storage = StorageParams(
            D=_take(ssec, "D_cm2_per_s", float, default=25.0) * 1e-4,
            t=_take(ssec, "t_us", float, default=3.0) * 1e-6,
            alpha=_take(ssec, "alpha_rad", float, default=0.0),
            beta=_take(ssec, "beta_mrad", float, default=0.0) * 1e-3,
            lambda_c=_take(ssec, "lambda_c_nm", float, default=795.0) * 1e-9,
        )
    except ValueError as exc:
        raise ConfigError(f"storage: {exc}") from exc
    _reject_unknown(ssec, "storage")

    pattern, input_path = _parse_pattern(_section(data, "pattern"))

    wsec = _section(data, "sweep")
    betas = _take(wsec, "beta_mrad", list, default=[])
    times = _take(wsec, "t_us", list, default=[])
    sweep = SweepBlock(
        betas=tuple(float(b) * 1e-3 for b in betas),
        times=tuple(float(t) * 1e-6 for t in times),
        per_point_images=_take(wsec, "per_point_images", bool, default=False),
    )
    _reject_unknown(wsec, "sweep")

    msec = _section(data, "mc")
    n_list = _take(msec, "n_walkers", list, default=[10_000, 100_000, 1_000_000])
    mc = MonteCarloBlock(
        n_list=tuple(int(n) for n in n_list),
        seed=_take(msec, "seed", int, default=1234),
    )
    _reject_unknown(msec, "mc")

    dsec = _section(data, "design")
    dc_excl = _take(dsec, "dc_exclusion_per_m", float, default=None)
    alpha_override = _take(dsec, "alpha_rad", float, default=None)
    design = DesignBlock(
        beta_max=_take(dsec, "beta_max_mrad", float, default=5.0) * 1e-3,
        dc_exclusion=dc_excl,
        alpha=alpha_override,
    )
    _reject_unknown(dsec, "design")

    osec = _section(data, "output")
    output = OutputBlock(
        write_raw=_take(osec, "write_raw", bool, default=True),
        write_pgm=_take(osec, "write_pgm", bool, default=True),
    )
    _reject_unknown(osec, "output")

    known = {"grid", "storage", "pattern", "sweep", "mc", "design", "output"}
    extra = set(data) - known
    if extra:
        raise ConfigError(f"unknown config sections: {', '.join(sorted(extra))}")

    cfg = RunConfig(grid, storage, pattern, input_path, sweep, mc, design, output)
    _check_assembly(cfg)
    return cfg


def _check_assembly(cfg: RunConfig) -> None:
    """Cross-cutting physics checks that need the whole configuration."""
    t_max = cfg.max_time()
    if cfg.pattern is not None and t_max > 0:
        sigma = math.sqrt(2.0 * cfg.storage.D * t_max)
        needed = footprint_radius(cfg.pattern) + 4.0 * sigma
        half_extent = 0.5 * min(cfg.grid.extent)
        if needed > half_extent:
            raise ConfigError(
                f"grid extent too small: pattern footprint plus a 4-sigma diffusion margin "
                f"needs half-extent >= {needed:.4g} m (grid provides {half_extent:.4g} m); "
                f"enlarge the grid to at least {2 * needed:.4g} m per side"
            )
    for beta in {cfg.max_beta(), *cfg.sweep.betas}:
        for t in {cfg.storage.t, *cfg.sweep.times}:
            if t > 0:
                try:
                    check_grid_supports(cfg.storage.replace(beta=beta, t=t), cfg.grid)
                except ValueError as exc:
                    raise ConfigError(str(exc)) from exc


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, str):
        return f'"{value}"'
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    raise TypeError(f"cannot render {type(value).__name__}")


def render_config(cfg: RunConfig) -> str:
    """Normalized, deterministic TOML echo of a resolved configuration."""
    lines = ["# resolved run configuration (normalized)"]
    g = cfg.grid
    lines += [
        f"grid.nx = {g.nx}",
        f"grid.ny = {g.ny}",
        f"grid.dx_um = {_fmt(g.dx * 1e6)}",
        f"grid.dy_um = {_fmt(g.dy * 1e6)}",
    ]
    s = cfg.storage
    lines += [
        f"storage.D_cm2_per_s = {_fmt(s.D * 1e4)}",
        f"storage.t_us = {_fmt(s.t * 1e6)}",
        f"storage.alpha_rad = {_fmt(s.alpha)}",
        f"storage.beta_mrad = {_fmt(s.beta * 1e3)}",
        f"storage.lambda_c_nm = {_fmt(s.lambda_c * 1e9)}",
    ]
    p = cfg.pattern
    if p is not None:
        if isinstance(p, DoublePetal):
            lines += [
                'pattern.type = "double_petal"',
                f"pattern.waist_um = {_fmt(p.waist * 1e6)}",
                f"pattern.separation_um = {_fmt(p.separation * 1e6)}",
                f"pattern.theta_rad = {_fmt(p.theta)}",
            ]
        elif isinstance(p, GridPattern):
            lines += [
                'pattern.type = "grid"',
                f"pattern.bar_spacing_um = {_fmt(p.bar_spacing * 1e6)}",
                f"pattern.bar_width_um = {_fmt(p.bar_width * 1e6)}",
                f"pattern.n_bars = {p.n_bars}",
            ]
        elif isinstance(p, Letter):
            lines += [
                'pattern.type = "letter"',
                f"pattern.glyph = {_fmt(p.glyph)}",
                f"pattern.height_um = {_fmt(p.height * 1e6)}",
            ]
        elif isinstance(p, LGMode):
            lines += [
                'pattern.type = "lg"',
                f"pattern.p = {p.p}",
                f"pattern.l = {p.l}",
                f"pattern.waist_um = {_fmt(p.waist * 1e6)}",
            ]
    elif cfg.input_path is not None:
        lines += ['pattern.type = "file"', f"pattern.path = {_fmt(str(cfg.input_path))}"]
    if cfg.sweep.betas:
        lines += [
            f"sweep.beta_mrad = {_fmt([b * 1e3 for b in cfg.sweep.betas])}",
            f"sweep.t_us = {_fmt([t * 1e6 for t in cfg.sweep.times])}",
            f"sweep.per_point_images = {_fmt(cfg.sweep.per_point_images)}",
        ]
    lines += [
        f"mc.n_walkers = {_fmt(list(cfg.mc.n_list))}",
        f"mc.seed = {cfg.mc.seed}",
        f"design.beta_max_mrad = {_fmt(cfg.design.beta_max * 1e3)}",
    ]
    if cfg.design.dc_exclusion is not None:
        lines.append(f"design.dc_exclusion_per_m = {_fmt(cfg.design.dc_exclusion)}")
    if cfg.design.alpha is not None:
        lines.append(f"design.alpha_rad = {_fmt(cfg.design.alpha)}")
    lines += [
        f"output.write_raw = {_fmt(cfg.output.write_raw)}",
        f"output.write_pgm = {_fmt(cfg.output.write_pgm)}",
    ]
    return "\n".join(lines) + "\n"
