"""Link budgets and drive-by simulation for buried backscatter tags.

Subcommands: ``linkbudget``, ``sweep``, ``fieldsim``, ``inventory``, ``presets``.

Settings come from built-in defaults, then an optional flat ``key = value``
file given by ``--config``, then command-line flags (highest precedence).
Distances are metres, powers dBm and VWC a fraction.

Exit codes: 0 success, 2 invalid configuration, 3 no link solution,
4 calibration did not converge.
"""
from __future__ import annotations

import argparse
import configparser
import dataclasses
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import reporting
from .device_profiles import UnknownDeviceError, device_names, preset
from .field_sim import (ModifierBounds, UncoveredRowError, calibrate_modifiers,
                        derive_seeds, disable_thresholds, disable_transmit, load_calibrated_modifiers,
                        simulate_pass, trial_preset)
from .link_budget import Configuration, LinkParams, Mode, NoSolutionError, solve_range, sweep_vwc
from .mac_inventory import Scheme, fsa_monte_carlo, q_protocol_inventory
from .soil_channel import LinkGeometry, ModelRangeError, SoilProfile, soil_complex_permittivity

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NO_SOLUTION = 3
EXIT_UNCONVERGED = 4


class ConfigError(ValueError):
    pass


# key -> (parser, default)
def _fraction(s):
    v = float(s)
    if not 0.0 <= v <= 1.0:
        raise ConfigError(f"expected a fraction in [0, 1] (not a percentage), got {s}")
    return v


def _metres(s):
    v = float(s)
    if v < 0:
        raise ConfigError(f"distances are non-negative metres, got {s}")
    return v


def _flag(s):
    if isinstance(s, bool):
        return s
    low = str(s).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {s}")


def _sweep_spec(s):
    try:
        lo, hi, steps = str(s).split(":")
        return _fraction(lo), _fraction(hi), int(steps)
    except ValueError as exc:
        raise ConfigError(f"sweep spec must be lo:hi:steps, got {s!r} ({exc})") from None


def _zones(s):
    zones = []
    for part in str(s).split(","):
        rows, vwc = part.split(":")
        first, _, last = rows.partition("-")
        zones.append(((int(first), int(last or first)), _fraction(vwc)))
    return tuple(zones)


KEYS = {
    "device": (str, "RFID-UHF"),
    "devices": (lambda s: tuple(d.strip() for d in str(s).split(",")), ("RFID-UHF", "AIOT-BL")),
    "mode": (lambda s: Mode(str(s).lower()), Mode.MONOSTATIC),
    "vwc": (_fraction, 0.15),
    "sweep": (_sweep_spec, (0.05, 0.25, 21)),
    "depth": (_metres, 0.025),
    "height": (_metres, 0.3),
    "offset": (_metres, 0.0),
    "reader_height": (_metres, None),
    "frequency": (float, 915e6),
    "gamma": (float, 3.0),
    "clay": (_fraction, 0.30),
    "sand": (_fraction, 0.50),
    "bulk_density": (float, 1.5),
    "particle_density": (float, 2.66),
    "seed": (int, None),
    "out": (Path, None),
    "scheme": (lambda s: Scheme(str(s).lower()), Scheme.Q),
    "tags": (int, 50),
    "frame": (int, 128),
    "q_init": (float, 4.0),
    "max_slots": (int, 100_000),
    "trials": (int, 1),
    "canopy_loss": (float, None),
    "depth_jitter": (_metres, None),
    "misc_margin": (float, None),
    "zones": (_zones, None),
    "tag_spacing": (_metres, 0.5),
    "no_thresholds": (_flag, False),
    "no_transmit": (_flag, False),
    "no_contention": (_flag, False),
    "calibrate": (_fraction, None),
}


@dataclass(frozen=True)
class RunConfig:
    values: dict

    def __getattr__(self, key):
        try:
            return self.values[key]
        except KeyError:
            raise AttributeError(key) from None

    def soil(self, vwc=None) -> SoilProfile:
        return SoilProfile(self.vwc if vwc is None else vwc, self.clay, self.sand,
                           self.bulk_density, self.particle_density)

    def configuration(self) -> Configuration:
        exciter = LinkGeometry(self.height, self.depth, self.offset, self.frequency)
        if self.mode is Mode.MONOSTATIC:
            return Configuration.monostatic(exciter)
        rh = self.height if self.reader_height is None else self.reader_height
        return Configuration.bistatic(exciter, LinkGeometry(rh, self.depth, 0.0, self.frequency))

    def link(self, device_name) -> LinkParams:
        return LinkParams.from_device(preset(device_name), gamma=self.gamma)


def read_config_file(path) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    parser.optionxform = lambda k: k.strip().lower().replace("-", "_")
    parser.read_string("[run]\n" + text)
    return dict(parser["run"])


def build_config(cli: dict, file_values: dict | None = None) -> RunConfig:
    """Merge defaults < file < CLI and validate every value before any work."""
    file_values = file_values or {}
    unknown = set(file_values) - set(KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    values = {}
    for key, (conv, default) in KEYS.items():
        raw = cli.get(key)
        if raw is None:
            raw = file_values.get(key)
        if raw is None:
            values[key] = default
            continue
        try:
            values[key] = conv(raw)
        except ConfigError:
            raise
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad value for {key}: {raw!r} ({exc})") from None
    cfg = RunConfig(values)
    try:
        for name in (cfg.device, *cfg.devices):
            preset(name)
        cfg.soil()
        LinkGeometry(cfg.height, cfg.depth, cfg.offset, cfg.frequency)
        soil_complex_permittivity(cfg.soil(), cfg.frequency)
        if cfg.gamma < 2:
            raise ConfigError("gamma must be >= 2")
    except UnknownDeviceError as exc:
        raise ConfigError(f"{exc.args[0]}") from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    lo, hi, steps = cfg.sweep
    if not lo < hi or steps < 2:
        raise ConfigError("sweep needs lo < hi and at least 2 steps")
    return cfg


def _emit(text: str, out: Optional[Path], summary: str = ""):
    if out is None:
        sys.stdout.write(text)
        if summary:
            print(summary, file=sys.stderr)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        if summary:
            print(summary)


def cmd_linkbudget(cfg: RunConfig) -> int:
    report = solve_range(cfg.link(cfg.device), cfg.soil(), cfg.configuration())
    row = (cfg.device, cfg.vwc, report.d_act, report.d_read, report.effective_range, report.limiting_link)
    summary = (f"{cfg.device} {cfg.mode.value} vwc={reporting.fmt(cfg.vwc)}: "
               f"d_act={reporting.fmt(report.d_act)} m d_read={reporting.fmt(report.d_read)} m "
               f"limited by {report.limiting_link.value}")
    _emit(reporting.render("sweep", [row]), cfg.out, summary)
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    lo, hi, steps = cfg.sweep
    rows = []
    for name in cfg.devices:
        result = sweep_vwc(cfg.link(name), cfg.soil(lo), lo, hi, steps, cfg.configuration())
        rows.extend(reporting.sweep_rows(name, result))
    _emit(reporting.render("sweep", rows), cfg.out)
    return EXIT_OK


def cmd_fieldsim(cfg: RunConfig) -> int:
    if cfg.seed is None:
        raise ConfigError("fieldsim needs --seed (or 'seed' in the config file)")
    layout, rig = trial_preset(cfg.tag_spacing) if cfg.zones is None else \
        trial_preset(cfg.tag_spacing, cfg.zones)
    device = preset(cfg.device)
    if cfg.no_thresholds:
        device = disable_thresholds(device)
    if cfg.no_transmit:
        device = disable_transmit(device)

    mods = load_calibrated_modifiers()
    overrides = {k: cfg.values[k] for k in ("canopy_loss", "depth_jitter", "misc_margin")
                 if cfg.values[k] is not None}
    mods = dataclasses.replace(mods, **overrides)

    status = EXIT_OK
    if cfg.calibrate is not None:
        cal = calibrate_modifiers(cfg.calibrate, layout, rig, device, ModifierBounds(), cfg.seed)
        mods = cal.modifiers
        print(f"calibration: canopy_loss={reporting.fmt(mods.canopy_loss)} dB "
              f"depth_jitter={reporting.fmt(mods.depth_jitter)} m rate={reporting.fmt(cal.rate)} "
              f"converged={reporting.fmt(cal.converged)}", file=sys.stderr)
        if not cal.converged:
            status = EXIT_UNCONVERGED

    result = simulate_pass(layout, rig, device, mods, cfg.seed, contention=not cfg.no_contention)
    _emit(reporting.render("fieldsim", reporting.fieldsim_rows(result)), cfg.out,
          reporting.fieldsim_summary(result))
    return status


def cmd_inventory(cfg: RunConfig) -> int:
    seed = 0 if cfg.seed is None else cfg.seed
    if cfg.tags < 0 or cfg.trials < 1 or cfg.frame < 1 or cfg.max_slots < 1:
        raise ConfigError("need tags >= 0, trials >= 1, frame >= 1, max_slots >= 1")
    if cfg.scheme is Scheme.FSA:
        stats = fsa_monte_carlo(cfg.tags, cfg.frame, cfg.trials, seed)
        row = ("fsa", cfg.tags, float(cfg.frame), stats.mean_successes, stats.mean_collisions, stats.mean_idle)
    else:
        runs = [q_protocol_inventory(cfg.tags, cfg.q_init, cfg.max_slots, s)
                for s in ([seed] if cfg.trials == 1 else derive_seeds(seed, cfg.trials))]
        row = ("q", cfg.tags,
               float(np.mean([r.slots_used for r in runs])),
               float(np.mean([r.successes for r in runs])),
               float(np.mean([r.collisions for r in runs])),
               float(np.mean([r.idle_slots for r in runs])))
    _emit(reporting.render("inventory", [row]), cfg.out)
    return EXIT_OK


def cmd_presets(cfg: RunConfig) -> int:
    _emit(reporting.render("presets", reporting.preset_rows()), cfg.out)
    return EXIT_OK


COMMANDS = {
    "linkbudget": cmd_linkbudget,
    "sweep": cmd_sweep,
    "fieldsim": cmd_fieldsim,
    "inventory": cmd_inventory,
    "presets": cmd_presets,
}


def _common(p):
    p.add_argument("--config", help="flat key = value settings file")
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.add_argument("--seed", type=str)


def _link_flags(p, multi=False):
    if multi:
        p.add_argument("--devices", help=f"comma-separated presets: {','.join(device_names())}")
    else:
        p.add_argument("--device", help=f"one of {', '.join(device_names())}")
    p.add_argument("--mode", choices=[m.value for m in Mode])
    p.add_argument("--depth", help="tag depth, m")
    p.add_argument("--height", help="antenna height, m")
    p.add_argument("--offset", help="bistatic exciter horizontal offset, m")
    p.add_argument("--reader-height", dest="reader_height")
    p.add_argument("--frequency", help="Hz")
    p.add_argument("--gamma")
    p.add_argument("--clay")
    p.add_argument("--sand")
    p.add_argument("--bulk-density", dest="bulk_density")
    p.add_argument("--particle-density", dest="particle_density")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ugbackscatter", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("linkbudget", help="activation/read distance for one device and moisture")
    _common(p)
    _link_flags(p)
    p.add_argument("--vwc", help="volumetric water content, fraction")

    p = sub.add_parser("sweep", help="distances over a VWC range for one or more devices")
    _common(p)
    _link_flags(p, multi=True)
    p.add_argument("--vwc", dest="sweep", help="lo:hi:steps, fractions")

    p = sub.add_parser("fieldsim", help="simulate the 288-tag drive-by trial")
    _common(p)
    p.add_argument("--device")
    p.add_argument("--canopy-loss", dest="canopy_loss")
    p.add_argument("--depth-jitter", dest="depth_jitter")
    p.add_argument("--misc-margin", dest="misc_margin")
    p.add_argument("--zones", help="e.g. 1-4:0.05,5-8:0.15,9-12:0.25")
    p.add_argument("--tag-spacing", dest="tag_spacing")
    p.add_argument("--no-thresholds", dest="no_thresholds", action="store_const", const=True)
    p.add_argument("--no-transmit", dest="no_transmit", action="store_const", const=True)
    p.add_argument("--no-contention", dest="no_contention", action="store_const", const=True)
    p.add_argument("--calibrate", metavar="TARGET", help="fit modifiers to this read rate first")

    p = sub.add_parser("inventory", help="anti-collision statistics")
    _common(p)
    p.add_argument("--scheme", choices=[s.value for s in Scheme])
    p.add_argument("--tags")
    p.add_argument("--frame")
    p.add_argument("--q-init", dest="q_init")
    p.add_argument("--max-slots", dest="max_slots")
    p.add_argument("--trials")

    p = sub.add_parser("presets", help="architecture and device tables")
    _common(p)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    cli = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        file_values = read_config_file(args.config) if args.config else {}
        cfg = build_config(cli, file_values)
        return COMMANDS[args.command](cfg)
    except (ConfigError, UncoveredRowError, ModelRangeError, configparser.Error, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NoSolutionError as exc:
        print(f"no solution: {exc}", file=sys.stderr)
        return EXIT_NO_SOLUTION


if __name__ == "__main__":
    sys.exit(main())
