"""Command-line front end.

Usage::

    noisemod [--config FILE] [--out DIR] [--strict] COMMAND [options]

The config file holds ``key = value`` lines (``#`` comments allowed). Keys are
the long option names with dashes or underscores, e.g. ``snr = -5:20:0.5``,
``n = 10,50,100``, ``mc_trials = 1e6``. Command-line flags override the file.
"""

from __future__ import annotations

import argparse
import csv
import math
import re
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from noisemod import sweeps
from noisemod.energy import CalibrationError
from noisemod.model import (
    ConfigurationError,
    NoiseModScenario,
    NumericWarning,
    SnrConvention,
    SweepGrid,
    validate,
)
from noisemod.montecarlo import McConfig

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

COMMANDS = ("ber-awgn", "ber-fading", "capacity", "energy", "crossover", "validate")

DEFAULTS = {
    "snr": "-5:20:1",
    "n": "10,50,100",
    "snr_convention": "per-sample",
    "channel": "rayleigh,div2-ideal",
    "mc_trials": "0",
    "mc_max_trials": "1e8",
    "mc_target_errors": "100",
    "mc_min_ber": "1e-5",
    "batch_size": "4096",
    "workers": "1",
    "seed": "0",
    "quadrature_order": "96",
    "freqs": "2.4e9,5.725e9,24e9",
    "calibrate": "",
    "target_ber": "1e-3",
    "distances": "0.1:100:0.1",
    "out": ".",
}


@dataclass
class RunConfig:
    command: str
    grid: SweepGrid
    convention: SnrConvention
    mc: McConfig | None
    mc_min_ber: float
    channels: tuple[str, ...]
    quadrature_order: int
    freqs_hz: tuple[float, ...]
    calibrate: tuple[float, float] | None
    target_ber: float
    distances_m: np.ndarray
    output_path: Path
    baselines: bool = False
    strict: bool = False
    violations: list[str] = field(default_factory=list)


def parse_config_file(path: str | Path) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS and key not in ("baselines", "strict"):
            raise ConfigurationError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def parse_range(text: str) -> tuple[float, float, float]:
    """``start:stop:step`` (a single number means one point)."""
    parts = text.split(":")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise ConfigurationError(f"bad range {text!r}, expected start:stop:step") from None
    if len(nums) == 1:
        return nums[0], nums[0], 1.0
    if len(nums) != 3:
        raise ConfigurationError(f"bad range {text!r}, expected start:stop:step")
    return nums[0], nums[1], nums[2]


def _ints(text: str, key: str) -> tuple[int, ...]:
    try:
        return tuple(int(float(v)) for v in text.split(",") if v.strip())
    except ValueError:
        raise ConfigurationError(f"{key}: expected comma-separated integers, got {text!r}") from None


def _floats(text: str, key: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ConfigurationError(f"{key}: expected comma-separated numbers, got {text!r}") from None


def _number(text: str, key: str, kind=float):
    try:
        return kind(float(text))
    except ValueError:
        raise ConfigurationError(f"{key}: expected a number, got {text!r}") from None


def _truthy(text: str) -> bool:
    return text.strip().lower() in ("1", "true", "yes", "on")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="noisemod", description=__doc__.split("\n\n")[0])
    parser.add_argument("--config", help="key = value configuration file")
    parser.add_argument("--out", help="output directory for CSV files")
    parser.add_argument("--strict", action="store_true", default=None,
                        help="treat numeric warnings as failures (exit 3)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--snr", help="SNR sweep start:stop:step in dB")
        p.add_argument("--n", help="comma-separated samples per bit")
        p.add_argument("--snr-convention", choices=["per-sample", "per-bit"])
        p.add_argument("--seed")
        p.add_argument("--mc-trials", help="minimum Monte Carlo trials per point (0 disables MC)")
        p.add_argument("--mc-max-trials")
        p.add_argument("--mc-target-errors")
        p.add_argument("--mc-min-ber", help="skip MC where the analytic BER is below this")
        p.add_argument("--batch-size")
        p.add_argument("--workers")
        p.add_argument("--quadrature-order")

    p = sub.add_parser("ber-awgn", help="NoiseMod BER in AWGN, optional BPSK/NC-FSK baselines")
    common(p)
    p.add_argument("--baselines", action="store_true", default=None)
    p = sub.add_parser("ber-fading", help="Rayleigh BER with and without 2-branch selection")
    common(p)
    p.add_argument("--channel", help="comma list of rayleigh, div2-ideal, div2-maxstat, div2-energy")
    p = sub.add_parser("capacity", help="Shannon capacity, 1/N efficiency, mutual information")
    common(p)
    for name in ("energy", "crossover"):
        p = sub.add_parser(name, help="energy per bit vs distance" if name == "energy" else "crossover distances")
        p.add_argument("--freqs", help="comma-separated carrier frequencies in Hz")
        p.add_argument("--calibrate", help="FREQ=DIST: calibrate the gain constant to this crossover")
        p.add_argument("--target-ber")
        if name == "energy":
            p.add_argument("--distances", help="start:stop:step in metres")
    p = sub.add_parser("validate", help="check a configuration and exit")
    common(p)
    return parser


def resolve(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, config file and flags, then type-check every value."""
    merged = dict(DEFAULTS)
    if args.config:
        merged.update(parse_config_file(args.config))
    for key, value in vars(args).items():
        if key in ("config", "command") or value is None:
            continue
        merged[key] = value if isinstance(value, str) else str(value)

    start, stop, step = parse_range(merged["snr"])
    grid = SweepGrid(start, stop, step, _ints(merged["n"], "n"))
    violations = validate(grid=grid) if start != stop else validate(
        grid=SweepGrid(start, start + 1, 1.0, grid.n_list)
    )
    try:
        convention = SnrConvention(merged["snr_convention"])
    except ValueError:
        raise ConfigurationError(f"snr_convention: unknown value {merged['snr_convention']!r}") from None

    mc = None
    trials = _number(merged["mc_trials"], "mc_trials", int)
    if trials > 0:
        max_trials = max(trials, _number(merged["mc_max_trials"], "mc_max_trials", int))
        mc = McConfig(
            trials=trials,
            max_trials=max_trials,
            target_error_events=_number(merged["mc_target_errors"], "mc_target_errors", int),
            seed=_number(merged["seed"], "seed", int),
            batch_size=_number(merged["batch_size"], "batch_size", int),
            workers=_number(merged["workers"], "workers", int),
        )

    channels = tuple(c.strip() for c in merged["channel"].split(",") if c.strip())
    for c in channels:
        if c not in sweeps.CHANNELS:
            raise ConfigurationError(f"channel: unknown channel {c!r}")

    calibrate = None
    if merged["calibrate"]:
        try:
            f, d = merged["calibrate"].split("=")
            calibrate = (float(f), float(d))
        except ValueError:
            raise ConfigurationError(f"calibrate: expected FREQ=DIST, got {merged['calibrate']!r}") from None

    d0, d1, dstep = parse_range(merged["distances"])
    if not (0 < d0 <= d1 and dstep > 0):
        raise ConfigurationError("distances: need 0 < start <= stop and step > 0")
    distances = np.round(d0 + dstep * np.arange(int(math.floor((d1 - d0) / dstep + 1e-9)) + 1), 12)

    return RunConfig(
        command=args.command,
        grid=grid,
        convention=convention,
        mc=mc,
        mc_min_ber=_number(merged["mc_min_ber"], "mc_min_ber"),
        channels=channels,
        quadrature_order=_number(merged["quadrature_order"], "quadrature_order", int),
        freqs_hz=_floats(merged["freqs"], "freqs"),
        calibrate=calibrate,
        target_ber=_number(merged["target_ber"], "target_ber"),
        distances_m=distances,
        output_path=Path(merged["out"]),
        baselines=_truthy(merged.get("baselines", "false")),
        strict=_truthy(merged.get("strict", "false")),
        violations=violations,
    )


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    return f"{value:.9g}"


def emit_csv(rows: list[dict], path: str | Path, columns=None) -> Path:
    """Write rows sorted by the first column; nothing is created for no rows."""
    if not rows:
        raise ValueError("no rows to write")
    columns = tuple(columns or rows[0].keys())
    ordered = sorted(rows, key=lambda r: r[columns[0]])
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in ordered:
            writer.writerow([_fmt(row[c]) for c in columns])
    return path


def _print_table(title: str, rows: list[dict], columns) -> None:
    print(title)
    print("  " + "  ".join(f"{c:>14}" for c in columns))
    for row in rows:
        print("  " + "  ".join(f"{_fmt(row[c]):>14}" for c in columns))


def _gain_constant(cfg: RunConfig) -> float:
    if cfg.calibrate is None:
        return sweeps.energy.FREE_SPACE_KAPPA
    f, d = cfg.calibrate
    return sweeps.calibrated_gain(f, d, cfg.target_ber)


def execute(cfg: RunConfig) -> list[Path]:
    out = cfg.output_path
    snr = cfg.grid.snr_values()
    written: list[Path] = []
    if cfg.command == "ber-awgn":
        for n in cfg.grid.n_list:
            rows = sweeps.ber_rows(n, snr, "awgn", cfg.convention, cfg.mc, cfg.mc_min_ber)
            written.append(emit_csv(rows, out / f"ber_awgn_n{n}.csv", sweeps.BER_COLUMNS))
            _print_table(f"AWGN, N={n} ({cfg.convention.value} SNR)", rows, sweeps.BER_COLUMNS)
        if cfg.baselines:
            rows = sweeps.baseline_rows(snr)
            written.append(emit_csv(rows, out / "ber_baselines.csv", sweeps.BASELINE_COLUMNS))
    elif cfg.command == "ber-fading":
        for ch in cfg.channels:
            for n in cfg.grid.n_list:
                rows = sweeps.ber_rows(n, snr, ch, cfg.convention, cfg.mc, cfg.mc_min_ber, cfg.quadrature_order)
                written.append(emit_csv(rows, out / f"ber_{ch}_n{n}.csv", sweeps.BER_COLUMNS))
                _print_table(f"{ch}, N={n}", rows, sweeps.BER_COLUMNS)
    elif cfg.command == "capacity":
        for n in cfg.grid.n_list:
            rows = sweeps.capacity_rows(n, snr)
            written.append(emit_csv(rows, out / f"capacity_n{n}.csv", sweeps.CAPACITY_COLUMNS))
            _print_table(f"capacity, N={n}", rows, sweeps.CAPACITY_COLUMNS)
    elif cfg.command == "energy":
        kappa = _gain_constant(cfg)
        for f in cfg.freqs_hz:
            rows = sweeps.energy_rows(f, cfg.distances_m, kappa, cfg.target_ber)
            written.append(emit_csv(rows, out / f"energy_{f:.6g}Hz.csv", sweeps.ENERGY_COLUMNS))
        _print_table("crossover", sweeps.crossover_rows(cfg.freqs_hz, kappa, cfg.target_ber),
                     sweeps.CROSSOVER_COLUMNS)
    elif cfg.command == "crossover":
        rows = sweeps.crossover_rows(cfg.freqs_hz, _gain_constant(cfg), cfg.target_ber)
        written.append(emit_csv(rows, out / "crossover.csv", sweeps.CROSSOVER_COLUMNS))
        _print_table("energy crossover distance", rows, sweeps.CROSSOVER_COLUMNS)
    return written


def _attach_negative_values(argv: list[str]) -> list[str]:
    """Turn ``--snr -5:20:1`` into ``--snr=-5:20:1``; argparse would read the
    value as an option."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if tok.startswith("--") and "=" not in tok and nxt and re.match(r"^-[\d.]", nxt):
            out.append(f"{tok}={nxt}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = _attach_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve(args)
    except (ConfigurationError, OSError) as exc:
        print(f"noisemod: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    scenario_checks = [
        v for n in cfg.grid.n_list for v in validate(NoiseModScenario(n, 1.0, 1.0))
    ]
    problems = sorted(set(cfg.violations + scenario_checks))
    if problems:
        for p in problems:
            print(f"noisemod: invalid configuration: {p}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.command == "validate":
        print("ok")
        return EXIT_OK

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NumericWarning)
        try:
            written = execute(cfg)
        except (ConfigurationError, CalibrationError) as exc:
            print(f"noisemod: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except OSError as exc:
            print(f"noisemod: I/O error: {exc}", file=sys.stderr)
            return EXIT_FAILURE
    numeric = [w for w in caught if issubclass(w.category, NumericWarning)]
    for w in numeric:
        print(f"noisemod: warning: {w.message}", file=sys.stderr)
    for path in written:
        print(f"wrote {path}")
    if numeric and cfg.strict:
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
